// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace hubwork {

/**
 * Two-point-measurement transition data. Row r of `probs` holds
 * p_{m|n} = |<m|U(tau)|n>|^2 for the initial eigenstate n = retained[r] and
 * every final eigenstate m. Rows are stored unnormalized (raw values).
 */
struct TransitionTable {
    Eigen::VectorXd eps0;       ///< initial energies e_n^0, ascending
    Eigen::VectorXd eps_f;      ///< final energies e_m^tau, ascending
    Eigen::VectorXd weights0;   ///< Gibbs weights p_n^0 over all initial eigenstates
    std::vector<std::size_t> retained;
    Eigen::MatrixXd probs;      ///< retained.size() x eps_f.size()
    double discarded_weight = 0.0;

    [[nodiscard]] std::size_t pair_count() const noexcept {
        return retained.size() * static_cast<std::size_t>(eps_f.size());
    }
    /// max_n |sum_m p_{m|n} - 1|
    [[nodiscard]] double row_sum_defect() const;
};

} // namespace hubwork
