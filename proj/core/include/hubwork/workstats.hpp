// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file workstats.hpp
 * @brief Two-point-measurement work distribution and its moments.
 *
 *   P(W) = sum_{n,m} p_n^0 p_{m|n} delta(W - (e_m^tau - e_n^0))
 */

#pragma once

#include "hubwork/hamiltonian.hpp"
#include "hubwork/propagator.hpp"
#include "hubwork/spectral.hpp"
#include "hubwork/transition_table.hpp"

#include <cstddef>
#include <vector>

namespace hubwork {

inline constexpr double kDefaultMergeTol = 1e-9;
inline constexpr double kDefaultProbFloor = 1e-14;

struct WorkDistribution {
    std::vector<double> support;   ///< ascending work values (J)
    std::vector<double> probs;     ///< P(W_i), normalized
    double merge_tol = kDefaultMergeTol;
    std::size_t pair_count = 0;     ///< all enumerated (n, m) pairs (retained n x all m)
    std::size_t raw_pair_count = 0; ///< pairs with p_n^0 p_{m|n} above the floor
    double dropped_mass = 0.0;      ///< mass of pairs below the floor
    double discarded_weight = 0.0;  ///< initial weight never propagated

    [[nodiscard]] std::size_t size() const noexcept { return support.size(); }
    [[nodiscard]] double total() const noexcept;
};

/**
 * Accumulates p_n^0 p_{m|n} on W = e_m - e_n, drops pairs below
 * `prob_floor`, merges work values whose gap to the previous value is at most
 * `merge_tol` (probability-weighted mean), and renormalizes.
 */
[[nodiscard]] WorkDistribution build_distribution(const TransitionTable& table, double merge_tol = kDefaultMergeTol,
                                                  double prob_floor = kDefaultProbFloor);

[[nodiscard]] double mean(const WorkDistribution& dist) noexcept;

/// <(W - <W>)^k>; k = 3 is the raw third central moment (units J^3).
[[nodiscard]] double central_moment(const WorkDistribution& dist, int k) noexcept;

/// Third central moment over variance^(3/2); 0 when the variance vanishes.
[[nodiscard]] double standardized_skewness(const WorkDistribution& dist) noexcept;

/// log <exp(-beta W)>, accumulated in the log domain.
[[nodiscard]] double log_jarzynski(const WorkDistribution& dist, double beta) noexcept;

/// <exp(-beta W)>; equals exp(-beta Delta F) for unitary driving from a Gibbs state.
[[nodiscard]] double jarzynski_estimator(const WorkDistribution& dist, double beta) noexcept;

/// |<exp(-beta W)> exp(beta Delta F) - 1|, evaluated in the log domain.
[[nodiscard]] double jarzynski_residual(const WorkDistribution& dist, double beta, double delta_f) noexcept;

struct MeanEnergyCheck {
    double tpm_mean = 0.0;      ///< sum_{n,m} p_n p_{m|n} (e_m - e_n) from the transition table
    double unitary_mean = 0.0;  ///< sum_n p_n <psi_n| H_f |psi_n> - sum_n p_n e_n
};

/**
 * Evaluates <W> through two code paths. The unitary path uses the sparse
 * final Hamiltonian on the propagated vectors, not its eigendecomposition.
 */
[[nodiscard]] MeanEnergyCheck mean_energy_crosscheck(const TransitionTable& table, const PropagatedSet& prop,
                                                     const SparseOperator& final_hamiltonian);

/// Stem data smoothed with a Gaussian kernel, for plotting only.
struct SmoothedCurve {
    std::vector<double> w;
    std::vector<double> density;
};

[[nodiscard]] SmoothedCurve smooth_distribution(const WorkDistribution& dist, double width, std::size_t points = 400);

} // namespace hubwork
