// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spectral.hpp
 * @brief Dense symmetric eigendecomposition, Gibbs weights and free energies.
 */

#pragma once

#include "hubwork/hamiltonian.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace hubwork {

/// Eigenvalues ascending; eigenvectors are the matching orthonormal columns.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// p_n = exp(-beta e_n - log_Z), normalized.
struct ThermalEnsemble {
    Eigen::VectorXd weights;
    double log_z = 0.0;
    double beta = 0.0;

    /// Von Neumann entropy -sum p ln p of the Gibbs state (0 ln 0 := 0).
    [[nodiscard]] double entropy() const noexcept;
};

/// Throws ConfigError if the dimension exceeds `max_dim`, NumericalError if LAPACK fails.
[[nodiscard]] SpectralDecomposition decompose(const SparseOperator& h, std::size_t max_dim = kDefaultMaxDimension);
[[nodiscard]] SpectralDecomposition decompose(const Eigen::MatrixXd& h, std::size_t max_dim = kDefaultMaxDimension);

/// Eigenvalues of a real symmetric matrix (ascending), no eigenvectors.
[[nodiscard]] Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& h);

/// Eigenvalues of a Hermitian matrix (ascending), no eigenvectors.
[[nodiscard]] Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h);

/// Shift-stable log(sum_i exp(x_i)).
[[nodiscard]] double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& x) noexcept;

[[nodiscard]] double log_partition(const Eigen::Ref<const Eigen::VectorXd>& energies, double beta);

[[nodiscard]] ThermalEnsemble gibbs_weights(const SpectralDecomposition& spec, double beta);
[[nodiscard]] ThermalEnsemble gibbs_weights(const Eigen::Ref<const Eigen::VectorXd>& energies, double beta);

/// Delta F = -(log Z_f - log Z_0) / beta.
[[nodiscard]] double free_energy_difference(const SpectralDecomposition& initial, const SpectralDecomposition& final,
                                            double beta);

/// max |V^T V - I| and max |H - V diag(e) V^T| for diagnostics and tests.
[[nodiscard]] double orthonormality_defect(const SpectralDecomposition& spec);
[[nodiscard]] double reconstruction_defect(const SpectralDecomposition& spec, const Eigen::MatrixXd& h);

} // namespace hubwork
