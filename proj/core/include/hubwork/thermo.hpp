// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file thermo.hpp
 * @brief Entropy production, trace distances and the work fluctuation-dissipation ratio.
 */

#pragma once

#include "hubwork/propagator.hpp"
#include "hubwork/spectral.hpp"
#include "hubwork/workstats.hpp"

#include <Eigen/Dense>

#include <optional>

namespace hubwork {

/// Basis a density matrix is written in.
enum class Frame {
    occupation,       ///< sector occupation-number basis
    final_eigenbasis, ///< eigenbasis of H_f, ascending energies
};

struct DensityMatrix {
    Eigen::MatrixXcd matrix;
    Frame frame = Frame::occupation;

    [[nodiscard]] Eigen::Index dim() const noexcept { return matrix.rows(); }
    [[nodiscard]] std::complex<double> trace() const { return matrix.trace(); }
    [[nodiscard]] double purity() const;
    [[nodiscard]] double hermiticity_defect() const;
};

/// Maximum discarded initial weight for which state-level quantities are computed.
inline constexpr double kMaxStateDiscardedWeight = 1e-9;

/**
 * rho_tau = sum_n p_n^0 |psi_n><psi_n| over the retained set, renormalized by
 * the retained weight. `vectors` are the propagated states expressed in
 * `frame`. Throws ConfigError when the discarded weight is >= 1e-9.
 */
[[nodiscard]] DensityMatrix evolved_state(const Eigen::MatrixXcd& vectors, const PropagatedSet& prop,
                                          const ThermalEnsemble& ensemble0, Frame frame);
[[nodiscard]] DensityMatrix evolved_state(const PropagatedSet& prop, const ThermalEnsemble& ensemble0);

/// Gibbs state of `spec` at inverse temperature beta.
[[nodiscard]] DensityMatrix gibbs_state(const SpectralDecomposition& spec, double beta, Frame frame);

/// Populations p_n^0 moved to the n-th final eigenstate by energy rank.
[[nodiscard]] DensityMatrix adiabatic_reference(const ThermalEnsemble& ensemble0, const SpectralDecomposition& final_spec,
                                                Frame frame);

/// True if some adjacent final levels are closer than `tol` (rank transport is then ambiguous).
[[nodiscard]] bool has_degenerate_levels(const SpectralDecomposition& spec, double tol = 1e-9);

/// Express an occupation-basis density matrix in the eigenbasis of `spec`.
[[nodiscard]] DensityMatrix to_eigenbasis(const DensityMatrix& rho, const SpectralDecomposition& spec);

/// 0.5 * sum |lambda_i(rho - sigma)|.
[[nodiscard]] double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// -sum lambda ln lambda over the spectrum of rho (0 ln 0 := 0).
[[nodiscard]] double von_neumann_entropy(const DensityMatrix& rho);

/// Tr(H_f rho), with H_f given by its eigendecomposition.
[[nodiscard]] double final_energy(const DensityMatrix& rho, const SpectralDecomposition& final_spec);

/**
 * <Sigma> = S(rho_tau || rho_tau^eq) = -S_vN(rho_0^eq) + beta Tr(H_f rho_tau) + ln Z_tau.
 * Uses S_vN(rho_tau) = S_vN(rho_0^eq), exact under unitary evolution.
 */
[[nodiscard]] double entropy_production(const DensityMatrix& rho_tau, const ThermalEnsemble& ensemble0,
                                        const SpectralDecomposition& final_spec, double beta);

/// Tr rho (ln rho - ln sigma) from both spectra; reference path for small dimensions.
[[nodiscard]] double relative_entropy_direct(const DensityMatrix& rho, const DensityMatrix& sigma);

inline constexpr double kMinVariance = 1e-14;

/// 2 <Sigma> / (beta^2 variance); nullopt when the variance is at most kMinVariance.
[[nodiscard]] std::optional<double> fdr_ratio(double sigma, double variance, double beta) noexcept;

/// <W> - Delta F - beta variance / 2.
[[nodiscard]] double linear_response_gap(double mean_work, double delta_f, double variance, double beta) noexcept;

struct ThermoRecord {
    double mean_work = 0.0;
    double variance = 0.0;
    double skew3 = 0.0;                 ///< raw third central moment (J^3)
    double skew_standardized = 0.0;
    double delta_f = 0.0;
    double sigma = 0.0;                 ///< <Sigma>, dimensionless
    double dissipated_energy = 0.0;     ///< <Sigma> / beta
    double d_eq = 0.0;
    double d_adiab = 0.0;
    std::optional<double> fdr;          ///< 2 <Sigma> / (beta^2 variance)
    double lr_gap = 0.0;
    double jarzynski_residual = 0.0;
    bool final_levels_degenerate = false;
};

} // namespace hubwork
