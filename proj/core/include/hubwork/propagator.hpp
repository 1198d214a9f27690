// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file propagator.hpp
 * @brief Time evolution of initial eigenstates under the linear ramp H(t).
 *
 * Each retained eigenvector of H_0 is integrated with i d/dt psi = H(t) psi
 * (hbar = 1) from t = 0 to tau. Exponential schemes apply exp(-i h K) through
 * a Chebyshev expansion whose coefficients are Bessel functions; the
 * truncation is chosen per step from a Gershgorin enclosure of K.
 */

#pragma once

#include "hubwork/hamiltonian.hpp"
#include "hubwork/spectral.hpp"
#include "hubwork/transition_table.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hubwork {

enum class Scheme {
    midpoint,   ///< exp(-i h H(t + h/2)), second order
    cf4,        ///< two-exponential commutator-free Magnus integrator, fourth order
    rk4,        ///< classical Runge-Kutta; not norm preserving, reference use only
};

[[nodiscard]] std::string_view to_string(Scheme s) noexcept;
[[nodiscard]] std::optional<Scheme> parse_scheme(std::string_view name) noexcept;

struct PropagationConfig {
    Scheme scheme = Scheme::cf4;
    double dt = 0.0;                ///< initial step; 0 selects tau / 1000
    double tol_unitary = 1e-10;     ///< per-trajectory norm drift bound
    double tol_observable = 1e-8;   ///< max change of any p_{m|n} under step halving
    double weight_cutoff = 1e-12;   ///< initial states with p_n^0 below this are not propagated
    bool refine = true;             ///< adaptive halving; false runs the initial step only
    int max_refinements = 8;
    std::size_t workers = 1;        ///< threads over trajectory chunks
    std::size_t chunk_columns = 32;

    void validate() const;
};

struct PropagationStats {
    std::size_t steps = 0;          ///< steps of the accepted run
    int refinements = 0;            ///< halvings performed
    double final_dt = 0.0;
    double observable_change = 0.0; ///< last measured max |dp| under halving (0 if not refined)
    double max_norm_drift = 0.0;
    std::size_t operator_applications = 0;
};

struct PropagatedSet {
    std::vector<std::size_t> indices;   ///< initial eigenstate ordinals n
    Eigen::MatrixXcd vectors;           ///< column r is psi_{indices[r]}(tau) in the occupation basis
    double discarded_weight = 0.0;      ///< sum of p_n^0 over states not propagated
    PropagationStats stats;
};

/// Indices with weight >= cutoff (ascending) and the summed weight of the rest.
[[nodiscard]] std::pair<std::vector<std::size_t>, double> select_retained(const ThermalEnsemble& ensemble,
                                                                          double weight_cutoff);

/**
 * Evolves a block of state vectors over [0, tau] with a fixed number of
 * steps. `drive_diag` is the diagonal of H_drive.
 */
void evolve_block(Eigen::Ref<Eigen::MatrixXcd> block, const SparseOperator& h_static,
                  const Eigen::VectorXd& drive_diag, double tau, std::size_t steps, Scheme scheme,
                  double tol_unitary, std::size_t* applications = nullptr);

/**
 * exp(-i h K) X for K = h_static + s * diag(drive_diag), by Chebyshev
 * expansion truncated once the Bessel tail drops below `tol`.
 * Returns the number of operator applications used.
 */
std::size_t expm_action(Eigen::Ref<Eigen::MatrixXcd> block, const SparseOperator& h_static,
                        const Eigen::VectorXd& drive_diag, double s, double h, double tol);

/**
 * Propagates every retained eigenvector of the initial Hamiltonian. When
 * `final_spec` is given, step halving is judged on the transition
 * probabilities in that eigenbasis; otherwise on the basis-independent
 * bound 2 * max ||dpsi||.
 * tau = 0 is the sudden quench: psi_n(tau) = |n>.
 */
[[nodiscard]] PropagatedSet propagate(const SpectralDecomposition& initial_spec, const ThermalEnsemble& ensemble0,
                                      const DrivenHamiltonian& hamiltonian, const PropagationConfig& cfg,
                                      const SpectralDecomposition* final_spec = nullptr);

/// Phi = V_f^T Psi: propagated vectors expressed in the final eigenbasis.
[[nodiscard]] Eigen::MatrixXcd final_amplitudes(const PropagatedSet& prop, const SpectralDecomposition& final_spec);

[[nodiscard]] TransitionTable transition_table(const Eigen::MatrixXcd& amplitudes, const PropagatedSet& prop,
                                               const SpectralDecomposition& initial_spec,
                                               const SpectralDecomposition& final_spec,
                                               const ThermalEnsemble& ensemble0);

[[nodiscard]] TransitionTable transition_matrix(const PropagatedSet& prop, const SpectralDecomposition& initial_spec,
                                                const SpectralDecomposition& final_spec,
                                                const ThermalEnsemble& ensemble0);

/// max |Psi^H Psi - I| over the retained set.
[[nodiscard]] double unitarity_defect(const PropagatedSet& prop);

} // namespace hubwork
