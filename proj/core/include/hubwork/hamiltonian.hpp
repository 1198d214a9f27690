// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file hamiltonian.hpp
 * @brief Driven Hubbard chain H(t) = H_static + (t/tau) H_drive on a sector basis.
 *
 * H_static = -J sum_{j,s} (c+_{j,s} c_{j+1,s} + h.c.) + U sum_j n_{j,up} n_{j,dn}   (open chain)
 * H_drive  = sum_j Delta_j (n_{j,up} + n_{j,dn}),   Delta_j = A j / (L - 1),  j = 1..L
 *
 * All energies are in units of J, times in 1/J.
 */

#pragma once

#include "hubwork/lattice_basis.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hubwork {

struct HubbardParams {
    int num_sites = 4;
    double hopping = 1.0;        ///< J, the energy unit
    double interaction = 0.0;    ///< U
    double drive_amplitude = 10.0; ///< A, total potential drop across the chain
    double beta = 0.4;           ///< inverse temperature
    double tau = 0.0;            ///< driving time; 0 is the sudden quench

    /// Throws ConfigError with an actionable message on unphysical values.
    void validate() const;
};

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/**
 * Real symmetric operator stored in compressed-row form. Construction from
 * triplets sums duplicates and drops exact zeros.
 */
class SparseOperator {
public:
    SparseOperator() = default;
    SparseOperator(std::size_t dim, std::vector<Triplet> entries);

    [[nodiscard]] static SparseOperator diagonal(std::span<const double> diag);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
    [[nodiscard]] std::span<const std::size_t> columns() const noexcept { return columns_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] double at(std::size_t row, std::size_t col) const noexcept;
    [[nodiscard]] std::vector<Triplet> triplets() const;
    [[nodiscard]] Eigen::MatrixXd to_dense() const;

    /// Largest |a_rc - a_cr| over all stored entries.
    [[nodiscard]] double symmetry_defect() const;
    [[nodiscard]] double max_abs() const noexcept;

    /// Gershgorin enclosure [lo, hi] of the spectrum.
    [[nodiscard]] std::pair<double, double> spectral_bounds() const noexcept;

    /// out = (*this) * in, for a column-major block of complex vectors.
    void apply(const Eigen::Ref<const Eigen::MatrixXcd>& in, Eigen::Ref<Eigen::MatrixXcd> out) const;
    void apply(const Eigen::Ref<const Eigen::VectorXd>& in, Eigen::Ref<Eigen::VectorXd> out) const;

    /// a * A + b * B on the union sparsity pattern.
    [[nodiscard]] static SparseOperator combine(double a, const SparseOperator& A, double b, const SparseOperator& B);

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> columns_;
    std::vector<double> values_;
};

/// -J hopping part only (both species, open boundary).
[[nodiscard]] SparseOperator build_hopping(const SectorBasis& basis, double hopping);

/// Diagonal of sum_j n_{j,up} n_{j,dn}.
[[nodiscard]] std::vector<double> double_occupancy_diagonal(const SectorBasis& basis);

/// Site potentials Delta_j for physical sites j = 1..L (returned 0-based).
[[nodiscard]] std::vector<double> drive_potentials(int num_sites, double amplitude);

[[nodiscard]] SparseOperator build_static(const SectorBasis& basis, const HubbardParams& params);
[[nodiscard]] SparseOperator build_drive(const SectorBasis& basis, const HubbardParams& params);

/**
 * Drive coefficient t/tau for the linear ramp. For tau = 0 only t = 0 is
 * admissible and it denotes the post-quench endpoint 0+, coefficient 1.
 * t = tau yields exactly 1 for every tau.
 */
[[nodiscard]] double drive_coefficient(double t, double tau);

[[nodiscard]] SparseOperator hamiltonian_at(double t, double tau, const SparseOperator& h_static,
                                            const SparseOperator& h_drive);

/// H_f = H_static + H_drive; bitwise identical to hamiltonian_at(tau, tau, ...) for all tau.
[[nodiscard]] SparseOperator final_hamiltonian(const SparseOperator& h_static, const SparseOperator& h_drive);

/// Static and drive operators of one (L, U, A) configuration, shared read-only.
struct DrivenHamiltonian {
    SparseOperator h_static;
    SparseOperator h_drive;
    double tau = 0.0;

    [[nodiscard]] SparseOperator at(double t) const { return hamiltonian_at(t, tau, h_static, h_drive); }
    [[nodiscard]] SparseOperator initial() const { return h_static; }
    [[nodiscard]] SparseOperator final() const { return final_hamiltonian(h_static, h_drive); }
};

[[nodiscard]] DrivenHamiltonian build_driven(const SectorBasis& basis, const HubbardParams& params);

} // namespace hubwork
