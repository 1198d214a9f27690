// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "hubwork/hamiltonian.hpp"

#include "hubwork/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hubwork {

void HubbardParams::validate() const {
    std::ostringstream err;
    if (num_sites < 2 || num_sites % 2 != 0 || num_sites > kMaxSites) {
        err << "L must be an even number in [2, " << kMaxSites << "], got " << num_sites;
    } else if (!(hopping > 0.0) || !std::isfinite(hopping)) {
        err << "J must be positive and finite, got " << hopping;
    } else if (!(interaction >= 0.0) || !std::isfinite(interaction)) {
        err << "U must be >= 0 (units of J), got " << interaction;
    } else if (!std::isfinite(drive_amplitude)) {
        err << "drive amplitude A must be finite, got " << drive_amplitude;
    } else if (!(beta > 0.0) || !std::isfinite(beta)) {
        err << "beta must be positive (units of 1/J), got " << beta;
    } else if (!(tau >= 0.0) || !std::isfinite(tau)) {
        err << "tau must be >= 0 (units of 1/J), got " << tau;
    } else {
        return;
    }
    throw ConfigError(err.str());
}

SparseOperator::SparseOperator(std::size_t dim, std::vector<Triplet> entries) : dim_(dim) {
    for (const auto& t : entries) {
        if (t.row >= dim || t.col >= dim) throw ConfigError("SparseOperator: triplet index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    row_offsets_.assign(dim + 1, 0);
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t k = i;
        double sum = 0.0;
        while (k < entries.size() && entries[k].row == entries[i].row && entries[k].col == entries[i].col) {
            sum += entries[k].value;
            ++k;
        }
        if (sum != 0.0) {
            columns_.push_back(entries[i].col);
            values_.push_back(sum);
            ++row_offsets_[entries[i].row + 1];
        }
        i = k;
    }
    for (std::size_t r = 0; r < dim; ++r) row_offsets_[r + 1] += row_offsets_[r];
}

SparseOperator SparseOperator::diagonal(std::span<const double> diag) {
    std::vector<Triplet> t;
    t.reserve(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) t.push_back({i, i, diag[i]});
    return SparseOperator(diag.size(), std::move(t));
}

double SparseOperator::at(std::size_t row, std::size_t col) const noexcept {
    if (row >= dim_) return 0.0;
    const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row]);
    const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row + 1]);
    auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return 0.0;
    return values_[static_cast<std::size_t>(it - columns_.begin())];
}

std::vector<Triplet> SparseOperator::triplets() const {
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) out.push_back({r, columns_[k], values_[k]});
    }
    return out;
}

Eigen::MatrixXd SparseOperator::to_dense() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : triplets()) m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) = t.value;
    return m;
}

double SparseOperator::symmetry_defect() const {
    double worst = 0.0;
    for (const auto& t : triplets()) worst = std::max(worst, std::abs(t.value - at(t.col, t.row)));
    return worst;
}

double SparseOperator::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::pair<double, double> SparseOperator::spectral_bounds() const noexcept {
    if (dim_ == 0) return {0.0, 0.0};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t r = 0; r < dim_; ++r) {
        double centre = 0.0;
        double radius = 0.0;
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            if (columns_[k] == r) centre = values_[k];
            else radius += std::abs(values_[k]);
        }
        lo = std::min(lo, centre - radius);
        hi = std::max(hi, centre + radius);
    }
    return {lo, hi};
}

void SparseOperator::apply(const Eigen::Ref<const Eigen::MatrixXcd>& in, Eigen::Ref<Eigen::MatrixXcd> out) const {
    const Eigen::Index cols = in.cols();
    for (Eigen::Index c = 0; c < cols; ++c) {
        const std::complex<double>* x = in.col(c).data();
        std::complex<double>* y = out.col(c).data();
        for (std::size_t r = 0; r < dim_; ++r) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) acc += values_[k] * x[columns_[k]];
            y[r] = acc;
        }
    }
}

void SparseOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& in, Eigen::Ref<Eigen::VectorXd> out) const {
    for (std::size_t r = 0; r < dim_; ++r) {
        double acc = 0.0;
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            acc += values_[k] * in(static_cast<Eigen::Index>(columns_[k]));
        }
        out(static_cast<Eigen::Index>(r)) = acc;
    }
}

SparseOperator SparseOperator::combine(double a, const SparseOperator& A, double b, const SparseOperator& B) {
    if (A.dim() != B.dim()) throw ConfigError("SparseOperator::combine: dimension mismatch");
    SparseOperator out;
    out.dim_ = A.dim_;
    out.row_offsets_.assign(out.dim_ + 1, 0);
    for (std::size_t r = 0; r < out.dim_; ++r) {
        std::size_t i = A.row_offsets_[r];
        std::size_t j = B.row_offsets_[r];
        const std::size_t iend = A.row_offsets_[r + 1];
        const std::size_t jend = B.row_offsets_[r + 1];
        while (i < iend || j < jend) {
            std::size_t col;
            double v;
            if (j >= jend || (i < iend && A.columns_[i] < B.columns_[j])) {
                col = A.columns_[i];
                v = a * A.values_[i++];
            } else if (i >= iend || B.columns_[j] < A.columns_[i]) {
                col = B.columns_[j];
                v = b * B.values_[j++];
            } else {
                col = A.columns_[i];
                v = a * A.values_[i++] + b * B.values_[j++];
            }
            out.columns_.push_back(col);
            out.values_.push_back(v);
        }
        out.row_offsets_[r + 1] = out.columns_.size();
    }
    return out;
}

SparseOperator build_hopping(const SectorBasis& basis, double hopping) {
    const int L = basis.num_sites();
    std::vector<Triplet> entries;
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const BasisState& s = basis[col];
        for (Spin spin : {Spin::up, Spin::down}) {
            for (int j = 0; j + 1 < L; ++j) {
                for (HopDirection dir : {HopDirection::left, HopDirection::right}) {
                    auto hop = apply_hop(s, L, j, spin, dir);
                    if (!hop) continue;
                    auto row = basis.index_of(hop->state);
                    if (!row) throw NumericalError("build_hopping: hop left the sector");
                    entries.push_back({*row, col, -hopping * hop->sign});
                }
            }
        }
    }
    return SparseOperator(basis.size(), std::move(entries));
}

std::vector<double> double_occupancy_diagonal(const SectorBasis& basis) {
    std::vector<double> d(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) d[i] = total_double_occupancy(basis[i]);
    return d;
}

std::vector<double> drive_potentials(int num_sites, double amplitude) {
    if (num_sites < 2) throw ConfigError("drive potential needs L >= 2 (Delta_j divides by L - 1)");
    std::vector<double> delta(static_cast<std::size_t>(num_sites));
    for (int j = 1; j <= num_sites; ++j) delta[static_cast<std::size_t>(j - 1)] = amplitude * j / (num_sites - 1);
    return delta;
}

SparseOperator build_static(const SectorBasis& basis, const HubbardParams& params) {
    if (basis.num_sites() != params.num_sites) throw ConfigError("build_static: basis L differs from params L");
    std::vector<Triplet> entries = build_hopping(basis, params.hopping).triplets();
    if (params.interaction != 0.0) {
        const auto docc = double_occupancy_diagonal(basis);
        for (std::size_t i = 0; i < docc.size(); ++i) entries.push_back({i, i, params.interaction * docc[i]});
    }
    return SparseOperator(basis.size(), std::move(entries));
}

SparseOperator build_drive(const SectorBasis& basis, const HubbardParams& params) {
    if (basis.num_sites() != params.num_sites) throw ConfigError("build_drive: basis L differs from params L");
    const auto delta = drive_potentials(params.num_sites, params.drive_amplitude);
    std::vector<double> diag(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const BasisState& s = basis[i];
        double v = 0.0;
        for (int j = 0; j < params.num_sites; ++j) {
            v += delta[static_cast<std::size_t>(j)] * (static_cast<int>(s.up.occupied(j)) + static_cast<int>(s.down.occupied(j)));
        }
        diag[i] = v;
    }
    return SparseOperator::diagonal(diag);
}

double drive_coefficient(double t, double tau) {
    if (tau == 0.0) {
        if (t != 0.0) throw ConfigError("sudden quench (tau = 0) only admits t = 0");
        return 1.0;
    }
    if (t < 0.0 || t > tau) throw ConfigError("hamiltonian_at: t outside [0, tau]");
    return t / tau;
}

SparseOperator hamiltonian_at(double t, double tau, const SparseOperator& h_static, const SparseOperator& h_drive) {
    return SparseOperator::combine(1.0, h_static, drive_coefficient(t, tau), h_drive);
}

SparseOperator final_hamiltonian(const SparseOperator& h_static, const SparseOperator& h_drive) {
    return SparseOperator::combine(1.0, h_static, 1.0, h_drive);
}

DrivenHamiltonian build_driven(const SectorBasis& basis, const HubbardParams& params) {
    params.validate();
    return {build_static(basis, params), build_drive(basis, params), params.tau};
}

} // namespace hubwork
