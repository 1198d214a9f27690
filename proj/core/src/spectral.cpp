// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "hubwork/spectral.hpp"

#include "hubwork/errors.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace hubwork {

double ThermalEnsemble::entropy() const noexcept {
    double s = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const double p = weights(i);
        if (p > 0.0) s -= p * std::log(p);
    }
    return s;
}

namespace {

// Residual and orthonormality check on a sample of eigenpairs; O(k n^2).
bool eigenpairs_plausible(const Eigen::MatrixXd& h, const SpectralDecomposition& d) {
    const Eigen::Index n = h.rows();
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double tol = 1e-8 * scale * std::sqrt(static_cast<double>(n));
    const Eigen::Index k = std::min<Eigen::Index>(n, 16);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < k; ++i) cols.push_back(k == 1 ? 0 : i * (n - 1) / (k - 1));
    for (Eigen::Index c : cols) {
        const auto v = d.eigenvectors.col(c);
        const double r = (h * v - d.eigenvalues(c) * v).cwiseAbs().maxCoeff();
        if (!std::isfinite(r) || r > tol) return false;
        for (Eigen::Index c2 : cols) {
            const double g = v.dot(d.eigenvectors.col(c2)) - (c == c2 ? 1.0 : 0.0);
            if (!(std::abs(g) <= 1e-8)) return false;
        }
    }
    return true;
}

} // namespace

SpectralDecomposition decompose(const Eigen::MatrixXd& h, std::size_t max_dim) {
    if (h.rows() != h.cols()) throw ConfigError("decompose: matrix is not square");
    const auto n = static_cast<std::size_t>(h.rows());
    if (n > max_dim) {
        throw ConfigError("decompose: dimension " + std::to_string(n) + " exceeds cap " + std::to_string(max_dim));
    }
    SpectralDecomposition out;
    out.eigenvectors = h;
    out.eigenvalues.resize(h.rows());
    if (n == 0) return out;
    const lapack_int ln = static_cast<lapack_int>(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', ln, out.eigenvectors.data(), ln,
                                           out.eigenvalues.data());
    if (info != 0) throw NumericalError("decompose: dsyevd failed with info = " + std::to_string(info));
    if (!eigenpairs_plausible(h, out)) {
        // Some optimized BLAS builds corrupt the eigenvector back-transform; fall back to Eigen.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success) throw NumericalError("decompose: fallback eigensolver failed");
        out.eigenvalues = es.eigenvalues();
        out.eigenvectors = es.eigenvectors();
    }
    return out;
}

SpectralDecomposition decompose(const SparseOperator& h, std::size_t max_dim) {
    if (h.dim() > max_dim) {
        throw ConfigError("decompose: dimension " + std::to_string(h.dim()) + " exceeds cap " + std::to_string(max_dim));
    }
    return decompose(h.to_dense(), max_dim);
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& h) {
    if (h.rows() != h.cols()) throw ConfigError("symmetric_eigenvalues: matrix is not square");
    Eigen::MatrixXd a = h;
    Eigen::VectorXd w(h.rows());
    if (h.rows() == 0) return w;
    const lapack_int n = static_cast<lapack_int>(h.rows());
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
    if (info != 0) throw NumericalError("symmetric_eigenvalues: dsyevd failed with info = " + std::to_string(info));
    return w;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) throw ConfigError("hermitian_eigenvalues: matrix is not square");
    Eigen::MatrixXcd a = h;
    Eigen::VectorXd w(h.rows());
    if (h.rows() == 0) return w;
    const lapack_int n = static_cast<lapack_int>(h.rows());
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                                           reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
    if (info != 0) throw NumericalError("hermitian_eigenvalues: zheevd failed with info = " + std::to_string(info));
    return w;
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& x) noexcept {
    if (x.size() == 0) return -std::numeric_limits<double>::infinity();
    const double m = x.maxCoeff();
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::exp(x(i) - m);
    return m + std::log(s);
}

double log_partition(const Eigen::Ref<const Eigen::VectorXd>& energies, double beta) {
    return log_sum_exp(-beta * energies);
}

ThermalEnsemble gibbs_weights(const Eigen::Ref<const Eigen::VectorXd>& energies, double beta) {
    if (!(beta > 0.0)) throw ConfigError("gibbs_weights: beta must be positive");
    ThermalEnsemble ens;
    ens.beta = beta;
    ens.log_z = log_partition(energies, beta);
    ens.weights.resize(energies.size());
    for (Eigen::Index i = 0; i < energies.size(); ++i) ens.weights(i) = std::exp(-beta * energies(i) - ens.log_z);
    return ens;
}

ThermalEnsemble gibbs_weights(const SpectralDecomposition& spec, double beta) {
    return gibbs_weights(spec.eigenvalues, beta);
}

double free_energy_difference(const SpectralDecomposition& initial, const SpectralDecomposition& final, double beta) {
    if (initial.dim() != final.dim()) throw ConfigError("free_energy_difference: decompositions on different sectors");
    if (!(beta > 0.0)) throw ConfigError("free_energy_difference: beta must be positive");
    return -(log_partition(final.eigenvalues, beta) - log_partition(initial.eigenvalues, beta)) / beta;
}

double orthonormality_defect(const SpectralDecomposition& spec) {
    const auto n = spec.eigenvectors.cols();
    Eigen::MatrixXd g = spec.eigenvectors.transpose() * spec.eigenvectors;
    g -= Eigen::MatrixXd::Identity(n, n);
    return n == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

double reconstruction_defect(const SpectralDecomposition& spec, const Eigen::MatrixXd& h) {
    if (h.size() == 0) return 0.0;
    Eigen::MatrixXd r = spec.eigenvectors * spec.eigenvalues.asDiagonal() * spec.eigenvectors.transpose();
    return (r - h).cwiseAbs().maxCoeff();
}

} // namespace hubwork
