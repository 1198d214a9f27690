// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "hubwork/thermo.hpp"

#include "hubwork/errors.hpp"

#include <cmath>
#include <sstream>

namespace hubwork {

double DensityMatrix::purity() const {
    // Tr rho^2 = sum |rho_ij|^2 for Hermitian rho.
    return matrix.cwiseAbs2().sum();
}

double DensityMatrix::hermiticity_defect() const {
    if (matrix.size() == 0) return 0.0;
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix evolved_state(const Eigen::MatrixXcd& vectors, const PropagatedSet& prop,
                            const ThermalEnsemble& ensemble0, Frame frame) {
    if (prop.discarded_weight >= kMaxStateDiscardedWeight) {
        std::ostringstream err;
        err << "evolved_state: discarded initial weight " << prop.discarded_weight
            << " >= 1e-9; lower weight_cutoff for state-level quantities";
        throw ConfigError(err.str());
    }
    if (vectors.cols() != static_cast<Eigen::Index>(prop.indices.size())) {
        throw ConfigError("evolved_state: vector block does not match the propagated set");
    }
    Eigen::VectorXd w(vectors.cols());
    for (Eigen::Index r = 0; r < vectors.cols(); ++r) w(r) = ensemble0.weights(static_cast<Eigen::Index>(prop.indices[static_cast<std::size_t>(r)]));
    const double total = w.sum();
    DensityMatrix rho;
    rho.frame = frame;
    rho.matrix = vectors * (w / total).asDiagonal() * vectors.adjoint();
    return rho;
}

DensityMatrix evolved_state(const PropagatedSet& prop, const ThermalEnsemble& ensemble0) {
    return evolved_state(prop.vectors, prop, ensemble0, Frame::occupation);
}

namespace {

DensityMatrix diagonal_in_eigenbasis(const Eigen::VectorXd& populations, const SpectralDecomposition& spec, Frame frame) {
    DensityMatrix rho;
    rho.frame = frame;
    if (frame == Frame::final_eigenbasis) {
        rho.matrix = populations.cast<std::complex<double>>().asDiagonal();
    } else {
        const Eigen::MatrixXd m = spec.eigenvectors * populations.asDiagonal() * spec.eigenvectors.transpose();
        rho.matrix = m.cast<std::complex<double>>();
    }
    return rho;
}

} // namespace

DensityMatrix gibbs_state(const SpectralDecomposition& spec, double beta, Frame frame) {
    return diagonal_in_eigenbasis(gibbs_weights(spec, beta).weights, spec, frame);
}

DensityMatrix adiabatic_reference(const ThermalEnsemble& ensemble0, const SpectralDecomposition& final_spec, Frame frame) {
    if (ensemble0.weights.size() != static_cast<Eigen::Index>(final_spec.dim())) {
        throw ConfigError("adiabatic_reference: dimension mismatch");
    }
    // Both spectra are ascending, so rank n of H_0 maps to rank n of H_f.
    return diagonal_in_eigenbasis(ensemble0.weights, final_spec, frame);
}

bool has_degenerate_levels(const SpectralDecomposition& spec, double tol) {
    for (Eigen::Index i = 1; i < spec.eigenvalues.size(); ++i) {
        if (spec.eigenvalues(i) - spec.eigenvalues(i - 1) <= tol) return true;
    }
    return false;
}

DensityMatrix to_eigenbasis(const DensityMatrix& rho, const SpectralDecomposition& spec) {
    if (rho.frame == Frame::final_eigenbasis) return rho;
    const Eigen::MatrixXcd v = spec.eigenvectors.cast<std::complex<double>>();
    return {v.adjoint() * rho.matrix * v, Frame::final_eigenbasis};
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw ConfigError("trace_distance: dimension mismatch");
    if (rho.frame != sigma.frame) throw ConfigError("trace_distance: density matrices in different frames");
    const Eigen::MatrixXcd diff = rho.matrix - sigma.matrix;
    const Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (diff + diff.adjoint()));
    return 0.5 * ev.cwiseAbs().sum();
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(rho.matrix);
    double s = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > 0.0) s -= ev(i) * std::log(ev(i));
    }
    return s;
}

double final_energy(const DensityMatrix& rho, const SpectralDecomposition& final_spec) {
    if (rho.dim() != static_cast<Eigen::Index>(final_spec.dim())) throw ConfigError("final_energy: dimension mismatch");
    if (rho.frame == Frame::final_eigenbasis) return rho.matrix.diagonal().real().dot(final_spec.eigenvalues);
    // Tr(V diag(e) V^T rho) = sum_m e_m (V^T rho V)_mm
    const Eigen::MatrixXcd v = final_spec.eigenvectors.cast<std::complex<double>>();
    const Eigen::MatrixXcd rv = rho.matrix * v;
    double e = 0.0;
    for (Eigen::Index m = 0; m < v.cols(); ++m) e += final_spec.eigenvalues(m) * v.col(m).dot(rv.col(m)).real();
    return e;
}

double entropy_production(const DensityMatrix& rho_tau, const ThermalEnsemble& ensemble0,
                          const SpectralDecomposition& final_spec, double beta) {
    if (!(beta > 0.0)) throw ConfigError("entropy_production: beta must be positive");
    return -ensemble0.entropy() + beta * final_energy(rho_tau, final_spec) + log_partition(final_spec.eigenvalues, beta);
}

double relative_entropy_direct(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim() || rho.frame != sigma.frame) throw ConfigError("relative_entropy_direct: incompatible inputs");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_rho(rho.matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_sigma(sigma.matrix);
    if (es_rho.info() != Eigen::Success || es_sigma.info() != Eigen::Success) {
        throw NumericalError("relative_entropy_direct: eigensolver failed");
    }
    double tr_rho_ln_rho = 0.0;
    for (Eigen::Index i = 0; i < es_rho.eigenvalues().size(); ++i) {
        const double l = es_rho.eigenvalues()(i);
        if (l > 0.0) tr_rho_ln_rho += l * std::log(l);
    }
    const Eigen::VectorXd ln_sigma = es_sigma.eigenvalues().array().log();
    const Eigen::MatrixXcd log_sigma =
        es_sigma.eigenvectors() * ln_sigma.cast<std::complex<double>>().asDiagonal() * es_sigma.eigenvectors().adjoint();
    const double tr_rho_ln_sigma = (rho.matrix * log_sigma).trace().real();
    return tr_rho_ln_rho - tr_rho_ln_sigma;
}

std::optional<double> fdr_ratio(double sigma, double variance, double beta) noexcept {
    if (!(variance > kMinVariance) || !(beta > 0.0)) return std::nullopt;
    return 2.0 * sigma / (beta * beta * variance);
}

double linear_response_gap(double mean_work, double delta_f, double variance, double beta) noexcept {
    return mean_work - delta_f - 0.5 * beta * variance;
}

} // namespace hubwork
