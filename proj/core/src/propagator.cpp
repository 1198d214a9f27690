// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "hubwork/propagator.hpp"

#include "hubwork/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace hubwork {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};
constexpr std::size_t kMaxChebyshevTerms = 100000;

// Writes out = (K - centre) / radius * in, with K = H_static + s * diag(drive).
void apply_scaled(const SparseOperator& h, const Eigen::VectorXd& drive, double s, double centre, double radius,
                  const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) {
    const auto offsets = h.row_offsets();
    const auto cols = h.columns();
    const auto vals = h.values();
    const std::size_t n = h.dim();
    const double inv = 1.0 / radius;
    for (Eigen::Index c = 0; c < in.cols(); ++c) {
        const cplx* x = in.col(c).data();
        cplx* y = out.col(c).data();
        for (std::size_t r = 0; r < n; ++r) {
            cplx acc = (s * drive(static_cast<Eigen::Index>(r)) - centre) * x[r];
            for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) acc += vals[k] * x[cols[k]];
            y[r] = acc * inv;
        }
    }
}

void apply_plain(const SparseOperator& h, const Eigen::VectorXd& drive, double s, const Eigen::MatrixXcd& in,
                 Eigen::MatrixXcd& out) {
    apply_scaled(h, drive, s, 0.0, 1.0, in, out);
}

std::pair<double, double> bounds_with_drive(const SparseOperator& h, const Eigen::VectorXd& drive, double s) {
    const auto offsets = h.row_offsets();
    const auto cols = h.columns();
    const auto vals = h.values();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t r = 0; r < h.dim(); ++r) {
        double centre = s * drive(static_cast<Eigen::Index>(r));
        double radius = 0.0;
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            if (cols[k] == r) centre += vals[k];
            else radius += std::abs(vals[k]);
        }
        lo = std::min(lo, centre - radius);
        hi = std::max(hi, centre + radius);
    }
    return {lo, hi};
}

// Chebyshev coefficients 2 (-i)^k J_k(x) (k >= 1), J_0(x) for k = 0, until the tail is below tol.
std::vector<cplx> chebyshev_coefficients(double x, double tol) {
    std::vector<cplx> coef;
    cplx phase{1.0, 0.0};
    for (std::size_t k = 0;; ++k) {
        const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
        coef.push_back((k == 0 ? 1.0 : 2.0) * jk * phase);
        phase *= -kI;
        if (static_cast<double>(k) > x) {
            const double next = std::cyl_bessel_j(static_cast<double>(k + 1), x);
            if (2.0 * (std::abs(jk) + std::abs(next)) < tol) break;
        }
        if (k >= kMaxChebyshevTerms) {
            throw NumericalError("expm_action: Chebyshev expansion did not converge (h * radius too large)");
        }
    }
    return coef;
}

void check_drive(const DrivenHamiltonian& ham, Eigen::VectorXd& diag) {
    const auto& d = ham.h_drive;
    diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.dim()));
    for (const auto& t : d.triplets()) {
        if (t.row != t.col) throw ConfigError("propagate: drive operator must be diagonal");
        diag(static_cast<Eigen::Index>(t.row)) = t.value;
    }
    if (ham.h_static.dim() != d.dim()) throw ConfigError("propagate: static and drive dimensions differ");
}

template <class Fn>
void parallel_chunks(std::size_t total, std::size_t chunk, std::size_t workers, Fn&& fn) {
    const std::size_t nchunks = (total + chunk - 1) / chunk;
    workers = std::max<std::size_t>(1, std::min(workers, nchunks));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= nchunks) return;
            try {
                fn(c * chunk, std::min(chunk, total - c * chunk));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(nchunks);
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    }
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

std::string_view to_string(Scheme s) noexcept {
    switch (s) {
    case Scheme::midpoint: return "midpoint";
    case Scheme::cf4: return "cf4";
    case Scheme::rk4: return "rk4";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
    if (name == "midpoint" || name == "midpoint-exponential") return Scheme::midpoint;
    if (name == "cf4" || name == "commutator-free-4th") return Scheme::cf4;
    if (name == "rk4") return Scheme::rk4;
    return std::nullopt;
}

void PropagationConfig::validate() const {
    std::ostringstream err;
    if (!(dt >= 0.0) || !std::isfinite(dt)) err << "dt must be >= 0 (0 selects tau/1000), got " << dt;
    else if (!(tol_unitary > 0.0)) err << "tol_unitary must be positive, got " << tol_unitary;
    else if (!(tol_observable > 0.0)) err << "tol_observable must be positive, got " << tol_observable;
    else if (!(weight_cutoff >= 0.0 && weight_cutoff < 1.0)) err << "weight_cutoff must lie in [0, 1), got " << weight_cutoff;
    else if (max_refinements < 0) err << "max_refinements must be >= 0";
    else if (workers == 0) err << "workers must be >= 1";
    else if (chunk_columns == 0) err << "chunk_columns must be >= 1";
    else return;
    throw ConfigError(err.str());
}

double TransitionTable::row_sum_defect() const {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < probs.rows(); ++r) worst = std::max(worst, std::abs(probs.row(r).sum() - 1.0));
    return worst;
}

std::pair<std::vector<std::size_t>, double> select_retained(const ThermalEnsemble& ensemble, double weight_cutoff) {
    std::vector<std::size_t> kept;
    double discarded = 0.0;
    for (Eigen::Index n = 0; n < ensemble.weights.size(); ++n) {
        const double p = ensemble.weights(n);
        if (p >= weight_cutoff && p > 0.0) kept.push_back(static_cast<std::size_t>(n));
        else discarded += p;
    }
    return {kept, discarded};
}

std::size_t expm_action(Eigen::Ref<Eigen::MatrixXcd> block, const SparseOperator& h_static,
                        const Eigen::VectorXd& drive_diag, double s, double h, double tol) {
    if (h == 0.0 || block.cols() == 0) return 0;
    const auto [lo, hi] = bounds_with_drive(h_static, drive_diag, s);
    const double centre = 0.5 * (lo + hi);
    const double radius = 0.5 * (hi - lo);
    const cplx global = std::exp(-kI * h * centre);
    if (radius <= 1e-300) {
        block *= global;
        return 0;
    }
    const auto coef = chebyshev_coefficients(h * radius, tol);

    Eigen::MatrixXcd prev = block;                      // T_0 X
    Eigen::MatrixXcd cur(block.rows(), block.cols());  // T_1 X
    apply_scaled(h_static, drive_diag, s, centre, radius, prev, cur);
    Eigen::MatrixXcd acc = coef[0] * prev;
    std::size_t applications = 1;
    if (coef.size() > 1) acc += coef[1] * cur;
    Eigen::MatrixXcd next(block.rows(), block.cols());
    for (std::size_t k = 2; k < coef.size(); ++k) {
        apply_scaled(h_static, drive_diag, s, centre, radius, cur, next);
        ++applications;
        next = 2.0 * next - prev;
        acc += coef[k] * next;
        std::swap(prev, cur);
        std::swap(cur, next);
    }
    block = global * acc;
    return applications;
}

void evolve_block(Eigen::Ref<Eigen::MatrixXcd> block, const SparseOperator& h_static,
                  const Eigen::VectorXd& drive_diag, double tau, std::size_t steps, Scheme scheme,
                  double tol_unitary, std::size_t* applications) {
    if (tau == 0.0 || steps == 0) return;
    const double h = tau / static_cast<double>(steps);
    const double tol_step = std::max(tol_unitary / (2.0 * static_cast<double>(steps)), 1e-17);
    std::size_t used = 0;

    constexpr double kSqrt3 = std::numbers::sqrt3;
    constexpr double a1 = (3.0 - 2.0 * kSqrt3) / 12.0;
    constexpr double a2 = (3.0 + 2.0 * kSqrt3) / 12.0;
    constexpr double c1 = 0.5 - kSqrt3 / 6.0;
    constexpr double c2 = 0.5 + kSqrt3 / 6.0;

    Eigen::MatrixXcd k1, k2, k3, k4, tmp;
    if (scheme == Scheme::rk4) {
        k1.resize(block.rows(), block.cols());
        k2 = k1;
        k3 = k1;
        k4 = k1;
    }

    for (std::size_t i = 0; i < steps; ++i) {
        const double t = h * static_cast<double>(i);
        switch (scheme) {
        case Scheme::midpoint:
            used += expm_action(block, h_static, drive_diag, (t + 0.5 * h) / tau, h, tol_step);
            break;
        case Scheme::cf4: {
            const double s1 = (t + c1 * h) / tau;
            const double s2 = (t + c2 * h) / tau;
            // a1 + a2 = 1/2: each factor is exp(-i (h/2) (H_static + s_eff H_drive)).
            used += expm_action(block, h_static, drive_diag, 2.0 * (a2 * s1 + a1 * s2), 0.5 * h, tol_step);
            used += expm_action(block, h_static, drive_diag, 2.0 * (a1 * s1 + a2 * s2), 0.5 * h, tol_step);
            break;
        }
        case Scheme::rk4: {
            const Eigen::MatrixXcd y = block;
            apply_plain(h_static, drive_diag, t / tau, y, k1);
            k1 *= -kI;
            tmp = y + 0.5 * h * k1;
            apply_plain(h_static, drive_diag, (t + 0.5 * h) / tau, tmp, k2);
            k2 *= -kI;
            tmp = y + 0.5 * h * k2;
            apply_plain(h_static, drive_diag, (t + 0.5 * h) / tau, tmp, k3);
            k3 *= -kI;
            tmp = y + h * k3;
            apply_plain(h_static, drive_diag, (t + h) / tau, tmp, k4);
            k4 *= -kI;
            block = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            used += 4;
            break;
        }
        }
    }
    if (applications) *applications += used;
}

namespace {

Eigen::MatrixXd probabilities_in(const Eigen::MatrixXd& basis, const Eigen::MatrixXcd& vectors) {
    const Eigen::MatrixXd re = basis.transpose() * vectors.real();
    const Eigen::MatrixXd im = basis.transpose() * vectors.imag();
    return re.cwiseAbs2() + im.cwiseAbs2();
}

} // namespace

PropagatedSet propagate(const SpectralDecomposition& initial_spec, const ThermalEnsemble& ensemble0,
                        const DrivenHamiltonian& hamiltonian, const PropagationConfig& cfg,
                        const SpectralDecomposition* final_spec) {
    cfg.validate();
    if (!(hamiltonian.tau >= 0.0)) throw ConfigError("propagate: tau must be >= 0");
    const auto dim = static_cast<Eigen::Index>(initial_spec.dim());
    if (static_cast<std::size_t>(dim) != hamiltonian.h_static.dim() ||
        ensemble0.weights.size() != dim) {
        throw ConfigError("propagate: dimension mismatch between spectrum, ensemble and Hamiltonian");
    }
    if (final_spec && final_spec->dim() != initial_spec.dim()) throw ConfigError("propagate: final spectrum dimension mismatch");

    Eigen::VectorXd drive;
    check_drive(hamiltonian, drive);

    PropagatedSet out;
    std::tie(out.indices, out.discarded_weight) = select_retained(ensemble0, cfg.weight_cutoff);
    const auto kept = static_cast<Eigen::Index>(out.indices.size());

    Eigen::MatrixXcd start(dim, kept);
    for (Eigen::Index r = 0; r < kept; ++r) {
        start.col(r) = initial_spec.eigenvectors.col(static_cast<Eigen::Index>(out.indices[static_cast<std::size_t>(r)]))
                           .cast<std::complex<double>>();
    }

    const double tau = hamiltonian.tau;
    if (tau == 0.0) {
        out.vectors = std::move(start);
        return out;
    }

    const double dt0 = cfg.dt > 0.0 ? cfg.dt : tau / 1000.0;
    std::size_t steps = static_cast<std::size_t>(std::max(1.0, std::ceil(tau / dt0 - 1e-9)));

    auto run = [&](std::size_t nsteps, std::size_t& applications) {
        Eigen::MatrixXcd result = start;
        std::mutex count_mutex;
        parallel_chunks(static_cast<std::size_t>(kept), cfg.chunk_columns, cfg.workers,
                        [&](std::size_t first, std::size_t count) {
                            Eigen::MatrixXcd chunk = result.middleCols(static_cast<Eigen::Index>(first),
                                                                       static_cast<Eigen::Index>(count));
                            std::size_t used = 0;
                            evolve_block(chunk, hamiltonian.h_static, drive, tau, nsteps, cfg.scheme, cfg.tol_unitary,
                                         &used);
                            result.middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)) = chunk;
                            std::lock_guard lock(count_mutex);
                            applications += used;
                        });
        return result;
    };

    auto observable_change = [&](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
        if (kept == 0) return 0.0;
        if (final_spec) {
            return (probabilities_in(final_spec->eigenvectors, a) - probabilities_in(final_spec->eigenvectors, b))
                .cwiseAbs()
                .maxCoeff();
        }
        return 2.0 * (a - b).colwise().norm().maxCoeff();
    };

    std::size_t applications = 0;
    Eigen::MatrixXcd current = run(steps, applications);
    if (cfg.refine) {
        int halvings = 0;
        for (;;) {
            Eigen::MatrixXcd finer = run(2 * steps, applications);
            const double change = observable_change(current, finer);
            steps *= 2;
            ++halvings;
            current = std::move(finer);
            out.stats.observable_change = change;
            if (change < cfg.tol_observable) break;
            if (halvings >= cfg.max_refinements) {
                std::ostringstream err;
                err << "propagate: transition probabilities changed by " << change << " > tol_observable "
                    << cfg.tol_observable << " after " << halvings << " halvings (dt = " << tau / static_cast<double>(steps)
                    << ")";
                throw NumericalError(err.str());
            }
        }
        out.stats.refinements = halvings;
    }

    double drift = 0.0;
    for (Eigen::Index r = 0; r < kept; ++r) drift = std::max(drift, std::abs(current.col(r).norm() - 1.0));
    if (drift > cfg.tol_unitary) {
        std::ostringstream err;
        err << "propagate: norm drift " << drift << " exceeds tol_unitary " << cfg.tol_unitary;
        throw NumericalError(err.str());
    }

    out.vectors = std::move(current);
    out.stats.steps = steps;
    out.stats.final_dt = tau / static_cast<double>(steps);
    out.stats.max_norm_drift = drift;
    out.stats.operator_applications = applications;
    return out;
}

Eigen::MatrixXcd final_amplitudes(const PropagatedSet& prop, const SpectralDecomposition& final_spec) {
    if (prop.vectors.rows() != static_cast<Eigen::Index>(final_spec.dim())) {
        throw ConfigError("final_amplitudes: dimension mismatch");
    }
    const Eigen::MatrixXd re = final_spec.eigenvectors.transpose() * prop.vectors.real();
    const Eigen::MatrixXd im = final_spec.eigenvectors.transpose() * prop.vectors.imag();
    Eigen::MatrixXcd out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

TransitionTable transition_table(const Eigen::MatrixXcd& amplitudes, const PropagatedSet& prop,
                                 const SpectralDecomposition& initial_spec, const SpectralDecomposition& final_spec,
                                 const ThermalEnsemble& ensemble0) {
    if (amplitudes.rows() != static_cast<Eigen::Index>(final_spec.dim()) ||
        amplitudes.cols() != static_cast<Eigen::Index>(prop.indices.size()) ||
        initial_spec.dim() != final_spec.dim()) {
        throw ConfigError("transition_table: dimension mismatch");
    }
    TransitionTable table;
    table.eps0 = initial_spec.eigenvalues;
    table.eps_f = final_spec.eigenvalues;
    table.weights0 = ensemble0.weights;
    table.retained = prop.indices;
    table.discarded_weight = prop.discarded_weight;
    table.probs = amplitudes.cwiseAbs2().transpose();
    return table;
}

TransitionTable transition_matrix(const PropagatedSet& prop, const SpectralDecomposition& initial_spec,
                                  const SpectralDecomposition& final_spec, const ThermalEnsemble& ensemble0) {
    return transition_table(final_amplitudes(prop, final_spec), prop, initial_spec, final_spec, ensemble0);
}

double unitarity_defect(const PropagatedSet& prop) {
    const auto k = prop.vectors.cols();
    if (k == 0) return 0.0;
    Eigen::MatrixXcd g = prop.vectors.adjoint() * prop.vectors;
    g -= Eigen::MatrixXcd::Identity(k, k);
    return g.cwiseAbs().maxCoeff();
}

} // namespace hubwork
