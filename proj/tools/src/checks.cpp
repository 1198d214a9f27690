// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "checks.hpp"

#include <hubwork/experiment.hpp>
#include <hubwork/records.hpp>

#include <cmath>
#include <functional>

namespace hubwork::cli {

namespace {

struct Point {
    SpectralDecomposition spec0, spec_f;
    ThermalEnsemble ens0;
    PropagatedSet prop;
    TransitionTable table;
    WorkDistribution dist;
    DensityMatrix rho;
    double delta_f = 0.0;
    double sigma = 0.0;
    SparseOperator h_final;
};

Point evaluate(int L, double U, double tau, const PropagationConfig& cfg) {
    HubbardParams p;
    p.num_sites = L;
    p.interaction = U;
    p.tau = tau;
    const auto basis = half_filled_sector(L);
    const auto ham = build_driven(basis, p);
    Point pt;
    pt.h_final = ham.final();
    pt.spec0 = decompose(ham.initial());
    pt.spec_f = decompose(pt.h_final);
    pt.ens0 = gibbs_weights(pt.spec0, p.beta);
    pt.prop = propagate(pt.spec0, pt.ens0, ham, cfg, &pt.spec_f);
    const auto amp = final_amplitudes(pt.prop, pt.spec_f);
    pt.table = transition_table(amp, pt.prop, pt.spec0, pt.spec_f, pt.ens0);
    pt.dist = build_distribution(pt.table);
    pt.rho = evolved_state(amp, pt.prop, pt.ens0, Frame::final_eigenbasis);
    pt.delta_f = free_energy_difference(pt.spec0, pt.spec_f, p.beta);
    pt.sigma = entropy_production(pt.rho, pt.ens0, pt.spec_f, p.beta);
    return pt;
}

/// Dense fixed-step RK4 propagator for a small sector; independent of the library integrators.
Eigen::MatrixXcd dense_rk4(const Eigen::MatrixXd& h0, const Eigen::MatrixXd& hd, double tau, double dt) {
    const auto n = h0.rows();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
    const auto steps = static_cast<long>(std::ceil(tau / dt - 1e-9));
    const double h = tau / static_cast<double>(steps);
    const std::complex<double> mi(0.0, -1.0);
    auto f = [&](double t, const Eigen::MatrixXcd& y) -> Eigen::MatrixXcd {
        return mi * ((h0 + (t / tau) * hd).cast<std::complex<double>>() * y);
    };
    for (long i = 0; i < steps; ++i) {
        const double t = h * static_cast<double>(i);
        const Eigen::MatrixXcd k1 = f(t, u);
        const Eigen::MatrixXcd k2 = f(t + h / 2, u + h / 2 * k1);
        const Eigen::MatrixXcd k3 = f(t + h / 2, u + h / 2 * k2);
        const Eigen::MatrixXcd k4 = f(t + h, u + h * k3);
        u += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return u;
}

CheckResult bound(const std::string& name, double value, double tol) {
    return {name, std::isfinite(value) && value <= tol, format_number(value) + " <= " + format_number(tol)};
}

} // namespace

std::vector<CheckResult> run_checks(bool full, const PropagationConfig& cfg) {
    std::vector<CheckResult> out;
    auto guarded = [&](const std::string& name, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };

    guarded("sector dimensions", [&] {
        const bool ok = half_filled_sector(2).size() == 4 && half_filled_sector(4).size() == 36 &&
                        half_filled_sector(6).size() == 400;
        out.push_back({"sector dimensions", ok, "4, 36, 400"});
    });

    guarded("hopping symmetry", [&] {
        HubbardParams p;
        p.num_sites = 4;
        p.interaction = 3.0;
        out.push_back(bound("hopping symmetry", build_static(half_filled_sector(4), p).symmetry_defect(), 0.0));
    });

    guarded("dimer spectrum", [&] {
        double worst = 0.0;
        for (double U : {0.0, 3.0, 10.0}) {
            HubbardParams p;
            p.num_sites = 2;
            p.interaction = U;
            const auto ev = decompose(build_static(half_filled_sector(2), p)).eigenvalues;
            const double r = std::sqrt(U * U + 16.0);
            std::vector<double> ref{0.5 * (U - r), 0.0, U, 0.5 * (U + r)};
            std::sort(ref.begin(), ref.end());
            for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(ev(i) - ref[static_cast<std::size_t>(i)]));
        }
        out.push_back(bound("dimer spectrum", worst, 1e-12));
    });

    guarded("free-fermion spectrum L=4", [&] {
        HubbardParams p;
        p.num_sites = 4;
        const auto ev = decompose(build_static(half_filled_sector(4), p)).eigenvalues;
        std::vector<double> eps, pair;
        for (int k = 1; k <= 4; ++k) eps.push_back(-2.0 * std::cos(k * M_PI / 5.0));
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) pair.push_back(eps[static_cast<std::size_t>(a)] + eps[static_cast<std::size_t>(b)]);
        std::vector<double> ref;
        for (double x : pair)
            for (double y : pair) ref.push_back(x + y);
        std::sort(ref.begin(), ref.end());
        double worst = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(ev(static_cast<Eigen::Index>(i)) - ref[i]));
        out.push_back(bound("free-fermion spectrum L=4", worst, 1e-11));
    });

    guarded("dimer transitions vs dense RK4", [&] {
        HubbardParams p;
        p.num_sites = 2;
        p.interaction = 1.0;
        p.tau = 1.0;
        const auto basis = half_filled_sector(2);
        const auto ham = build_driven(basis, p);
        const Point pt = evaluate(2, 1.0, 1.0, cfg);
        const Eigen::MatrixXcd u = dense_rk4(ham.h_static.to_dense(), ham.h_drive.to_dense(), 1.0, 1e-4);
        const Eigen::MatrixXcd vf = pt.spec_f.eigenvectors.cast<std::complex<double>>();
        const Eigen::MatrixXcd v0 = pt.spec0.eigenvectors.cast<std::complex<double>>();
        const Eigen::MatrixXd ref = (vf.adjoint() * u * v0).cwiseAbs2().transpose();
        out.push_back(bound("dimer transitions vs dense RK4", (ref - pt.table.probs).cwiseAbs().maxCoeff(), 1e-7));
    });

    auto identities = [&](int L, const std::vector<double>& us, const std::vector<double>& taus) {
        const std::string suffix = " L=" + std::to_string(L);
        double jar = 0, sig = 0, norm = 0, rows = 0, purity = 0, meanx = 0, neg = 0;
        for (double U : us) {
            for (double tau : taus) {
                const Point pt = evaluate(L, U, tau, cfg);
                jar = std::max(jar, jarzynski_residual(pt.dist, 0.4, pt.delta_f));
                sig = std::max(sig, std::abs(pt.sigma - 0.4 * (mean(pt.dist) - pt.delta_f)));
                norm = std::max(norm, std::abs(pt.dist.total() - 1.0));
                rows = std::max(rows, pt.table.row_sum_defect());
                purity = std::max(purity, std::abs(pt.rho.purity() - pt.ens0.weights.squaredNorm()));
                const auto mc = mean_energy_crosscheck(pt.table, pt.prop, pt.h_final);
                meanx = std::max(meanx, std::abs(mc.tpm_mean - mc.unitary_mean) / std::max(1.0, std::abs(mc.tpm_mean)));
                neg = std::max(neg, -pt.sigma);
            }
        }
        out.push_back(bound("Jarzynski identity" + suffix, jar, 1e-8));
        out.push_back(bound("entropy identity" + suffix, sig, 1e-8));
        out.push_back(bound("P(W) normalization" + suffix, norm, 1e-9));
        out.push_back(bound("row stochasticity" + suffix, rows, 1e-9));
        out.push_back(bound("purity conservation" + suffix, purity, 1e-9));
        out.push_back(bound("mean-work cross-check" + suffix, meanx, 1e-8));
        out.push_back(bound("entropy production >= 0" + suffix, neg, 1e-9));
    };
    guarded("identities L=2", [&] { identities(2, {0.0, 5.0}, {0.0, 1.0, 10.0}); });
    guarded("identities L=4", [&] { identities(4, {0.0, 5.0, 10.0}, {0.0, 1.0, 2.5}); });

    guarded("tau -> 0+ continuity L=4", [&] {
        const Point a = evaluate(4, 4.0, 0.0, cfg);
        const Point b = evaluate(4, 4.0, 1e-3, cfg);
        out.push_back(bound("tau -> 0+ continuity L=4", (a.table.probs - b.table.probs).cwiseAbs().maxCoeff(), 1e-3));
    });

    if (full) {
        guarded("identities L=6", [&] { identities(6, {5.0}, {0.0, 1.0}); });
        guarded("adiabatic limit L=2", [&] {
            const Point pt = evaluate(2, 2.0, 1e3, cfg);
            const auto ad = adiabatic_reference(pt.ens0, pt.spec_f, Frame::final_eigenbasis);
            out.push_back(bound("adiabatic limit L=2", trace_distance(pt.rho, ad), 1e-2));
        });
    }
    return out;
}

} // namespace hubwork::cli
