// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
// Usage: hubwork_acceptance [--only N]... [--skip N]...

#include "oracle.hpp"

#include <hubwork/experiment.hpp>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace hubwork;

constexpr double kBeta = 0.4;
constexpr double kDrive = 10.0;

constexpr double kTolJarzynski = 1e-8;
constexpr double kTolEntropyIdentity = 1e-8;
constexpr double kTolOracle = 1e-6;
constexpr double kTolUnitarity = 1e-9;
constexpr double kFlatnessRatio = 0.5;
constexpr double kMottSpreadRatio = 0.2;
constexpr double kTolAdiabatic = 1e-2;

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    std::function<Outcome()> run;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("hubwork_acceptance_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<double> u_scan(double step) {
    std::vector<double> u;
    const int n = static_cast<int>(std::lround(12.0 / step));
    for (int i = 0; i <= n; ++i) u.push_back(i * step);
    return u;
}

SweepGrid grid_for(std::vector<int> sites, std::vector<double> us, std::vector<double> taus) {
    SweepGrid g;
    g.num_sites = std::move(sites);
    g.interactions = std::move(us);
    g.taus = std::move(taus);
    g.beta = kBeta;
    g.drive_amplitude = kDrive;
    g.dense_large_chains = true;
    return g;
}

std::vector<PointResult> sweep(const SweepGrid& grid, const std::string& name, std::size_t workers = 1) {
    SweepOptions opt;
    opt.workers = workers;
    auto m = run_sweep(grid, opt, scratch(name));
    for (const auto& r : m.results) {
        if (!r.ok()) throw std::runtime_error("point L=" + std::to_string(r.num_sites) + " U=" + fmt(r.interaction) +
                                             " tau=" + fmt(r.tau) + " failed: " + *r.error);
    }
    return m.results;
}

// Values at fixed L and tau, in ascending U.
std::vector<const PointResult*> slice(const std::vector<PointResult>& rs, int L, double tau) {
    std::vector<const PointResult*> out;
    for (const auto& r : rs)
        if (r.num_sites == L && r.tau == tau) out.push_back(&r);
    std::sort(out.begin(), out.end(), [](auto a, auto b) { return a->interaction < b->interaction; });
    return out;
}

// Sign changes of a sequence, ignoring exact zeros: (index after the change, +1 for - to +, -1 for + to -).
std::vector<std::pair<std::size_t, int>> sign_changes(const std::vector<double>& v) {
    std::vector<std::pair<std::size_t, int>> out;
    int last = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const int s = v[i] > 0.0 ? 1 : (v[i] < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) out.emplace_back(i, s);
        last = s;
    }
    return out;
}

// Location of the extremum of v over x, refined by a parabola through the neighbours.
double extremum_location(const std::vector<double>& x, const std::vector<double>& v, bool maximum) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (maximum ? v[i] > v[k] : v[i] < v[k]) k = i;
    if (k == 0 || k + 1 == v.size()) return x[k];
    const double h = x[k + 1] - x[k];
    const double denom = v[k - 1] - 2.0 * v[k] + v[k + 1];
    if (denom == 0.0) return x[k];
    return x[k] + 0.5 * h * (v[k - 1] - v[k + 1]) / denom;
}

// 1. Jarzynski identity on the 5 x 5 grid at L = 4.
const std::vector<double> kGridU{0.0, 1.0, 5.0, 8.0, 10.0};
const std::vector<double> kGridTau{0.0, 0.5, 1.0, 2.5, 10.0};

std::vector<PointResult>& identity_grid() {
    static std::vector<PointResult> rs = sweep(grid_for({4}, kGridU, kGridTau), "grid");
    return rs;
}

Outcome jarzynski() {
    double worst = 0.0;
    for (const auto& r : identity_grid())
        worst = std::max(worst, jarzynski_residual(r.distribution, r.beta, r.thermo.delta_f));
    return {worst < kTolJarzynski, "max |<exp(-bW)> exp(bF) - 1| = " + fmt(worst) + " over 25 points (tol " +
                                       fmt(kTolJarzynski) + ")"};
}

// 2. <Sigma> from density matrices vs beta (<W> - Delta F) from P(W).
Outcome entropy_identity() {
    double worst = 0.0;
    for (const auto& r : identity_grid()) {
        const double from_work = r.beta * (mean(r.distribution) - r.thermo.delta_f);
        worst = std::max(worst, std::abs(r.thermo.sigma - from_work));
    }
    return {worst < kTolEntropyIdentity,
            "max |<Sigma> - b(<W> - dF)| = " + fmt(worst) + " over 25 points (tol " + fmt(kTolEntropyIdentity) + ")"};
}

// 3. Brute-force equivalence at L = 2.
Outcome oracle_equivalence() {
    double worst = 0.0;
    std::size_t lines = 0;
    for (double U : {3.0, 7.0}) {
        for (double tau : {0.0, 1.0, 2.5}) {
            HubbardParams p;
            p.num_sites = 2;
            p.interaction = U;
            p.tau = tau;
            p.beta = kBeta;
            p.drive_amplitude = kDrive;
            const PointResult lib = run_single(p, {});
            const oracle::Result ref = oracle::evaluate(2, 1.0, U, kDrive, kBeta, tau);
            if (has_degenerate_levels(SpectralDecomposition{ref.ef, {}}))
                return {false, "final levels degenerate at U=" + fmt(U)};

            // Every (n, m) line: rebuild the library's per-pair table.
            const auto basis = half_filled_sector(2);
            const auto ham = build_driven(basis, p);
            const auto s0 = decompose(ham.initial());
            const auto sf = decompose(ham.final());
            const auto e0 = gibbs_weights(s0, kBeta);
            const auto prop = propagate(s0, e0, ham, {}, &sf);
            const auto table = transition_matrix(prop, s0, sf, e0);
            std::vector<std::pair<double, double>> a, b;
            for (std::size_t r = 0; r < table.retained.size(); ++r) {
                const auto n = static_cast<Eigen::Index>(table.retained[r]);
                for (Eigen::Index m = 0; m < table.eps_f.size(); ++m)
                    a.emplace_back(table.eps_f(m) - table.eps0(n),
                                   table.weights0(n) * table.probs(static_cast<Eigen::Index>(r), m));
            }
            for (const auto& l : ref.lines) b.emplace_back(l.work, l.prob);
            if (a.size() != 16 || b.size() != 16) return {false, "expected 16 lines, got " + std::to_string(a.size())};
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            for (std::size_t i = 0; i < a.size(); ++i) {
                worst = std::max(worst, std::abs(a[i].first - b[i].first));
                worst = std::max(worst, std::abs(a[i].second - b[i].second));
            }
            lines += a.size();
            const auto& t = lib.thermo;
            for (double d : {t.mean_work - ref.mean, t.variance - ref.var, t.skew3 - ref.skew3,
                             t.delta_f - ref.delta_f, t.sigma - ref.sigma, t.d_eq - ref.d_eq, t.d_adiab - ref.d_adiab})
                worst = std::max(worst, std::abs(d));
        }
    }
    return {worst < kTolOracle, "max deviation " + fmt(worst) + " over " + std::to_string(lines) +
                                    " lines plus moments, <Sigma>, D_eq, D_adiab (tol " + fmt(kTolOracle) + ")"};
}

// 4. Unitarity and normalization at L = 2, 4, 6.
Outcome unitarity_suite() {
    double rows = 0.0, norm = 0.0, purity = 0.0, invariance = 0.0;
    for (int L : {2, 4, 6}) {
        HubbardParams p;
        p.num_sites = L;
        p.interaction = 5.0;
        p.tau = L == 6 ? 1.0 : 2.5;
        p.beta = kBeta;
        p.drive_amplitude = kDrive;
        const auto basis = half_filled_sector(L);
        const auto ham = build_driven(basis, p);
        const auto s0 = decompose(ham.initial());
        const auto sf = decompose(ham.final());
        const auto e0 = gibbs_weights(s0, kBeta);
        const auto prop = propagate(s0, e0, ham, {}, &sf);
        const auto table = transition_matrix(prop, s0, sf, e0);
        const auto dist = build_distribution(table);
        rows = std::max(rows, table.row_sum_defect());

        double mass = table.discarded_weight;
        for (std::size_t r = 0; r < table.retained.size(); ++r)
            mass += table.weights0(static_cast<Eigen::Index>(table.retained[r])) *
                    table.probs.row(static_cast<Eigen::Index>(r)).sum();
        norm = std::max({norm, std::abs(mass - 1.0), std::abs(dist.total() - 1.0)});

        const auto rho = evolved_state(prop, e0);
        purity = std::max(purity, std::abs(rho.purity() - e0.weights.squaredNorm()));

        const auto eq = gibbs_state(sf, kBeta, Frame::occupation);
        const double d = trace_distance(rho, eq);
        const double d_eigen = trace_distance(to_eigenbasis(rho, sf), to_eigenbasis(eq, sf));
        std::mt19937 rng(static_cast<std::uint32_t>(L));
        std::normal_distribution<double> g;
        Eigen::MatrixXcd z(rho.dim(), rho.dim());
        for (Eigen::Index i = 0; i < z.rows(); ++i)
            for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = {g(rng), g(rng)};
        const Eigen::MatrixXcd w = Eigen::HouseholderQR<Eigen::MatrixXcd>(z).householderQ();
        DensityMatrix a = rho, b = eq;
        a.matrix = w * rho.matrix * w.adjoint();
        b.matrix = w * eq.matrix * w.adjoint();
        invariance = std::max({invariance, std::abs(d - d_eigen), std::abs(d - trace_distance(a, b))});
    }
    const bool ok = rows < kTolUnitarity && norm < kTolUnitarity && purity < kTolUnitarity && invariance < kTolUnitarity;
    return {ok, "row sums " + fmt(rows) + ", sum P(W) " + fmt(norm) + ", purity " + fmt(purity) +
                    ", trace-distance invariance " + fmt(invariance) + " (tol " + fmt(kTolUnitarity) + ")"};
}

// Shared L = 4 scan over U in steps of 0.25 at tau = 0 and tau = 10.
const std::vector<double> kScanU = u_scan(0.25);

std::vector<PointResult>& u_scan_results() {
    static std::vector<PointResult> rs = sweep(grid_for({4}, kScanU, {0.0, 10.0}), "scan");
    return rs;
}

std::vector<double> series(const std::vector<const PointResult*>& s, double ThermoRecord::*field) {
    std::vector<double> v;
    for (const auto* r : s) v.push_back(r->thermo.*field);
    return v;
}

// 5. One negative-to-positive sign change of the third moment, bracketed by a minimum and a maximum.
Outcome skew_sign_change() {
    const auto v = series(slice(u_scan_results(), 4, 10.0), &ThermoRecord::skew3);
    const auto changes = sign_changes(v);
    std::string desc = std::to_string(changes.size()) + " sign change(s)";
    for (const auto& [i, dir] : changes)
        desc += std::string(dir > 0 ? " -/+" : " +/-") + " near U=" + fmt(0.5 * (kScanU[i - 1] + kScanU[i]));
    const auto imax = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    const auto imin = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
    desc += "; max " + fmt(v[imax]) + " at U=" + fmt(kScanU[imax]) + ", min " + fmt(v[imin]) + " at U=" + fmt(kScanU[imin]);
    bool ok = changes.size() == 1 && changes[0].second > 0;
    if (ok) {
        const std::size_t c = changes[0].first;
        ok = imin < c && imax >= c && imin > 0 && imax + 1 < v.size();
    }
    return {ok, desc};
}

// 6. Sudden-quench third moment is small relative to the slow drive.
Outcome sudden_flatness() {
    const auto fast = series(slice(u_scan_results(), 4, 0.0), &ThermoRecord::skew3);
    const auto slow = series(slice(u_scan_results(), 4, 10.0), &ThermoRecord::skew3);
    auto absmax = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    const double ratio = absmax(fast) / absmax(slow);
    return {ratio < kFlatnessRatio, "max|skew3(tau=0)| / max|skew3(tau=10)| = " + fmt(ratio) + " (limit " +
                                        fmt(kFlatnessRatio) + ")"};
}

// 7. tau-insensitivity deep in the Mott regime.
Outcome mott_insensitivity() {
    const std::vector<double> taus{0.5, 1.0, 2.5, 5.0, 10.0};
    const auto rs = sweep(grid_for({4}, {0.0, 10.0}, taus), "mott");
    // Spread across tau is the range max - min; the criterion compares U = 10 to U = 0.
    // The range normalized by mean |value| is reported too; it is ill-conditioned when a moment crosses zero.
    auto values = [&](double U, double ThermoRecord::*field) {
        std::vector<double> v;
        for (const auto& r : rs)
            if (r.interaction == U) v.push_back(r.thermo.*field);
        return v;
    };
    auto range = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *hi - *lo;
    };
    auto normalized = [&](const std::vector<double>& v) {
        double scale = 0.0;
        for (double x : v) scale += std::abs(x);
        return range(v) * static_cast<double>(v.size()) / scale;
    };
    bool ok = true;
    std::string desc, alt;
    const std::pair<const char*, double ThermoRecord::*> moments[] = {
        {"mean", &ThermoRecord::mean_work}, {"var", &ThermoRecord::variance}, {"skew3", &ThermoRecord::skew3}};
    for (const auto& [name, field] : moments) {
        const auto mott = values(10.0, field), metal = values(0.0, field);
        const double ratio = range(mott) / range(metal);
        ok = ok && ratio <= kMottSpreadRatio;
        desc += std::string(desc.empty() ? "" : ", ") + name + " " + fmt(ratio);
        alt += std::string(alt.empty() ? "" : ", ") + name + " " + fmt(normalized(mott) / normalized(metal));
    }
    return {ok, "tau-range U=10 / U=0: " + desc + " (limit " + fmt(kMottSpreadRatio) + "); mean-normalized: " + alt};
}

// 8. Fluctuation-dissipation ratio crosses 1 once, from below.
Outcome fdr_reversal() {
    const auto s = slice(u_scan_results(), 4, 10.0);
    std::vector<double> v;
    for (const auto* r : s) {
        if (!r->thermo.fdr) return {false, "ratio undefined at U=" + fmt(r->interaction)};
        v.push_back(*r->thermo.fdr - 1.0);
    }
    const auto changes = sign_changes(v);
    std::string desc = "ratio " + fmt(v.front() + 1.0) + " at U=0, " + fmt(v.back() + 1.0) + " at U=12, " +
                       std::to_string(changes.size()) + " crossing(s)";
    for (const auto& [i, dir] : changes) desc += " near U=" + fmt(0.5 * (kScanU[i - 1] + kScanU[i]));
    const bool ok = v.front() < 0.0 && v.back() > 0.0 && changes.size() == 1;
    return {ok, desc};
}

// 9. Extrema drift toward small U with growing L.
Outcome finite_size_drift() {
    std::vector<double> us;
    for (int i = 0; i < 12; ++i) us.push_back(static_cast<double>(i));
    const auto rs = sweep(grid_for({4, 6, 8}, us, {10.0}), "finite_size");
    std::vector<double> sig_max, skew_max, skew_min;
    std::string desc;
    for (int L : {4, 6, 8}) {
        const auto s = slice(rs, L, 10.0);
        sig_max.push_back(extremum_location(us, series(s, &ThermoRecord::sigma), true));
        skew_max.push_back(extremum_location(us, series(s, &ThermoRecord::skew3), true));
        skew_min.push_back(extremum_location(us, series(s, &ThermoRecord::skew3), false));
        desc += (desc.empty() ? "L=" : "; L=") + std::to_string(L) + ": argmax Sigma " + fmt(sig_max.back()) +
                ", argmax skew3 " + fmt(skew_max.back()) + ", argmin skew3 " + fmt(skew_min.back());
    }
    auto decreasing = [](const std::vector<double>& v) { return v[0] > v[1] && v[1] > v[2]; };
    return {decreasing(sig_max) && decreasing(skew_max) && decreasing(skew_min), desc};
}

// 10. Slow-drive limit follows the rank-transported state.
Outcome adiabatic_limit() {
    double worst = 0.0;
    for (double U : {1.0, 5.0, 10.0}) {
        HubbardParams p;
        p.num_sites = 2;
        p.interaction = U;
        p.tau = 1000.0;
        p.beta = kBeta;
        p.drive_amplitude = kDrive;
        const auto r = run_single(p, {});
        if (!r.ok()) return {false, *r.error};
        worst = std::max(worst, r.thermo.d_adiab);
    }
    return {worst < kTolAdiabatic, "max D(rho_tau, rho_adiab) = " + fmt(worst) + " at tau=1000, U in {1,5,10} (limit " +
                                       fmt(kTolAdiabatic) + ")"};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 11. Bitwise-identical sweep output with 1 and 8 workers.
Outcome determinism() {
    const auto grid = grid_for({4}, kScanU, {10.0});
    std::vector<std::string> bodies;
    std::vector<std::filesystem::path> dirs;
    for (std::size_t w : {1, 8}) {
        SweepOptions opt;
        opt.workers = w;
        const auto dir = scratch("determinism_" + std::to_string(w));
        const auto m = run_sweep(grid, opt, dir);
        if (m.failures != 0) return {false, std::to_string(m.failures) + " failed points"};
        bodies.push_back(read_file(dir / m.records.path));
        dirs.push_back(dir);
        for (const auto& d : m.distributions) bodies.back() += read_file(dir / d.path);
    }
    const bool ok = !bodies[0].empty() && bodies[0] == bodies[1];
    return {ok, "records.csv and " + std::to_string(kScanU.size()) + " distribution files " +
                    (ok ? "identical" : "differ") + " between 1 and 8 workers"};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hubwork acceptance suite"};
    std::vector<int> only, skip;
    app.add_option("--only", only, "Run only these criteria");
    app.add_option("--skip", skip, "Skip these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all{
        {1, "Jarzynski identity", jarzynski},
        {2, "entropy production identity", entropy_identity},
        {3, "brute-force equivalence at L=2", oracle_equivalence},
        {4, "unitarity and normalization", unitarity_suite},
        {5, "third-moment sign change", skew_sign_change},
        {6, "sudden-quench flatness", sudden_flatness},
        {7, "Mott-regime tau insensitivity", mott_insensitivity},
        {8, "fluctuation-dissipation reversal", fdr_reversal},
        {9, "finite-size drift of extrema", finite_size_drift},
        {10, "adiabatic limit", adiabatic_limit},
        {11, "sweep determinism", determinism},
    };
    const std::set<int> only_set(only.begin(), only.end()), skip_set(skip.begin(), skip.end());

    int failed = 0;
    for (const auto& c : all) {
        if ((!only_set.empty() && !only_set.count(c.id)) || skip_set.count(c.id)) {
            std::cout << "SKIP " << c.id << " " << c.title << std::endl;
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.passed ? "PASS " : "FAIL ") << c.id << " " << c.title << ": " << o.detail << " ["
                  << fmt(secs) << " s]" << std::endl;
        if (!o.passed) ++failed;
    }
    std::cout << (failed == 0 ? "all selected criteria passed" : std::to_string(failed) + " criterion/criteria failed")
              << std::endl;
    return failed == 0 ? 0 : 1;
}
