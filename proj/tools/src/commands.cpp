// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include "checks.hpp"

#include <hubwork/errors.hpp>
#include <hubwork/records.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace hubwork::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kJarzynskiAbort = 1e-6;

std::string point_tag(const RunConfig& cfg) {
    return "L" + std::to_string(cfg.params.num_sites) + "_U" + format_number(cfg.params.interaction) + "_tau" +
           format_number(cfg.params.tau);
}

std::string fdr_text(const ThermoRecord& t) {
    return t.fdr ? format_number(*t.fdr) : std::string("undefined (variance ~ 0)");
}

void print_summary(const PointResult& r, std::ostream& out) {
    const auto& t = r.thermo;
    const auto& d = r.diagnostics;
    out << std::setprecision(10);
    out << "L = " << r.num_sites << ", U = " << r.interaction << " J, tau = " << r.tau << " /J, beta = " << r.beta
        << " /J, A = " << r.drive_amplitude << " J\n";
    out << "  <W>                 " << t.mean_work << " J\n";
    out << "  variance            " << t.variance << " J^2\n";
    out << "  skew^3 (raw)        " << t.skew3 << " J^3\n";
    out << "  Delta F             " << t.delta_f << " J\n";
    out << "  <Sigma>             " << t.sigma << "   (<Sigma>/beta = " << t.dissipated_energy << " J)\n";
    out << "  D_eq                " << t.d_eq << "\n";
    out << "  D_adiab             " << t.d_adiab << (t.final_levels_degenerate ? "   [degenerate final levels]" : "")
        << "\n";
    out << "  FDR ratio           " << fdr_text(t) << "\n";
    out << "  linear-response gap " << t.lr_gap << " J\n";
    out << "  Jarzynski residual  " << t.jarzynski_residual << "\n";
    out << "  support " << d.support_size << " lines from " << d.raw_pair_count << " of " << d.pair_count
        << " pairs; steps " << d.steps << " (dt " << d.final_dt << "); min gap " << d.min_gap << " J; "
        << d.wall_seconds << " s\n";
}

/// Invariant failures of a single point, empty when all hold.
std::vector<std::string> point_violations(const PointResult& r) {
    std::vector<std::string> v;
    const auto& t = r.thermo;
    const auto& d = r.diagnostics;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) v.push_back(what);
    };
    need(t.jarzynski_residual <= kJarzynskiAbort, "Jarzynski residual " + format_number(t.jarzynski_residual) + " > 1e-6");
    need(d.normalization_defect <= 1e-9, "sum P(W) deviates from 1 by " + format_number(d.normalization_defect));
    need(d.row_sum_defect <= 1e-9, "transition rows deviate from 1 by " + format_number(d.row_sum_defect));
    need(t.sigma >= -1e-9, "negative entropy production " + format_number(t.sigma));
    need(t.d_eq >= 0.0 && t.d_eq <= 1.0 + 1e-12, "D_eq outside [0, 1]");
    need(t.d_adiab >= 0.0 && t.d_adiab <= 1.0 + 1e-12, "D_adiab outside [0, 1]");
    return v;
}

PointResult compute_point(const RunConfig& cfg) {
    cfg.validate();
    PointOptions opt = cfg.point;
    return run_single(cfg.params, opt);
}

} // namespace

int cmd_single(const RunConfig& cfg, std::ostream& out) {
    const PointResult r = compute_point(cfg);
    const fs::path dir = cfg.out;
    fs::create_directories(dir);
    const std::string tag = point_tag(cfg);
    write_distribution_csv(dir / ("dist_" + tag + ".csv"), r.distribution);
    write_records_csv(dir / ("record_" + tag + ".csv"), {r});
    write_text_file(dir / ("point_" + tag + ".json"), point_json(r, false) + "\n");
    if (cfg.verbosity > 0) print_summary(r, out);
    const auto bad = point_violations(r);
    if (!bad.empty()) {
        out << "invariant failure:\n";
        for (const auto& b : bad) out << "  " << b << "\n";
        out << point_json(r, false) << "\n";
        return kInvariantFailure;
    }
    return kOk;
}

int cmd_dist(const RunConfig& cfg, double smooth_width, std::ostream& out) {
    const PointResult r = compute_point(cfg);
    const fs::path dir = cfg.out;
    fs::create_directories(dir);
    const fs::path stems = dir / ("dist_" + point_tag(cfg) + ".csv");
    write_distribution_csv(stems, r.distribution);
    if (cfg.verbosity > 0) out << "wrote " << stems.string() << " (" << r.distribution.size() << " stems)\n";
    if (smooth_width > 0.0) {
        const fs::path smooth = dir / ("dist_" + point_tag(cfg) + "_smooth.csv");
        write_smoothed_csv(smooth, smooth_distribution(r.distribution, smooth_width));
        if (cfg.verbosity > 0) out << "wrote " << smooth.string() << " (plotting only)\n";
    }
    if (r.thermo.jarzynski_residual > kJarzynskiAbort) {
        out << "invariant failure: Jarzynski residual " << r.thermo.jarzynski_residual << "\n";
        return kInvariantFailure;
    }
    return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    SweepOptions opt;
    opt.point = cfg.point;
    opt.workers = cfg.workers;
    opt.config_echo = to_json(cfg, -1);
    if (cfg.verbosity >= 2) {
        opt.progress = [&out](const PointResult& r, std::size_t done, std::size_t total) {
            out << "[" << done << "/" << total << "] L=" << r.num_sites << " U=" << r.interaction << " tau=" << r.tau
                << (r.ok() ? "" : "  FAILED: " + *r.error) << "\n"
                << std::flush;
        };
    }
    const SweepManifest m = run_sweep(cfg.grid, opt, cfg.out);
    if (cfg.verbosity > 0) {
        out << "sweep: " << m.results.size() << " points, " << m.failures << " failed; output in " << cfg.out << "\n";
        static const std::vector<std::string> summary = {"mean_work_J", "variance_J2", "skew3_J3", "sigma",
                                                         "d_eq",        "d_adiab",     "fdr_ratio"};
        for (int L : cfg.grid.num_sites) {
            const auto taus = cfg.grid.taus_for(L);
            const double tau = *std::max_element(taus.begin(), taus.end());
            out << "extrema over U at L = " << L << ", tau = " << tau << " /J:\n";
            for (const auto& q : summary) {
                const Heatmap h = extract_heatmap(m.results, q, L);
                const auto it = std::find(h.taus.begin(), h.taus.end(), tau) - h.taus.begin();
                std::vector<double> x, y;
                for (std::size_t iu = 0; iu < h.interactions.size(); ++iu) {
                    const double v = h.values(it, static_cast<Eigen::Index>(iu));
                    if (std::isnan(v)) continue;
                    x.push_back(h.interactions[iu]);
                    y.push_back(v);
                }
                out << "  " << std::left << std::setw(12) << q << std::right;
                if (x.size() < 3) {
                    out << " (fewer than 3 points)\n";
                    continue;
                }
                const Extrema e = locate_extrema(x, y);
                if (auto mn = e.deepest_minimum()) out << " min at U=" << mn->location << " (" << mn->value << ")";
                if (auto mx = e.highest_maximum()) out << " max at U=" << mx->location << " (" << mx->value << ")";
                for (const auto& z : e.zero_crossings) out << " zero at U=" << z.location << (z.direction > 0 ? " (-/+)" : " (+/-)");
                if (e.minima.empty() && e.maxima.empty() && e.zero_crossings.empty()) out << " monotone";
                out << "\n";
            }
        }
    }
    return m.failures > 0 ? kPartialSweepFailure : kOk;
}

int cmd_heatmap(const RunConfig& cfg, const std::string& sweep, const std::string& quantity, std::ostream& out) {
    if (cfg.out.empty()) throw ConfigError("out must name an output directory");
    const Heatmap h = extract_heatmap(sweep, quantity, cfg.params.num_sites);
    const fs::path dir = cfg.out;
    fs::create_directories(dir);
    const std::string stem = "heatmap_" + h.quantity + "_L" + std::to_string(h.num_sites);
    write_heatmap_csv(h, dir / (stem + ".csv"));
    write_heatmap_svg(h, dir / (stem + ".svg"));
    if (cfg.verbosity > 0) {
        out << "wrote " << (dir / (stem + ".csv")).string() << " and .svg (" << h.taus.size() << " x "
            << h.interactions.size() << ", " << h.missing << " missing)\n";
    }
    return kOk;
}

int cmd_check(const std::string& level, const RunConfig& cfg, std::ostream& out) {
    if (level != "quick" && level != "full") throw ConfigError("check level must be 'quick' or 'full', got '" + level + "'");
    const auto results = run_checks(level == "full", cfg.point.propagation);
    std::optional<std::string> first_failure;
    for (const auto& c : results) {
        out << (c.passed ? "ok   " : "FAIL ") << c.name << "  " << c.detail << "\n";
        if (!c.passed && !first_failure) first_failure = c.name;
    }
    if (first_failure) {
        out << "first failing invariant: " << *first_failure << "\n";
        return kInvariantFailure;
    }
    out << results.size() << " checks passed\n";
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"hubwork: work statistics of driven Hubbard chains (energies in J, times in 1/J)"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "hubwork 0.1.0");

    std::string config_path;
    std::map<std::string, std::string> overrides;
    std::string sweep_path;
    std::string quantity = "skew3_J3";
    std::string level = "quick";
    double smooth = 0.0;
    std::string dump_format;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "configuration file (JSON or key = value)");
        for (const auto& key : config_keys()) {
            sub->add_option_function<std::string>(
                "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; }, "config key " + key);
        }
        sub->add_option("--dump-config", dump_format, "print the effective configuration (json|kv) and exit")
            ->check(CLI::IsMember({"json", "kv"}));
    };
    auto* single = app.add_subcommand("single", "one (L, U, tau) point: distribution, thermodynamics, diagnostics");
    auto* sweep = app.add_subcommand("sweep", "grid sweep with records.csv, per-point distributions and manifest.json");
    auto* dist = app.add_subcommand("dist", "export the work distribution of one point");
    auto* heatmap = app.add_subcommand("heatmap", "heatmap CSV + SVG of one quantity from a finished sweep");
    auto* check = app.add_subcommand("check", "invariant self-check suite");
    for (auto* s : {single, sweep, dist, heatmap, check}) add_common(s);
    dist->add_option("--smooth", smooth, "Gaussian kernel width (J) for an additional smoothed curve; plotting only");
    heatmap->add_option("--sweep", sweep_path, "sweep directory, manifest.json or records.csv")->required();
    heatmap->add_option("--quantity", quantity, "records.csv column (or alias such as skew3, fdr)");
    check->add_option("level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path, cfg);
        for (const auto& key : config_keys()) {
            if (auto it = overrides.find(key); it != overrides.end()) set_value(cfg, key, it->second);
        }
        if (!dump_format.empty()) {
            out << (dump_format == "json" ? to_json(cfg) + "\n" : to_key_value_text(cfg));
            return kOk;
        }
        if (*single) return cmd_single(cfg, out);
        if (*sweep) return cmd_sweep(cfg, out);
        if (*dist) return cmd_dist(cfg, smooth, out);
        if (*heatmap) return cmd_heatmap(cfg, sweep_path, quantity, out);
        if (*check) return cmd_check(level, cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kInvariantFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInvariantFailure;
    }
    return kConfigError;
}

} // namespace hubwork::cli
