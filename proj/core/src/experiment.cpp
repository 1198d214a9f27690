// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "hubwork/experiment.hpp"

#include "hubwork/errors.hpp"
#include "hubwork/records.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace hubwork {

namespace fs = std::filesystem;

SparseOperator SectorModel::static_hamiltonian(double interaction) const {
    std::vector<Triplet> entries = hopping_op.triplets();
    if (interaction != 0.0) {
        for (std::size_t i = 0; i < double_occupancy.size(); ++i) {
            entries.push_back({i, i, interaction * double_occupancy[i]});
        }
    }
    return SparseOperator(basis.size(), std::move(entries));
}

SectorModel build_sector_model(int num_sites, double hopping, double drive_amplitude, std::size_t max_dim) {
    SectorModel m;
    m.num_sites = num_sites;
    m.hopping = hopping;
    m.drive_amplitude = drive_amplitude;
    m.basis = half_filled_sector(num_sites, max_dim);
    m.hopping_op = build_hopping(m.basis, hopping);
    m.double_occupancy = double_occupancy_diagonal(m.basis);
    HubbardParams p;
    p.num_sites = num_sites;
    p.hopping = hopping;
    p.drive_amplitude = drive_amplitude;
    m.drive_op = build_drive(m.basis, p);
    return m;
}

EndpointSpectra build_endpoints(const SectorModel& model, double interaction, double beta, std::size_t max_dim) {
    EndpointSpectra e;
    e.interaction = interaction;
    e.beta = beta;
    e.h_static = model.static_hamiltonian(interaction);
    e.h_final = final_hamiltonian(e.h_static, model.drive_op);
    e.initial = decompose(e.h_static, max_dim);
    e.final = decompose(e.h_final, max_dim);
    e.ensemble0 = gibbs_weights(e.initial, beta);
    e.delta_f = free_energy_difference(e.initial, e.final, beta);
    return e;
}

double min_instantaneous_gap(const SparseOperator& h_static, const SparseOperator& h_drive, std::size_t samples) {
    samples = std::max<std::size_t>(samples, 2);
    double gap = std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd hs = h_static.to_dense();
    const Eigen::MatrixXd hd = h_drive.to_dense();
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(samples - 1);
        const Eigen::VectorXd ev = symmetric_eigenvalues(hs + s * hd);
        for (Eigen::Index k = 1; k < ev.size(); ++k) gap = std::min(gap, ev(k) - ev(k - 1));
    }
    return gap;
}

PointResult evaluate_point(const SectorModel& model, const EndpointSpectra& endpoints, double tau,
                           const PointOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    PointResult out;
    out.num_sites = model.num_sites;
    out.interaction = endpoints.interaction;
    out.tau = tau;
    out.beta = endpoints.beta;
    out.drive_amplitude = model.drive_amplitude;
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("evaluate_point: tau must be >= 0");

    const double beta = endpoints.beta;
    DrivenHamiltonian ham{endpoints.h_static, model.drive_op, tau};
    PropagatedSet prop = propagate(endpoints.initial, endpoints.ensemble0, ham, options.propagation, &endpoints.final);
    const Eigen::MatrixXcd amplitudes = final_amplitudes(prop, endpoints.final);
    const TransitionTable table =
        transition_table(amplitudes, prop, endpoints.initial, endpoints.final, endpoints.ensemble0);
    out.distribution = build_distribution(table, options.merge_tol, options.prob_floor);
    const WorkDistribution& dist = out.distribution;

    ThermoRecord& t = out.thermo;
    t.mean_work = mean(dist);
    t.variance = central_moment(dist, 2);
    t.skew3 = central_moment(dist, 3);
    t.skew_standardized = standardized_skewness(dist);
    t.delta_f = endpoints.delta_f;
    t.jarzynski_residual = jarzynski_residual(dist, beta, t.delta_f);

    const DensityMatrix rho = evolved_state(amplitudes, prop, endpoints.ensemble0, Frame::final_eigenbasis);
    const DensityMatrix rho_eq = gibbs_state(endpoints.final, beta, Frame::final_eigenbasis);
    const DensityMatrix rho_ad = adiabatic_reference(endpoints.ensemble0, endpoints.final, Frame::final_eigenbasis);
    t.sigma = entropy_production(rho, endpoints.ensemble0, endpoints.final, beta);
    t.dissipated_energy = t.sigma / beta;
    t.d_eq = trace_distance(rho, rho_eq);
    t.d_adiab = trace_distance(rho, rho_ad);
    t.fdr = fdr_ratio(t.sigma, t.variance, beta);
    t.lr_gap = linear_response_gap(t.mean_work, t.delta_f, t.variance, beta);
    t.final_levels_degenerate = has_degenerate_levels(endpoints.final);

    PointDiagnostics& d = out.diagnostics;
    d.discarded_weight = prop.discarded_weight;
    d.dropped_mass = dist.dropped_mass;
    d.steps = prop.stats.steps;
    d.refinements = prop.stats.refinements;
    d.final_dt = prop.stats.final_dt;
    d.norm_drift = prop.stats.max_norm_drift;
    d.observable_change = prop.stats.observable_change;
    d.row_sum_defect = table.row_sum_defect();
    d.unitarity_defect = unitarity_defect(prop);
    d.normalization_defect = std::abs(dist.total() - 1.0);
    const MeanEnergyCheck mc = mean_energy_crosscheck(table, prop, endpoints.h_final);
    d.mean_crosscheck = std::abs(mc.tpm_mean - mc.unitary_mean);
    d.sigma_identity_defect = std::abs(t.sigma - beta * (t.mean_work - t.delta_f));
    d.support_size = dist.size();
    d.pair_count = dist.pair_count;
    d.raw_pair_count = dist.raw_pair_count;
    if (options.gap_samples > 0 && model.basis.size() <= options.gap_max_dim) {
        d.min_gap = min_instantaneous_gap(endpoints.h_static, model.drive_op, tau > 0.0 ? options.gap_samples : 2);
    }
    d.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

PointResult run_single(const HubbardParams& params, const PointOptions& options) {
    params.validate();
    const SectorModel model = build_sector_model(params.num_sites, params.hopping, params.drive_amplitude, options.max_dim);
    const EndpointSpectra endpoints = build_endpoints(model, params.interaction, params.beta, options.max_dim);
    return evaluate_point(model, endpoints, params.tau, options);
}

// ---------------------------------------------------------------------------
// Grid

std::vector<double> SweepGrid::default_interactions() {
    std::vector<double> u;
    for (int i = 0; i <= 48; ++i) u.push_back(0.25 * i);
    return u;
}

std::vector<double> SweepGrid::default_taus() {
    return {0.0, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.5, 5.0, 7.0, 10.0};
}

SweepGrid SweepGrid::defaults() {
    SweepGrid g;
    g.interactions = default_interactions();
    g.taus = default_taus();
    return g;
}

std::vector<double> SweepGrid::interactions_for(int L) const {
    if (L < 8 || dense_large_chains) return interactions;
    const double lo = *std::min_element(interactions.begin(), interactions.end());
    const double hi = *std::max_element(interactions.begin(), interactions.end());
    const std::size_t n = std::min<std::size_t>(12, interactions.size());
    if (n < 2) return interactions;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return u;
}

std::vector<double> SweepGrid::taus_for(int L) const {
    if (L < 8 || dense_large_chains) return taus;
    std::vector<double> coarse;
    for (double t : {0.0, 0.5, 2.5, 10.0}) {
        if (std::find(taus.begin(), taus.end(), t) != taus.end()) coarse.push_back(t);
    }
    return coarse.empty() ? taus : coarse;
}

std::size_t SweepGrid::point_count() const {
    std::size_t n = 0;
    for (int L : num_sites) n += interactions_for(L).size() * taus_for(L).size();
    return n;
}

void SweepGrid::validate(std::size_t max_dim) const {
    if (num_sites.empty() || interactions.empty() || taus.empty()) throw ConfigError("sweep grid must be non-empty");
    for (int L : num_sites) {
        if (L < 2 || L % 2 != 0 || L > kMaxSites) throw ConfigError("sweep grid: L must be even in [2, 14]");
        const auto dim = binomial(L, L / 2) * binomial(L, L / 2);
        if (dim > max_dim) {
            throw ConfigError("sweep grid: L = " + std::to_string(L) + " gives dimension " + std::to_string(dim) +
                              " above the cap " + std::to_string(max_dim));
        }
    }
    for (double u : interactions) {
        if (!(u >= 0.0) || !std::isfinite(u)) throw ConfigError("sweep grid: U values must be finite and >= 0");
    }
    for (double t : taus) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("sweep grid: tau values must be finite and >= 0");
    }
    if (!(beta > 0.0)) throw ConfigError("sweep grid: beta must be positive");
    if (!(hopping > 0.0)) throw ConfigError("sweep grid: J must be positive");
    if (!std::isfinite(drive_amplitude)) throw ConfigError("sweep grid: A must be finite");
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

struct Group {
    int num_sites;
    std::size_t u_index;
    double interaction;
    std::vector<double> taus;
    std::size_t first_slot;
};

std::string dist_name(int L, std::size_t iu, std::size_t it) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "dist/L%d_U%03zu_tau%02zu.csv", L, iu, it);
    return buf;
}

} // namespace

SweepManifest run_sweep(const SweepGrid& grid, const SweepOptions& options, const fs::path& out_dir) {
    grid.validate(options.point.max_dim);
    options.point.propagation.validate();
    if (options.workers == 0) throw ConfigError("run_sweep: workers must be >= 1");
    fs::create_directories(out_dir / "dist");

    std::map<int, SectorModel> models;
    std::vector<Group> groups;
    std::size_t slots = 0;
    for (int L : grid.num_sites) {
        if (!models.count(L)) models.emplace(L, build_sector_model(L, grid.hopping, grid.drive_amplitude, options.point.max_dim));
        const auto us = grid.interactions_for(L);
        const auto ts = grid.taus_for(L);
        for (std::size_t iu = 0; iu < us.size(); ++iu) {
            groups.push_back({L, iu, us[iu], ts, slots});
            slots += ts.size();
        }
    }

    SweepManifest manifest;
    manifest.directory = out_dir;
    manifest.results.resize(slots);

    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    std::size_t done = 0;
    auto worker = [&] {
        for (;;) {
            const std::size_t g = next.fetch_add(1);
            if (g >= groups.size()) return;
            const Group& grp = groups[g];
            const SectorModel& model = models.at(grp.num_sites);
            std::optional<EndpointSpectra> endpoints;
            std::string endpoint_error;
            try {
                endpoints = build_endpoints(model, grp.interaction, grid.beta, options.point.max_dim);
            } catch (const std::exception& e) {
                endpoint_error = e.what();
            }
            for (std::size_t it = 0; it < grp.taus.size(); ++it) {
                PointResult r;
                if (endpoints) {
                    try {
                        r = evaluate_point(model, *endpoints, grp.taus[it], options.point);
                    } catch (const std::exception& e) {
                        r.error = e.what();
                    }
                } else {
                    r.error = endpoint_error;
                }
                r.num_sites = grp.num_sites;
                r.interaction = grp.interaction;
                r.tau = grp.taus[it];
                r.beta = grid.beta;
                r.drive_amplitude = grid.drive_amplitude;
                if (r.ok()) r.distribution_file = dist_name(grp.num_sites, grp.u_index, it);
                manifest.results[grp.first_slot + it] = std::move(r);
                if (options.progress) {
                    std::lock_guard lock(progress_mutex);
                    options.progress(manifest.results[grp.first_slot + it], ++done, slots);
                }
            }
        }
    };
    const std::size_t nthreads = std::min(options.workers, std::max<std::size_t>(groups.size(), 1));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    }

    using nlohmann::json;
    json points = json::array();
    for (const auto& r : manifest.results) {
        json p = {{"L", r.num_sites}, {"U", r.interaction}, {"tau", r.tau}, {"status", r.ok() ? "ok" : "failed"}};
        if (r.ok()) {
            write_distribution_csv(out_dir / r.distribution_file, r.distribution);
            ManifestEntry e{r.distribution_file, sha256_file(out_dir / r.distribution_file)};
            p["distribution"] = {{"file", e.path}, {"sha256", e.sha256}};
            p["wall_seconds"] = r.diagnostics.wall_seconds;
            manifest.distributions.push_back(std::move(e));
        } else {
            p["error"] = *r.error;
            ++manifest.failures;
        }
        points.push_back(std::move(p));
    }
    write_records_csv(out_dir / "records.csv", manifest.results);
    manifest.records = {"records.csv", sha256_file(out_dir / "records.csv")};

    json m;
    m["format"] = "hubwork-sweep/1";
    m["units"] = {{"energy", "J"}, {"time", "1/J"}, {"beta", "1/J"}};
    json cfg = json::parse(options.config_echo, nullptr, false);
    m["config"] = cfg.is_discarded() ? json(options.config_echo) : cfg;
    m["grid"] = {{"L", grid.num_sites}, {"U", grid.interactions}, {"tau", grid.taus}, {"beta", grid.beta},
                 {"A", grid.drive_amplitude}, {"J", grid.hopping}, {"dense_large_chains", grid.dense_large_chains}};
    m["records"] = {{"file", manifest.records.path}, {"sha256", manifest.records.sha256}};
    m["points"] = std::move(points);
    m["failures"] = manifest.failures;
    write_text_file(out_dir / "manifest.json", m.dump(2) + "\n");
    return manifest;
}

// ---------------------------------------------------------------------------
// Records read-back and heatmaps

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

const std::map<std::string, std::string>& quantity_aliases() {
    static const std::map<std::string, std::string> a = {
        {"mean_work", "mean_work_J"}, {"mean", "mean_work_J"},  {"variance", "variance_J2"},
        {"skew3", "skew3_J3"},        {"skewness", "skew3_J3"}, {"delta_F", "delta_F_J"},
        {"fdr", "fdr_ratio"},         {"lr_gap", "lr_gap_J"},   {"sigma_over_beta", "sigma_over_beta_J"},
        {"min_gap", "min_gap_J"},
    };
    return a;
}

std::string canonical_quantity(const std::string& q) {
    const auto& names = heatmap_quantities();
    if (std::find(names.begin(), names.end(), q) != names.end()) return q;
    auto it = quantity_aliases().find(q);
    if (it != quantity_aliases().end()) return it->second;
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown heatmap quantity '" + q + "'; choose one of: " + list);
}

} // namespace

const std::string& RecordRow::at(const std::string& column) const {
    auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw ConfigError("records.csv has no column '" + column + "'");
    const auto i = static_cast<std::size_t>(it - header.begin());
    if (i >= fields.size()) throw ConfigError("records.csv row is missing column '" + column + "'");
    return fields[i];
}

double RecordRow::number(const std::string& column) const {
    const std::string& s = at(column);
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw ConfigError("records.csv: column '" + column + "' holds non-numeric value '" + s + "'");
    }
}

std::vector<RecordRow> read_records(const fs::path& csv_path) {
    const std::string text = read_text_file(csv_path);
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw ConfigError(csv_path.string() + " is empty");
    const auto header = split_csv_line(line);
    std::vector<RecordRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        rows.push_back({header, split_csv_line(line)});
    }
    return rows;
}

const std::vector<std::string>& heatmap_quantities() {
    static const std::vector<std::string> q = {
        "mean_work_J", "variance_J2",       "skew3_J3", "skew_std", "delta_F_J", "sigma",
        "sigma_over_beta_J", "d_eq",        "d_adiab",  "fdr_ratio", "lr_gap_J", "jarzynski_residual",
        "min_gap_J",
    };
    return q;
}

double quantity_value(const PointResult& r, const std::string& quantity) {
    const std::string q = canonical_quantity(quantity);
    if (!r.ok()) return std::numeric_limits<double>::quiet_NaN();
    const auto& t = r.thermo;
    if (q == "mean_work_J") return t.mean_work;
    if (q == "variance_J2") return t.variance;
    if (q == "skew3_J3") return t.skew3;
    if (q == "skew_std") return t.skew_standardized;
    if (q == "delta_F_J") return t.delta_f;
    if (q == "sigma") return t.sigma;
    if (q == "sigma_over_beta_J") return t.dissipated_energy;
    if (q == "d_eq") return t.d_eq;
    if (q == "d_adiab") return t.d_adiab;
    if (q == "fdr_ratio") return t.fdr.value_or(std::numeric_limits<double>::quiet_NaN());
    if (q == "lr_gap_J") return t.lr_gap;
    if (q == "jarzynski_residual") return t.jarzynski_residual;
    if (q == "min_gap_J") return r.diagnostics.min_gap;
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

Heatmap assemble_heatmap(int L, const std::string& quantity, const std::vector<std::tuple<double, double, double>>& pts) {
    if (pts.empty()) throw ConfigError("heatmap: sweep holds no points for L = " + std::to_string(L));
    std::set<double> us;
    std::set<double> ts;
    for (const auto& [u, t, v] : pts) {
        us.insert(u);
        ts.insert(t);
    }
    Heatmap map;
    map.num_sites = L;
    map.quantity = quantity;
    map.interactions.assign(us.begin(), us.end());
    map.taus.assign(ts.begin(), ts.end());
    map.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(map.taus.size()),
                                           static_cast<Eigen::Index>(map.interactions.size()),
                                           std::numeric_limits<double>::quiet_NaN());
    for (const auto& [u, t, v] : pts) {
        const auto iu = std::lower_bound(map.interactions.begin(), map.interactions.end(), u) - map.interactions.begin();
        const auto it = std::lower_bound(map.taus.begin(), map.taus.end(), t) - map.taus.begin();
        map.values(it, iu) = v;
    }
    for (Eigen::Index i = 0; i < map.values.size(); ++i) {
        if (std::isnan(map.values.data()[i])) ++map.missing;
    }
    return map;
}

} // namespace

Heatmap extract_heatmap(const std::vector<PointResult>& results, const std::string& quantity, int L) {
    const std::string q = canonical_quantity(quantity);
    std::vector<std::tuple<double, double, double>> pts;
    for (const auto& r : results) {
        if (r.num_sites == L) pts.emplace_back(r.interaction, r.tau, quantity_value(r, q));
    }
    return assemble_heatmap(L, q, pts);
}

Heatmap extract_heatmap(const fs::path& sweep, const std::string& quantity, int L) {
    const std::string q = canonical_quantity(quantity);
    fs::path csv = sweep;
    if (fs::is_directory(sweep)) csv = sweep / "records.csv";
    else if (sweep.filename() == "manifest.json") {
        const auto m = nlohmann::json::parse(read_text_file(sweep), nullptr, false);
        if (m.is_discarded() || !m.contains("records")) throw ConfigError("heatmap: malformed manifest " + sweep.string());
        csv = sweep.parent_path() / m["records"]["file"].get<std::string>();
    }
    if (!fs::exists(csv)) throw ConfigError("heatmap: " + csv.string() + " not found (incomplete sweep?)");
    std::vector<std::tuple<double, double, double>> pts;
    for (const auto& row : read_records(csv)) {
        if (static_cast<int>(row.number("L")) != L) continue;
        const double v = row.at("status") == "ok" ? row.number(q) : std::numeric_limits<double>::quiet_NaN();
        pts.emplace_back(row.number("U_J"), row.number("tau_invJ"), v);
    }
    return assemble_heatmap(L, q, pts);
}

void write_heatmap_csv(const Heatmap& map, const fs::path& path) {
    std::string body = "tau_invJ\\U_J";
    for (double u : map.interactions) body += ',' + format_number(u);
    body += '\n';
    for (std::size_t it = 0; it < map.taus.size(); ++it) {
        body += format_number(map.taus[it]);
        for (std::size_t iu = 0; iu < map.interactions.size(); ++iu) {
            const double v = map.values(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(iu));
            body += ',';
            if (!std::isnan(v)) body += format_number(v);
        }
        body += '\n';
    }
    write_text_file(path, body);
}

namespace {

struct Rgb {
    double r, g, b;
};

Rgb lerp(Rgb a, Rgb b, double t) { return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t}; }

std::string hex(Rgb c) {
    char buf[8];
    auto ch = [](double x) { return static_cast<int>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); };
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", ch(c.r), ch(c.g), ch(c.b));
    return buf;
}

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

} // namespace

void write_heatmap_svg(const Heatmap& map, const fs::path& path) {
    const double width = 720.0;
    const double height = 480.0;
    const double left = 70.0;
    const double right = 110.0;
    const double top = 40.0;
    const double bottom = 60.0;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    const auto nu = map.interactions.size();
    const auto nt = map.taus.size();

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < map.values.size(); ++i) {
        const double v = map.values.data()[i];
        if (std::isnan(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    const bool diverging = lo < 0.0 && hi > 0.0;
    const Rgb blue{0.19, 0.31, 0.63}, white{1.0, 1.0, 1.0}, red{0.70, 0.09, 0.17};
    const Rgb dark{0.15, 0.10, 0.35}, light{0.99, 0.91, 0.55};
    auto colour = [&](double v) {
        if (diverging) {
            const double m = std::max(-lo, hi);
            const double t = v / m;
            return t < 0 ? lerp(white, blue, -t) : lerp(white, red, t);
        }
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return lerp(dark, light, t);
    };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << map.quantity
      << ", L = " << map.num_sites << "</text>\n";
    const double cw = nu ? pw / static_cast<double>(nu) : pw;
    const double chh = nt ? ph / static_cast<double>(nt) : ph;
    for (std::size_t it = 0; it < nt; ++it) {
        // tau grows upwards.
        const double y = top + ph - static_cast<double>(it + 1) * chh;
        for (std::size_t iu = 0; iu < nu; ++iu) {
            const double v = map.values(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(iu));
            const std::string fill = std::isnan(v) ? "#bbbbbb" : hex(colour(v));
            s << "<rect x=\"" << left + static_cast<double>(iu) * cw << "\" y=\"" << y << "\" width=\"" << cw + 0.5
              << "\" height=\"" << chh + 0.5 << "\" fill=\"" << fill << "\"/>\n";
        }
        s << "<text x=\"" << left - 6 << "\" y=\"" << y + chh / 2 + 4 << "\" text-anchor=\"end\">"
          << short_number(map.taus[it]) << "</text>\n";
    }
    const std::size_t ustep = std::max<std::size_t>(1, nu / 8);
    for (std::size_t iu = 0; iu < nu; iu += ustep) {
        s << "<text x=\"" << left + (static_cast<double>(iu) + 0.5) * cw << "\" y=\"" << top + ph + 16
          << "\" text-anchor=\"middle\">" << short_number(map.interactions[iu]) << "</text>\n";
    }
    s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 18 << "\" text-anchor=\"middle\">U/J</text>\n";
    s << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << top + ph / 2
      << ")\">&#964;&#183;J</text>\n";

    const double bx = left + pw + 30.0;
    const int bands = 64;
    for (int b = 0; b < bands; ++b) {
        const double t = static_cast<double>(b) / (bands - 1);
        const double v = lo + (hi - lo) * t;
        s << "<rect x=\"" << bx << "\" y=\"" << top + ph - (b + 1) * ph / bands << "\" width=\"18\" height=\""
          << ph / bands + 0.5 << "\" fill=\"" << hex(colour(v)) << "\"/>\n";
    }
    s << "<text x=\"" << bx + 24 << "\" y=\"" << top + 10 << "\">" << short_number(hi) << "</text>\n";
    s << "<text x=\"" << bx + 24 << "\" y=\"" << top + ph << "\">" << short_number(lo) << "</text>\n";
    s << "</svg>\n";
    write_text_file(path, s.str());
}

// ---------------------------------------------------------------------------
// Extrema

std::optional<Extremum> Extrema::deepest_minimum() const {
    if (minima.empty()) return std::nullopt;
    return *std::min_element(minima.begin(), minima.end(),
                             [](const Extremum& a, const Extremum& b) { return a.value < b.value; });
}

std::optional<Extremum> Extrema::highest_maximum() const {
    if (maxima.empty()) return std::nullopt;
    return *std::max_element(maxima.begin(), maxima.end(),
                             [](const Extremum& a, const Extremum& b) { return a.value < b.value; });
}

namespace {

Extremum refine_vertex(std::span<const double> x, std::span<const double> y, std::size_t i) {
    const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    Extremum e{x1, y1, i};
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if (denom == 0.0) return e;
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    const double c = (x1 * x2 * (x1 - x2) * y0 + x2 * x0 * (x2 - x0) * y1 + x0 * x1 * (x0 - x1) * y2) / denom;
    if (a == 0.0) return e;
    const double xv = std::clamp(-b / (2.0 * a), x0, x2);
    e.location = xv;
    e.value = (a * xv + b) * xv + c;
    return e;
}

} // namespace

Extrema locate_extrema(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ConfigError("locate_extrema: x and y differ in length");
    if (x.size() < 3) throw ConfigError("locate_extrema: need at least 3 points");
    Extrema out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] < y[i - 1] && y[i] <= y[i + 1]) out.minima.push_back(refine_vertex(x, y, i));
        else if (y[i] > y[i - 1] && y[i] >= y[i + 1]) out.maxima.push_back(refine_vertex(x, y, i));
    }
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0 || std::isnan(y[i])) continue;
        if (last && (y[*last] < 0.0) != (y[i] < 0.0)) {
            const std::size_t a = *last;
            ZeroCrossing z;
            z.direction = y[i] > 0.0 ? 1 : -1;
            z.location = (i == a + 1) ? x[a] - y[a] * (x[i] - x[a]) / (y[i] - y[a]) : x[a + 1];
            out.zero_crossings.push_back(z);
        }
        last = i;
    }
    return out;
}

} // namespace hubwork
