// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <hubwork/errors.hpp>
#include <hubwork/records.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace hubwork::cli {

namespace {

using nlohmann::json;

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

double to_real(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
    }
    return v;
}

long to_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
    }
    return v;
}

std::size_t to_count(const std::string& key, const std::string& text) {
    const long v = to_integer(key, text);
    if (v < 0) throw ConfigError("config key '" + key + "' must be >= 0, got " + text);
    return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + text + "'");
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ",") + format_number(x);
    return s;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
    enum Kind { text, number, flag, real_list, int_list } kind;
};

const std::vector<std::pair<std::string, Field>>& fields() {
    using K = Field::Kind;
    static const std::vector<std::pair<std::string, Field>> f = {
        {"L", {[](RunConfig& c, const std::string& v) { c.params.num_sites = static_cast<int>(to_integer("L", v)); },
               [](const RunConfig& c) { return std::to_string(c.params.num_sites); }, K::number}},
        {"J", {[](RunConfig& c, const std::string& v) { c.params.hopping = to_real("J", v); c.grid.hopping = c.params.hopping; },
               [](const RunConfig& c) { return format_number(c.params.hopping); }, K::number}},
        {"U", {[](RunConfig& c, const std::string& v) { c.params.interaction = to_real("U", v); },
               [](const RunConfig& c) { return format_number(c.params.interaction); }, K::number}},
        {"A", {[](RunConfig& c, const std::string& v) {
                   c.params.drive_amplitude = to_real("A", v);
                   c.grid.drive_amplitude = c.params.drive_amplitude;
               },
               [](const RunConfig& c) { return format_number(c.params.drive_amplitude); }, K::number}},
        {"beta", {[](RunConfig& c, const std::string& v) { c.params.beta = to_real("beta", v); c.grid.beta = c.params.beta; },
                  [](const RunConfig& c) { return format_number(c.params.beta); }, K::number}},
        {"tau", {[](RunConfig& c, const std::string& v) { c.params.tau = to_real("tau", v); },
                 [](const RunConfig& c) { return format_number(c.params.tau); }, K::number}},
        {"scheme", {[](RunConfig& c, const std::string& v) {
                        const auto s = parse_scheme(trim(v));
                        if (!s) throw ConfigError("config key 'scheme': expected midpoint, cf4 or rk4, got '" + v + "'");
                        c.point.propagation.scheme = *s;
                    },
                    [](const RunConfig& c) { return std::string(to_string(c.point.propagation.scheme)); }, K::text}},
        {"dt", {[](RunConfig& c, const std::string& v) { c.point.propagation.dt = to_real("dt", v); },
                [](const RunConfig& c) { return format_number(c.point.propagation.dt); }, K::number}},
        {"tol_unitary", {[](RunConfig& c, const std::string& v) { c.point.propagation.tol_unitary = to_real("tol_unitary", v); },
                         [](const RunConfig& c) { return format_number(c.point.propagation.tol_unitary); }, K::number}},
        {"tol_observable",
         {[](RunConfig& c, const std::string& v) { c.point.propagation.tol_observable = to_real("tol_observable", v); },
          [](const RunConfig& c) { return format_number(c.point.propagation.tol_observable); }, K::number}},
        {"weight_cutoff",
         {[](RunConfig& c, const std::string& v) { c.point.propagation.weight_cutoff = to_real("weight_cutoff", v); },
          [](const RunConfig& c) { return format_number(c.point.propagation.weight_cutoff); }, K::number}},
        {"refine", {[](RunConfig& c, const std::string& v) { c.point.propagation.refine = to_bool("refine", v); },
                    [](const RunConfig& c) { return std::string(c.point.propagation.refine ? "true" : "false"); }, K::flag}},
        {"max_refinements",
         {[](RunConfig& c, const std::string& v) {
              c.point.propagation.max_refinements = static_cast<int>(to_integer("max_refinements", v));
          },
          [](const RunConfig& c) { return std::to_string(c.point.propagation.max_refinements); }, K::number}},
        {"propagator_threads",
         {[](RunConfig& c, const std::string& v) { c.point.propagation.workers = to_count("propagator_threads", v); },
          [](const RunConfig& c) { return std::to_string(c.point.propagation.workers); }, K::number}},
        {"merge_tol", {[](RunConfig& c, const std::string& v) { c.point.merge_tol = to_real("merge_tol", v); },
                       [](const RunConfig& c) { return format_number(c.point.merge_tol); }, K::number}},
        {"prob_floor", {[](RunConfig& c, const std::string& v) { c.point.prob_floor = to_real("prob_floor", v); },
                        [](const RunConfig& c) { return format_number(c.point.prob_floor); }, K::number}},
        {"max_dim", {[](RunConfig& c, const std::string& v) { c.point.max_dim = to_count("max_dim", v); },
                     [](const RunConfig& c) { return std::to_string(c.point.max_dim); }, K::number}},
        {"grid_L", {[](RunConfig& c, const std::string& v) {
                        c.grid.num_sites.clear();
                        for (double x : parse_real_list(v)) {
                            if (x != std::floor(x)) throw ConfigError("config key 'grid_L': chain lengths must be integers");
                            c.grid.num_sites.push_back(static_cast<int>(x));
                        }
                    },
                    [](const RunConfig& c) { return join(c.grid.num_sites); }, K::int_list}},
        {"grid_U", {[](RunConfig& c, const std::string& v) { c.grid.interactions = parse_real_list(v); },
                    [](const RunConfig& c) { return join(c.grid.interactions); }, K::real_list}},
        {"grid_tau", {[](RunConfig& c, const std::string& v) { c.grid.taus = parse_real_list(v); },
                      [](const RunConfig& c) { return join(c.grid.taus); }, K::real_list}},
        {"dense_large_chains",
         {[](RunConfig& c, const std::string& v) { c.grid.dense_large_chains = to_bool("dense_large_chains", v); },
          [](const RunConfig& c) { return std::string(c.grid.dense_large_chains ? "true" : "false"); }, K::flag}},
        {"workers", {[](RunConfig& c, const std::string& v) { c.workers = to_count("workers", v); },
                     [](const RunConfig& c) { return std::to_string(c.workers); }, K::number}},
        {"verbosity", {[](RunConfig& c, const std::string& v) { c.verbosity = static_cast<int>(to_integer("verbosity", v)); },
                       [](const RunConfig& c) { return std::to_string(c.verbosity); }, K::number}},
        {"out", {[](RunConfig& c, const std::string& v) { c.out = trim(v); },
                 [](const RunConfig& c) { return c.out; }, K::text}},
    };
    return f;
}

const Field& field(const std::string& key) {
    for (const auto& [k, f] : fields()) {
        if (k == key) return f;
    }
    std::string list;
    for (const auto& k : config_keys()) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("unknown config key '" + key + "'; valid keys: " + list);
}

std::string json_scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long>());
    if (v.is_number()) return format_number(v.get<double>());
    throw ConfigError("config value " + v.dump() + " must be a scalar");
}

} // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, f] : fields()) k.push_back(name);
        return k;
    }();
    return keys;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.push_back(to_real("list", item));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos) throw ConfigError("range '" + item + "' must read start:step:stop");
        const double a = to_real("range", item.substr(0, c1));
        const double h = to_real("range", item.substr(c1 + 1, c2 - c1 - 1));
        const double b = to_real("range", item.substr(c2 + 1));
        if (!(h > 0.0) || b < a) throw ConfigError("range '" + item + "' needs step > 0 and stop >= start");
        const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
        if (n > 100000) throw ConfigError("range '" + item + "' is too long");
        for (long i = 0; i <= n; ++i) out.push_back(a + h * static_cast<double>(i));
    }
    return out;
}

void set_value(RunConfig& cfg, const std::string& key, const std::string& value) { field(key).set(cfg, value); }

std::map<std::string, std::string> to_key_values(const RunConfig& cfg) {
    std::map<std::string, std::string> m;
    for (const auto& [k, f] : fields()) m[k] = f.get(cfg);
    return m;
}

std::string to_json(const RunConfig& cfg, int indent) {
    json j = json::object();
    for (const auto& [k, f] : fields()) {
        const std::string v = f.get(cfg);
        switch (f.kind) {
        case Field::text: j[k] = v; break;
        case Field::flag: j[k] = v == "true"; break;
        case Field::number: j[k] = json::parse(v); break;
        case Field::real_list: j[k] = parse_real_list(v); break;
        case Field::int_list: j[k] = cfg.grid.num_sites; break;
        }
    }
    return j.dump(indent);
}

std::string to_key_value_text(const RunConfig& cfg) {
    std::string s = "# hubwork run configuration (energies in J, times and beta in 1/J)\n";
    for (const auto& [k, f] : fields()) s += k + " = " + f.get(cfg) + "\n";
    return s;
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const json j = json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw ConfigError("config: malformed JSON");
        for (const auto& [k, v] : j.items()) {
            if (v.is_array()) {
                std::string joined;
                for (const auto& x : v) joined += (joined.empty() ? "" : ",") + json_scalar_text(x);
                set_value(base, k, joined);
            } else {
                set_value(base, k, json_scalar_text(v));
            }
        }
        return base;
    }
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value, got '" + line + "'");
        }
        set_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::exception& e) {
        throw ConfigError("cannot read config file '" + path + "': " + e.what());
    }
    return parse_config(text, std::move(base));
}

void RunConfig::validate() const {
    params.validate();
    point.propagation.validate();
    if (!(point.merge_tol >= 0.0)) throw ConfigError("merge_tol must be >= 0");
    if (!(point.prob_floor >= 0.0)) throw ConfigError("prob_floor must be >= 0");
    if (workers == 0) throw ConfigError("workers must be >= 1");
    if (verbosity < 0 || verbosity > 3) throw ConfigError("verbosity must lie in [0, 3]");
    if (out.empty()) throw ConfigError("out must name an output directory");
    const auto dim = binomial(params.num_sites, params.num_sites / 2) * binomial(params.num_sites, params.num_sites / 2);
    if (dim > point.max_dim) {
        throw ConfigError("L = " + std::to_string(params.num_sites) + " gives sector dimension " + std::to_string(dim) +
                          " above max_dim = " + std::to_string(point.max_dim));
    }
}

} // namespace hubwork::cli
