// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "hubwork/records.hpp"

#include "hubwork/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hubwork {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw NumericalError("format_number: conversion failed");
    return {buf.data(), ptr};
}

namespace {

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; }

std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + '"';
}

} // namespace

const std::vector<std::string>& record_columns() {
    static const std::vector<std::string> cols = {
        "L",              "U_J",           "tau_invJ",      "beta_invJ",       "A_J",
        "mean_work_J",    "variance_J2",   "skew3_J3",      "skew_std",        "delta_F_J",
        "sigma",          "sigma_over_beta_J", "d_eq",      "d_adiab",         "fdr_ratio",
        "lr_gap_J",       "jarzynski_residual", "support_size", "pair_count",  "raw_pair_count",
        "discarded_weight", "dropped_mass", "min_gap_J",    "steps",           "refinements",
        "final_dt_invJ",  "norm_drift",    "final_levels_degenerate", "status", "dist_file",
    };
    return cols;
}

std::string record_csv_header() {
    std::string out;
    for (const auto& c : record_columns()) {
        if (!out.empty()) out += ',';
        out += c;
    }
    return out;
}

std::string record_csv_row(const PointResult& r) {
    const auto& t = r.thermo;
    const auto& d = r.diagnostics;
    const bool ok = r.ok();
    auto num = [&](double v) { return ok ? format_number(v) : std::string{}; };
    std::vector<std::string> f = {
        std::to_string(r.num_sites),
        format_number(r.interaction),
        format_number(r.tau),
        format_number(r.beta),
        format_number(r.drive_amplitude),
        num(t.mean_work),
        num(t.variance),
        num(t.skew3),
        num(t.skew_standardized),
        num(t.delta_f),
        num(t.sigma),
        num(t.dissipated_energy),
        num(t.d_eq),
        num(t.d_adiab),
        ok ? optional_number(t.fdr) : std::string{},
        num(t.lr_gap),
        num(t.jarzynski_residual),
        ok ? std::to_string(d.support_size) : std::string{},
        ok ? std::to_string(d.pair_count) : std::string{},
        ok ? std::to_string(d.raw_pair_count) : std::string{},
        num(d.discarded_weight),
        num(d.dropped_mass),
        num(d.min_gap),
        ok ? std::to_string(d.steps) : std::string{},
        ok ? std::to_string(d.refinements) : std::string{},
        num(d.final_dt),
        num(d.norm_drift),
        ok ? (t.final_levels_degenerate ? "1" : "0") : std::string{},
        ok ? std::string("ok") : std::string("failed"),
        r.distribution_file,
    };
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) out += ',';
        out += f[i];
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw ConfigError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_records_csv(const std::filesystem::path& path, const std::vector<PointResult>& results) {
    std::string body = record_csv_header() + '\n';
    for (const auto& r : results) body += record_csv_row(r) + '\n';
    write_text_file(path, body);
}

void write_distribution_csv(const std::filesystem::path& path, const WorkDistribution& dist) {
    std::string body = "W_J,P\n";
    for (std::size_t i = 0; i < dist.size(); ++i) {
        body += format_number(dist.support[i]) + ',' + format_number(dist.probs[i]) + '\n';
    }
    write_text_file(path, body);
}

void write_smoothed_csv(const std::filesystem::path& path, const SmoothedCurve& curve) {
    std::string body = "W_J,density_invJ\n";
    for (std::size_t i = 0; i < curve.w.size(); ++i) {
        body += format_number(curve.w[i]) + ',' + format_number(curve.density[i]) + '\n';
    }
    write_text_file(path, body);
}

std::string point_json(const PointResult& r, bool with_distribution, int indent) {
    using nlohmann::json;
    auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["units"] = {{"energy", "J"}, {"time", "1/J"}, {"beta", "1/J"}};
    j["point"] = {{"L", r.num_sites}, {"U", r.interaction}, {"tau", r.tau}, {"beta", r.beta}, {"A", r.drive_amplitude}};
    j["status"] = r.ok() ? "ok" : "failed";
    if (r.error) j["error"] = *r.error;
    if (r.ok()) {
        const auto& t = r.thermo;
        j["thermo"] = {
            {"mean_work", num(t.mean_work)},       {"variance", num(t.variance)},
            {"skew3", num(t.skew3)},               {"skew_standardized", num(t.skew_standardized)},
            {"delta_F", num(t.delta_f)},           {"sigma", num(t.sigma)},
            {"sigma_over_beta", num(t.dissipated_energy)}, {"d_eq", num(t.d_eq)},
            {"d_adiab", num(t.d_adiab)},           {"fdr_ratio", t.fdr ? json(*t.fdr) : json(nullptr)},
            {"lr_gap", num(t.lr_gap)},             {"jarzynski_residual", num(t.jarzynski_residual)},
            {"final_levels_degenerate", t.final_levels_degenerate},
        };
        const auto& d = r.diagnostics;
        j["diagnostics"] = {
            {"discarded_weight", num(d.discarded_weight)}, {"dropped_mass", num(d.dropped_mass)},
            {"min_gap", num(d.min_gap)},                   {"steps", d.steps},
            {"refinements", d.refinements},                {"final_dt", num(d.final_dt)},
            {"norm_drift", num(d.norm_drift)},             {"observable_change", num(d.observable_change)},
            {"row_sum_defect", num(d.row_sum_defect)},     {"unitarity_defect", num(d.unitarity_defect)},
            {"normalization_defect", num(d.normalization_defect)},
            {"mean_crosscheck", num(d.mean_crosscheck)},   {"sigma_identity_defect", num(d.sigma_identity_defect)},
            {"support_size", d.support_size},              {"pair_count", d.pair_count},
            {"raw_pair_count", d.raw_pair_count},          {"wall_seconds", d.wall_seconds},
        };
        if (with_distribution) {
            json stems = json::array();
            for (std::size_t i = 0; i < r.distribution.size(); ++i) {
                stems.push_back({{"W", r.distribution.support[i]}, {"P", r.distribution.probs[i]}});
            }
            j["distribution"] = stems;
        }
    }
    if (!r.distribution_file.empty()) j["distribution_file"] = r.distribution_file;
    return j.dump(indent);
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw NumericalError("sha256: digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[md[i] >> 4];
        out += kHex[md[i] & 0xF];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

} // namespace hubwork
