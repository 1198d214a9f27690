// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file records.hpp
 * @brief CSV/JSON serialization of results.
 *
 * CSV dialect: comma separated, '.' decimal, one header row, LF line
 * endings. Numbers use the shortest representation that round-trips.
 * Column names carry units: energies in J, times in 1/J.
 */

#pragma once

#include "hubwork/experiment.hpp"
#include "hubwork/workstats.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hubwork {

[[nodiscard]] std::string format_number(double v);

/// Fixed column order of records.csv.
[[nodiscard]] const std::vector<std::string>& record_columns();
[[nodiscard]] std::string record_csv_header();
[[nodiscard]] std::string record_csv_row(const PointResult& r);

void write_records_csv(const std::filesystem::path& path, const std::vector<PointResult>& results);

/// Stem data (W_J, P) in ascending W.
void write_distribution_csv(const std::filesystem::path& path, const WorkDistribution& dist);
void write_smoothed_csv(const std::filesystem::path& path, const SmoothedCurve& curve);

/// One JSON object per point: grid point, thermodynamic record and diagnostics.
[[nodiscard]] std::string point_json(const PointResult& r, bool with_distribution = false, int indent = 2);

[[nodiscard]] std::string sha256_hex(std::string_view data);
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

/// Writes `contents` verbatim (binary mode, so LF stays LF).
void write_text_file(const std::filesystem::path& path, std::string_view contents);
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

} // namespace hubwork
