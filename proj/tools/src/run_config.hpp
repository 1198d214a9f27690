// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <hubwork/experiment.hpp>

#include <map>
#include <string>
#include <vector>

namespace hubwork::cli {

/**
 * Every tunable of a run. Keys are flat and identical to the command-line
 * flags (`--tol_observable 1e-9` sets key `tol_observable`).
 *
 * File formats: JSON object, or `key = value` lines with `#` comments.
 * Lists (grid_L, grid_U, grid_tau) are JSON arrays or comma-separated values;
 * a `start:step:stop` item expands to an inclusive range.
 */
struct RunConfig {
    HubbardParams params;
    PointOptions point;
    SweepGrid grid = SweepGrid::defaults();
    std::size_t workers = 1;
    int verbosity = 1;
    std::string out = "hubwork-out";

    /// Checks physical and numerical bounds; throws ConfigError.
    void validate() const;
};

/// Ordered list of all configuration keys.
[[nodiscard]] const std::vector<std::string>& config_keys();

/// Applies one key/value pair given as text. Throws ConfigError.
void set_value(RunConfig& cfg, const std::string& key, const std::string& value);

[[nodiscard]] std::map<std::string, std::string> to_key_values(const RunConfig& cfg);
[[nodiscard]] std::string to_json(const RunConfig& cfg, int indent = 2);
[[nodiscard]] std::string to_key_value_text(const RunConfig& cfg);

/// Parses JSON or key=value text onto `base`.
[[nodiscard]] RunConfig parse_config(const std::string& text, RunConfig base = {});
[[nodiscard]] RunConfig load_config(const std::string& path, RunConfig base = {});

[[nodiscard]] std::vector<double> parse_real_list(const std::string& text);

} // namespace hubwork::cli
