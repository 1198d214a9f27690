// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "run_config.hpp"

#include <iosfwd>
#include <string>

namespace hubwork::cli {

enum ExitCode : int {
    kOk = 0,
    kInvariantFailure = 1,
    kConfigError = 2,
    kPartialSweepFailure = 3,
};

int cmd_single(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_dist(const RunConfig& cfg, double smooth_width, std::ostream& out);
int cmd_heatmap(const RunConfig& cfg, const std::string& sweep, const std::string& quantity, std::ostream& out);
int cmd_check(const std::string& level, const RunConfig& cfg, std::ostream& out);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hubwork::cli
