// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <hubwork/propagator.hpp>

#include <string>
#include <vector>

namespace hubwork::cli {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Invariant suite: L <= 4 identities and references; `full` adds L = 6
/// spot checks and the slow dimer ramp.
[[nodiscard]] std::vector<CheckResult> run_checks(bool full, const PropagationConfig& cfg);

} // namespace hubwork::cli
