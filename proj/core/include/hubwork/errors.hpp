// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hubwork {

/// Invalid parameters or inconsistent inputs. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to meet its contract (non-convergence,
/// norm drift, violated invariant).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hubwork
