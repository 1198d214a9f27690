// Copyright 2026 The hubwork Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return hubwork::cli::run(argc, argv, std::cout, std::cerr); }
