// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return groupcl::cli::run(argc, argv, std::cout, std::cerr); }
