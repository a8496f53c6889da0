// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>

namespace groupcl::cli {

/// Runs one invocation of the `groupcl` tool. Results go to files under
/// --out and short summaries to `out`; failures print one line
/// `error kind=<kind> message="<text>"` to `err` and return nonzero.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Exit status reported for an error kind ("config", "io", ...).
int exit_code_for(const std::string& kind);

}  // namespace groupcl::cli
