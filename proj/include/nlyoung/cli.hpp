// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace nly::cli {

// Full command-line entry point (subcommands: validate, pattern,
// sample, analyze, sweep).  Returns the process exit code:
// 0 success, 1 usage/config, 2 numerical failure, 3 I/O.
int run(int argc, const char* const* argv);

}  // namespace nly::cli
