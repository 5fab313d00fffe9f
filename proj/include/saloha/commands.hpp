// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace saloha {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitRuntime = 3,
};

/// Entry point of the `saloha` command line. Subcommands: airtime,
/// plan-slot, dc-curve, drift-curve, simulate, compare.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace saloha
