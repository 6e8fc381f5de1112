#pragma once

// Command-line front end: fit, simulate, bench, timecourse.
//
// Settings come from built-in defaults, then an optional key=value file
// (--config), then BDG_SEED for the seed, then explicit flags. Every run
// writes run_manifest.txt, which is itself a valid --config file.

#include <ostream>
#include <string>

namespace bdg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // unexpected internal error
inline constexpr int kExitConfig = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitPartial = 5;  // bench: some replications failed

std::string version();

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bdg::cli
