#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace awgif::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;   // runtime or I/O failure
inline constexpr int kExitUsage = 2;     // bad flags or parameter values

inline constexpr const char* kCsvHeader = "scene,filter,zeta,lambda0,beta,rmse,corr,rmsd";

/**
 * Runs one CLI invocation. `args` excludes the program name, e.g.
 * {"synth", "--shape", "cone", "--out", "d/"}. Subcommands: synth, sff,
 * eval, filter, sweep. `--config FILE` supplies key=value defaults that
 * explicit flags override.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace awgif::cli
