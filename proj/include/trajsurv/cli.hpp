#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trajsurv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `trajsurv` command. `args` excludes the program name.
/// Subcommands: ingest, analyze, sensitivity, simulate, report.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trajsurv
