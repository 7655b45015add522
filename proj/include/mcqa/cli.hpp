#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcqa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitCoverage = 2;

/// Runs the mcq-audit command line. args excludes the program name. Errors
/// are reported as one JSON line on err and mapped to an exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcqa::cli
