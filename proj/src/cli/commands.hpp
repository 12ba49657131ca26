#pragma once

#include <iosfwd>

namespace mangeron::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitSolver = 4;

/// Entry point of the `mangeron` tool:
///
///   mangeron solve   --config PATH [--out DIR] [--force] [--method M] [--grid N1xN2] [--p VALUE]
///   mangeron convert --config PATH --to classical|nonclassical [--out DIR] [--grid N1xN2]
///   mangeron check   --config PATH [--out DIR] [--grid N1xN2]
///   mangeron verify  --suite smooth-basic|exact-bilinear|piecewise-a00 [--out DIR]
///
/// Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mangeron::cli
