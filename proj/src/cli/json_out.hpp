#pragma once

// Output writers. Every floating-point number is printed with 17
// significant digits; non-finite values become JSON null.

#include <filesystem>
#include <string>

#include "cli/config.hpp"
#include "mangeron/core_fields.hpp"

namespace mangeron::cli {

std::string format_double(double v);

/// Pretty-printed JSON with two-space indentation and a trailing newline.
std::string to_json_text(const Json& doc);

/// Header x,y,u,ux,uy,uxx,uyy,uxy,uxxy,uxyy,uxxyy; one row per node, y outer.
std::string solution_csv(const SolutionBundle& bundle);

/// Writes bytes unchanged (LF line endings stay LF).
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace mangeron::cli
