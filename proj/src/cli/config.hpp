#pragma once

// Run configuration: a JSON document with nested blocks.
//
//   {
//     "domain":       {"h1": 1, "h2": 1},
//     "grid":         {"n1": 21, "n2": 21, "x_breakpoints": [], "y_breakpoints": []},
//     "coefficients": {"a00": "1", "a11": "piecewise([0.5], [], 1, 2)"},   missing → zero
//     "z22":          "4 + x^2*y^2",
//     "data": {"nonclassical": {"z00": 0, "z10": 0, "z01": 0, "z20": "0", "z02": "0",
//                               "z00_h1": 0, "z01_h1": 0, "z02_h1": "2*y^2", ...}}
//          or {"classical": {"phi1": "...", "phi2": "...", "psi1": "...", "psi2": "..."}},
//     "solver": {"method": "auto", "tol": 1e-10, "max_iter": 200, "p": 2, "force": false},
//     "exact_solution": "x^2*y^2"                                            optional
//   }
//
// A function entry is an expression string, a number, or
// {"nodes": [...], "values": [...], "expression": "..."}; the expression wins
// when present. "p" may be the string "inf".

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mangeron/core_fields.hpp"
#include "mangeron/problem_data.hpp"
#include "mangeron/solver.hpp"

namespace mangeron::cli {

using Json = nlohmann::ordered_json;

struct DataBlock {
    bool classical = false;
    NonclassicalData nonclassical;
    ClassicalData classical_data;
    /// Generating expression per function component, when given as text.
    std::map<std::string, std::string> expressions;
};

struct RunConfig {
    Domain domain{1.0, 1.0};
    std::size_t n1 = 21, n2 = 21;
    std::vector<double> x_breakpoints, y_breakpoints;
    Coefficients coeffs;
    Field2D z22;
    DataBlock data;
    SolveOptions solver;
    std::optional<Field2D> exact_solution;
    std::string exact_expression;
    Json raw;

    /// Grid aligned with the configured and the coefficient breakpoints.
    Grid2D grid() const;
};

/// Throws ParseError / InvalidInput on malformed configurations.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::string& path);

/// Nonclassical data of the configuration (converted from classical traces
/// when needed; throws CornerMismatchError).
NonclassicalData nonclassical_of(const RunConfig& cfg);

/// Function entry as written to converted files: samples on `axis` plus the
/// expression when one is known.
Json function_entry(const Field1D& f, const Axis& axis, const std::string& expression = {});

}  // namespace mangeron::cli
