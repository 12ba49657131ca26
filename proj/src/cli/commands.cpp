#include "cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <ostream>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "cli/json_out.hpp"
#include "mangeron/error.hpp"
#include "mangeron/expr.hpp"
#include "mangeron/mms.hpp"

namespace mangeron::cli {

namespace {

namespace fs = std::filesystem;

struct Overrides {
    std::string method;
    std::string grid;
    std::string p;
    bool force = false;
};

void apply(const Overrides& o, RunConfig& cfg) {
    if (!o.method.empty()) {
        try {
            cfg.solver.method = parse_method(o.method);
        } catch (const InvalidInput& e) {
            throw ParseError(std::string("--method: ") + e.what());
        }
    }
    if (!o.grid.empty()) {
        unsigned long n1 = 0, n2 = 0;
        char tail = 0;
        if (std::sscanf(o.grid.c_str(), "%lux%lu%c", &n1, &n2, &tail) != 2) {
            throw ParseError("--grid expects N1xN2, got '" + o.grid + "'");
        }
        cfg.n1 = n1;
        cfg.n2 = n2;
        try {
            (void)cfg.grid();
        } catch (const InvalidInput& e) {
            throw ParseError(std::string("--grid: ") + e.what());
        }
    }
    if (!o.p.empty()) {
        if (o.p == "inf" || o.p == "infinity") {
            cfg.solver.norm = NormSpec::infinity();
        } else {
            char* end = nullptr;
            const double v = std::strtod(o.p.c_str(), &end);
            if (end == o.p.c_str() || *end != '\0' || !(v >= 1.0)) throw ParseError("--p expects a number >= 1 or inf");
            cfg.solver.norm = NormSpec(v);
        }
    }
    if (o.force) cfg.solver.force = true;
}

Json named_values(const std::vector<std::pair<std::string, double>>& v) {
    Json j = Json::object();
    for (const auto& [name, value] : v) j[name] = value;
    return j;
}

Json check_json(const CheckReport& r) {
    return Json{{"residuals", named_values(r.residuals)},
                {"max_residual", r.max_residual()},
                {"tolerance", r.tolerance},
                {"passed", r.passed}};
}

Json report_json(const SolveReport& r) {
    Json j = Json::object();
    j["method"] = r.method;
    j["iterations"] = r.iterations;
    j["final_update_norm"] = r.final_update_norm;
    j["update_norms"] = r.update_norms;
    j["diverged"] = r.diverged;
    j["condition_estimate"] = r.condition_estimate ? Json(*r.condition_estimate) : Json(nullptr);
    j["threads"] = r.threads;
    return j;
}

void write_report(const fs::path& dir, const std::string& name, const Json& doc) {
    write_file(dir / name, to_json_text(doc));
}

fs::path prepare_out(const std::string& dir) {
    fs::path p(dir.empty() ? "." : dir);
    fs::create_directories(p);
    return p;
}

// ---------------------------------------------------------------- solve

int cmd_solve(RunConfig cfg, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    const Grid2D grid = cfg.grid();
    Json rep = Json::object();
    rep["command"] = "solve";
    rep["method_requested"] = to_string(cfg.solver.method);
    rep["grid"] = Json{{"n1", cfg.n1}, {"n2", cfg.n2}, {"nx", grid.nx()}, {"ny", grid.ny()}};
    rep["norm_p"] = cfg.solver.norm.is_infinity() ? Json("inf") : Json(cfg.solver.norm.p());
    rep["force"] = cfg.solver.force;

    auto fail = [&](int code, const std::string& msg) {
        rep["error"] = msg;
        rep["exit_code"] = code;
        write_report(out_dir, "report.json", rep);
        err << "mangeron solve: " << msg << "\n";
        return code;
    };

    PdeProblem problem;
    problem.domain = cfg.domain;
    problem.coeffs = cfg.coeffs;
    problem.z22 = cfg.z22;
    try {
        problem.data = nonclassical_of(cfg);
    } catch (const CornerMismatchError& e) {
        return fail(kExitData, e.what());
    }

    SolveResult res;
    try {
        res = solve_problem(problem, grid, cfg.solver);
    } catch (const DataConstraintError& e) {
        rep["constraints"] = check_json(
            check_data_constraints(problem.data, grid, calibrated_tolerance(problem.data, grid)));
        return fail(kExitData, std::string(e.what()) + "; rerun with --force to bypass");
    } catch (const SingularSystemError& e) {
        rep["condition_estimate"] = e.condition_estimate();
        return fail(kExitSolver, e.what());
    } catch (const SolverFailure& e) {
        return fail(kExitSolver, e.what());
    }

    const SolveReport& r = res.report;
    Json solve = report_json(r);
    for (const auto& [key, value] : solve.items()) rep[key] = value;
    rep["neumann_attempt"] = res.neumann_attempt ? report_json(*res.neumann_attempt) : Json(nullptr);
    rep["residual_pde"] = r.residual_pde;
    rep["residual_bc"] = named_values(r.residual_bc);
    rep["residual_bundle"] = r.residual_bundle;
    rep["residual_threshold"] = r.residual_threshold;
    rep["discrete_threshold"] = r.discrete_threshold;
    rep["residual_passed"] = r.residual_passed;
    rep["b11"] = r.b11;
    rep["b11_alt"] = r.b11_alt;
    rep["b11_alt_discrepancy"] = r.b11_alt_discrepancy;
    rep["m1_estimate"] = r.m1_estimate;
    rep["norms"] = Json{{"wp22_u", wp22_norm(res.bundle, cfg.solver.norm)},
                        {"ep22_z", ep22_norm(problem.data, grid, cfg.solver.norm)},
                        {"z22_lp", lp_norm(problem.z22.sample(grid), cfg.solver.norm)}};
    Json cons = check_json(res.constraints);
    cons["forced"] = !res.constraints.passed;
    rep["constraints"] = cons;
    if (cfg.exact_solution) {
        double e = 0.0;
        for (std::size_t j = 0; j < grid.ny(); ++j) {
            for (std::size_t i = 0; i < grid.nx(); ++i) {
                const double ex = (*cfg.exact_solution)(grid.x().node(i), grid.y().node(j));
                e = std::max(e, std::abs(res.bundle.u.at(i, j) - ex));
            }
        }
        rep["exact_solution"] = Json{{"expression", cfg.exact_expression}, {"sup_error", e}};
    }
    rep["warnings"] = r.warnings;

    int code = kExitOk;
    if (!r.residual_passed) code = res.constraints.passed ? kExitSolver : kExitData;
    rep["exit_code"] = code;
    write_file(out_dir / "solution.csv", solution_csv(res.bundle));
    write_report(out_dir, "report.json", rep);
    for (const std::string& w : r.warnings) err << "warning: " << w << "\n";
    if (code != kExitOk) {
        err << "mangeron solve: residual gate failed (threshold " << format_double(r.residual_threshold) << ")\n";
    } else {
        out << "solved with " << r.method << " on " << grid.nx() << "x" << grid.ny() << " nodes\n";
    }
    return code;
}

// ---------------------------------------------------------------- convert

std::string second_derivative_text(const std::map<std::string, std::string>& exprs, const std::string& key,
                                   expr::Var v) {
    const auto it = exprs.find(key);
    if (it == exprs.end()) return {};
    return expr::Expr::parse(it->second).derivative(v).derivative(v).str();
}

std::string lookup(const std::map<std::string, std::string>& exprs, const std::string& key) {
    const auto it = exprs.find(key);
    return it == exprs.end() ? std::string() : it->second;
}

int cmd_convert(const RunConfig& cfg, const std::string& to, const fs::path& out_dir, std::ostream& out,
                std::ostream& err) {
    if (to != "classical" && to != "nonclassical") {
        err << "mangeron convert: --to must be 'classical' or 'nonclassical'\n";
        return kExitConfig;
    }
    const Grid2D grid = cfg.grid();
    NonclassicalData z;
    try {
        z = nonclassical_of(cfg);
    } catch (const CornerMismatchError& e) {
        err << "mangeron convert: " << e.what() << "\n";
        write_report(out_dir, "converted.json",
                     Json{{"error", e.what()}, {"corner_residual", e.residual()}, {"exit_code", kExitData}});
        return kExitData;
    }
    const auto& ex = cfg.data.expressions;
    Json data = Json::object();
    if (to == "classical") {
        const ClassicalData cd = cfg.data.classical ? cfg.data.classical_data : nonclassical_to_classical(z, grid);
        const bool keep = cfg.data.classical;
        data["classical"] = Json{
            {"phi1", function_entry(cd.phi1, grid.y(), keep ? lookup(ex, "phi1") : "")},
            {"phi2", function_entry(cd.phi2, grid.y(), keep ? lookup(ex, "phi2") : "")},
            {"psi1", function_entry(cd.psi1, grid.x(), keep ? lookup(ex, "psi1") : "")},
            {"psi2", function_entry(cd.psi2, grid.x(), keep ? lookup(ex, "psi2") : "")},
        };
    } else {
        const bool from_cl = cfg.data.classical;
        auto text_of = [&](const char* own, const char* trace, expr::Var v) {
            return from_cl ? second_derivative_text(ex, trace, v) : lookup(ex, own);
        };
        data["nonclassical"] = Json{
            {"z00", z.z00},
            {"z10", z.z10},
            {"z01", z.z01},
            {"z20", function_entry(z.z20, grid.x(), text_of("z20", "psi1", expr::Var::X))},
            {"z02", function_entry(z.z02, grid.y(), text_of("z02", "phi1", expr::Var::Y))},
            {"z00_h1", z.z00_h1},
            {"z01_h1", z.z01_h1},
            {"z02_h1", function_entry(z.z02_h1, grid.y(), text_of("z02_h1", "phi2", expr::Var::Y))},
            {"z00_h2", z.z00_h2},
            {"z10_h2", z.z10_h2},
            {"z20_h2", function_entry(z.z20_h2, grid.x(), text_of("z20_h2", "psi2", expr::Var::X))},
        };
    }
    Json doc = cfg.raw;
    doc["data"] = data;
    write_report(out_dir, "converted.json", doc);
    out << "wrote " << (out_dir / "converted.json").string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- check

int cmd_check(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out) {
    const Grid2D grid = cfg.grid();
    CheckReport matching, constraints;
    if (cfg.data.classical) {
        const ClassicalData& cd = cfg.data.classical_data;
        matching = check_matching(cd, cfg.domain, cd.analytic() ? kCornerTolAnalytic : kCornerTolSampled);
        const NonclassicalData z =
            classical_to_nonclassical(cd, cfg.domain, std::numeric_limits<double>::infinity());
        constraints = check_data_constraints(z, grid, calibrated_tolerance(z, grid));
    } else {
        const NonclassicalData& z = cfg.data.nonclassical;
        const double tol = calibrated_tolerance(z, grid);
        matching = check_matching(nonclassical_to_classical(z, grid), cfg.domain, tol);
        constraints = check_data_constraints(z, grid, tol);
    }
    const bool passed = matching.passed && constraints.passed;
    Json doc{{"command", "check"},
             {"data_form", cfg.data.classical ? "classical" : "nonclassical"},
             {"matching", check_json(matching)},
             {"data_constraints", check_json(constraints)},
             {"passed", passed}};
    write_report(out_dir, "check.json", doc);
    out << (passed ? "all checks passed" : "checks failed") << "\n";
    if (!passed) {
        for (const CheckReport* r : {&matching, &constraints}) {
            for (const auto& [name, v] : r->residuals) {
                if (v > r->tolerance) out << "  " << name << " residual " << format_double(v) << "\n";
            }
        }
    }
    return passed ? kExitOk : kExitData;
}

// ---------------------------------------------------------------- verify

struct SuiteCase {
    std::string case_name;
    std::string solver;  // "ie" or "fd"
};

int cmd_verify(const std::string& suite, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    std::vector<std::string> cases;
    if (suite == "smooth-basic") {
        cases = {"sinsin", "sinsin-a00", "smooth-variable"};
    } else if (suite == "exact-bilinear") {
        cases = {"bilinear"};
    } else if (suite == "piecewise-a00") {
        cases = {"piecewise-a00"};
    } else {
        err << "mangeron verify: unknown suite '" << suite << "'\n";
        return kExitConfig;
    }
    const std::vector<std::size_t> sizes{9, 17, 33};
    std::string csv = "case,solver,n,h,sup_error,observed_order\n";
    Json summary = Json::array();
    bool all = true;
    for (const std::string& name : cases) {
        const MmsCase c = mms_case(name);
        for (const char* solver : {"ie", "fd"}) {
            const bool ie = std::string(solver) == "ie";
            const ConvergenceTable t = convergence_study(c, sizes, ie ? ie_solver() : fd_solver());
            for (const ConvergenceRow& r : t.rows) {
                csv += name + "," + solver + "," + std::to_string(r.n) + "," + format_double(r.h) + "," +
                       format_double(r.error) + ",";
                if (r.order) {
                    csv += format_double(*r.order);
                } else if (t.exact && &r != &t.rows.front()) {
                    csv += "exact";
                }
                csv += "\n";
            }
            bool ok = true;
            std::string criterion;
            if (suite == "smooth-basic") {
                criterion = "observed order >= 1.9";
                for (const ConvergenceRow& r : t.rows) {
                    if (&r != &t.rows.front()) ok = ok && r.order && *r.order >= 1.9;
                }
            } else if (suite == "exact-bilinear") {
                const double tol = ie ? 1e-12 : 1e-10;
                criterion = ie ? "sup error <= 1e-12" : "sup error <= 1e-10";
                for (const ConvergenceRow& r : t.rows) ok = ok && r.error <= tol;
            } else {
                criterion = "completes; orders recorded";
            }
            all = all && ok;
            summary.push_back(Json{{"case", name},
                                   {"solver", solver},
                                   {"criterion", criterion},
                                   {"exact", t.exact},
                                   {"non_monotone", t.non_monotone},
                                   {"min_order", std::isnan(t.min_order()) ? Json(nullptr) : Json(t.min_order())},
                                   {"passed", ok}});
        }
    }
    write_file(out_dir / (suite + ".csv"), csv);
    write_report(out_dir, suite + ".json", Json{{"suite", suite}, {"passed", all}, {"cases", summary}});
    out << "suite " << suite << ": " << (all ? "passed" : "FAILED") << "\n";
    return all ? kExitOk : kExitSolver;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dirichlet problem for the generalized Mangeron equation on a rectangle", "mangeron"};
    app.require_subcommand(1);

    std::string config, out_dir = ".", to, suite;
    Overrides ov;

    CLI::App* solve = app.add_subcommand("solve", "solve the configured problem");
    solve->add_option("--config", config, "configuration file")->required();
    solve->add_option("--out", out_dir, "output directory");
    solve->add_flag("--force", ov.force, "bypass the data-constraint gate");
    solve->add_option("--method", ov.method, "auto|neumann|dense|coupled");
    solve->add_option("--grid", ov.grid, "node counts N1xN2");
    solve->add_option("--p", ov.p, "norm exponent (>= 1 or inf)");

    CLI::App* convert = app.add_subcommand("convert", "convert boundary data between forms");
    convert->add_option("--config", config, "configuration file")->required();
    convert->add_option("--to", to, "classical|nonclassical")->required();
    convert->add_option("--out", out_dir, "output directory");
    convert->add_option("--grid", ov.grid, "node counts N1xN2");

    CLI::App* check = app.add_subcommand("check", "check matching and compatibility relations");
    check->add_option("--config", config, "configuration file")->required();
    check->add_option("--out", out_dir, "output directory");
    check->add_option("--grid", ov.grid, "node counts N1xN2");

    CLI::App* verify = app.add_subcommand("verify", "run a manufactured-solution suite");
    verify->add_option("--suite", suite, "smooth-basic|exact-bilinear|piecewise-a00")->required();
    verify->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const fs::path dir = prepare_out(out_dir);
        if (*verify) return cmd_verify(suite, dir, out, err);
        RunConfig cfg = load_config(config);
        apply(ov, cfg);
        if (*solve) return cmd_solve(std::move(cfg), dir, out, err);
        if (*convert) return cmd_convert(cfg, to, dir, out, err);
        return cmd_check(cfg, dir, out);
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidInput& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CornerMismatchError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}

}  // namespace mangeron::cli
