#include "cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "mangeron/error.hpp"
#include "mangeron/expr.hpp"

namespace mangeron::cli {

namespace {

void reject_unknown(const Json& obj, const std::string& where, std::initializer_list<const char*> known) {
    const std::set<std::string> k(known.begin(), known.end());
    for (const auto& [key, value] : obj.items()) {
        if (!k.contains(key)) throw ParseError(where + ": unknown key '" + key + "'");
    }
}

const Json& require_object(const Json& doc, const char* key, const std::string& where) {
    if (!doc.contains(key)) throw ParseError(where + ": missing block '" + key + "'");
    const Json& v = doc.at(key);
    if (!v.is_object()) throw ParseError(where + "." + key + " must be an object");
    return v;
}

double number(const Json& v, const std::string& what) {
    if (!v.is_number()) throw ParseError(what + " must be a number");
    return v.get<double>();
}

std::size_t count(const Json& v, const std::string& what) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ParseError(what + " must be a non-negative integer");
    return static_cast<std::size_t>(v.get<long long>());
}

std::vector<double> number_list(const Json& v, const std::string& what) {
    if (!v.is_array()) throw ParseError(what + " must be an array of numbers");
    std::vector<double> out;
    for (const Json& e : v) out.push_back(number(e, what + "[]"));
    return out;
}

std::string text(const Json& v, const std::string& what) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    throw ParseError(what + " must be an expression string or a number");
}

// Function entry; records the expression text when it has one.
Field1D function(const Json& v, expr::Var var, const std::string& what, std::map<std::string, std::string>& exprs,
                 const std::string& key) {
    try {
        if (v.is_object()) {
            reject_unknown(v, what, {"nodes", "values", "expression"});
            if (v.contains("expression")) {
                const std::string t = text(v.at("expression"), what + ".expression");
                exprs[key] = t;
                return expr::make_field1d(t, var);
            }
            if (!v.contains("nodes") || !v.contains("values")) {
                throw ParseError(what + ": sampled function needs 'nodes' and 'values'");
            }
            return Field1D::samples(number_list(v.at("nodes"), what + ".nodes"),
                                    number_list(v.at("values"), what + ".values"));
        }
        const std::string t = text(v, what);
        exprs[key] = t;
        return expr::make_field1d(t, var);
    } catch (const InvalidInput& e) {
        throw ParseError(what + ": " + e.what());
    } catch (const StructuralError& e) {
        throw ParseError(what + ": " + e.what());
    }
}

DataBlock parse_data(const Json& block) {
    reject_unknown(block, "data", {"nonclassical", "classical"});
    const bool nc = block.contains("nonclassical"), cl = block.contains("classical");
    if (nc == cl) throw ParseError("data: exactly one of 'nonclassical' or 'classical' is required");
    DataBlock d;
    d.classical = cl;
    if (cl) {
        const Json& c = require_object(block, "classical", "data");
        reject_unknown(c, "data.classical", {"phi1", "phi2", "psi1", "psi2"});
        auto get = [&](const char* key, expr::Var var) {
            if (!c.contains(key)) throw ParseError(std::string("data.classical: missing '") + key + "'");
            return function(c.at(key), var, std::string("data.classical.") + key, d.expressions, key);
        };
        d.classical_data.phi1 = get("phi1", expr::Var::Y);
        d.classical_data.phi2 = get("phi2", expr::Var::Y);
        d.classical_data.psi1 = get("psi1", expr::Var::X);
        d.classical_data.psi2 = get("psi2", expr::Var::X);
        return d;
    }
    const Json& z = require_object(block, "nonclassical", "data");
    reject_unknown(z, "data.nonclassical",
                   {"z00", "z10", "z01", "z20", "z02", "z00_h1", "z01_h1", "z02_h1", "z00_h2", "z10_h2", "z20_h2"});
    auto scalar = [&](const char* key) {
        if (!z.contains(key)) return 0.0;
        return number(z.at(key), std::string("data.nonclassical.") + key);
    };
    auto fn = [&](const char* key, expr::Var var) {
        if (!z.contains(key)) return Field1D::constant(0.0);
        return function(z.at(key), var, std::string("data.nonclassical.") + key, d.expressions, key);
    };
    NonclassicalData& n = d.nonclassical;
    n.z00 = scalar("z00");
    n.z10 = scalar("z10");
    n.z01 = scalar("z01");
    n.z20 = fn("z20", expr::Var::X);
    n.z02 = fn("z02", expr::Var::Y);
    n.z00_h1 = scalar("z00_h1");
    n.z01_h1 = scalar("z01_h1");
    n.z02_h1 = fn("z02_h1", expr::Var::Y);
    n.z00_h2 = scalar("z00_h2");
    n.z10_h2 = scalar("z10_h2");
    n.z20_h2 = fn("z20_h2", expr::Var::X);
    return d;
}

void parse_solver(const Json& s, SolveOptions& o) {
    reject_unknown(s, "solver", {"method", "tol", "max_iter", "p", "force"});
    try {
        if (s.contains("method")) o.method = parse_method(text(s.at("method"), "solver.method"));
    } catch (const InvalidInput& e) {
        throw ParseError(std::string("solver.method: ") + e.what());
    }
    if (s.contains("tol")) {
        o.tol = number(s.at("tol"), "solver.tol");
        if (!(o.tol > 0.0)) throw ParseError("solver.tol must be positive");
    }
    if (s.contains("max_iter")) o.max_iter = count(s.at("max_iter"), "solver.max_iter");
    if (s.contains("p")) {
        const Json& p = s.at("p");
        if (p.is_string() && (p == "inf" || p == "infinity")) {
            o.norm = NormSpec::infinity();
        } else {
            const double v = number(p, "solver.p");
            if (!(v >= 1.0)) throw ParseError("solver.p must be >= 1 or \"inf\"");
            o.norm = NormSpec(v);
        }
    }
    if (s.contains("force")) {
        if (!s.at("force").is_boolean()) throw ParseError("solver.force must be true or false");
        o.force = s.at("force").get<bool>();
    }
}

}  // namespace

Grid2D RunConfig::grid() const {
    std::set<double> xb(x_breakpoints.begin(), x_breakpoints.end());
    std::set<double> yb(y_breakpoints.begin(), y_breakpoints.end());
    for (double v : coeffs.x_breakpoints()) xb.insert(v);
    for (double v : coeffs.y_breakpoints()) yb.insert(v);
    const std::vector<double> xs(xb.begin(), xb.end()), ys(yb.begin(), yb.end());
    return build_grid(domain, n1, n2, xs, ys);
}

RunConfig parse_config(const Json& doc) {
    if (!doc.is_object()) throw ParseError("config: top level must be an object");
    reject_unknown(doc, "config", {"domain", "grid", "coefficients", "z22", "data", "solver", "exact_solution"});
    RunConfig cfg;
    cfg.raw = doc;

    try {
        if (doc.contains("domain")) {
            const Json& d = require_object(doc, "domain", "config");
            reject_unknown(d, "domain", {"h1", "h2"});
            cfg.domain = Domain(d.contains("h1") ? number(d.at("h1"), "domain.h1") : 1.0,
                                d.contains("h2") ? number(d.at("h2"), "domain.h2") : 1.0);
        }
        if (doc.contains("grid")) {
            const Json& g = require_object(doc, "grid", "config");
            reject_unknown(g, "grid", {"n1", "n2", "x_breakpoints", "y_breakpoints"});
            if (g.contains("n1")) cfg.n1 = count(g.at("n1"), "grid.n1");
            if (g.contains("n2")) cfg.n2 = count(g.at("n2"), "grid.n2");
            if (g.contains("x_breakpoints")) cfg.x_breakpoints = number_list(g.at("x_breakpoints"), "grid.x_breakpoints");
            if (g.contains("y_breakpoints")) cfg.y_breakpoints = number_list(g.at("y_breakpoints"), "grid.y_breakpoints");
        }
        if (doc.contains("coefficients")) {
            const Json& c = require_object(doc, "coefficients", "config");
            for (const auto& [key, value] : c.items()) {
                bool found = false;
                for (auto& [name, field] : cfg.coeffs.named()) {
                    if (name != key) continue;
                    *field = expr::make_field2d(text(value, "coefficients." + key), Coefficients::required_class(name));
                    found = true;
                }
                if (!found) throw ParseError("coefficients: unknown coefficient '" + key + "'");
            }
        }
        if (doc.contains("z22")) cfg.z22 = expr::make_field2d(text(doc.at("z22"), "z22"), Smoothness::Lp);
        if (!doc.contains("data")) throw ParseError("config: missing block 'data'");
        cfg.data = parse_data(require_object(doc, "data", "config"));
        if (doc.contains("solver")) parse_solver(require_object(doc, "solver", "config"), cfg.solver);
        if (doc.contains("exact_solution")) {
            cfg.exact_expression = text(doc.at("exact_solution"), "exact_solution");
            cfg.exact_solution = expr::make_field2d(cfg.exact_expression, Smoothness::Continuous);
        }
        // Fail early on impossible grids.
        (void)cfg.grid();
    } catch (const InvalidInput& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(in, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

NonclassicalData nonclassical_of(const RunConfig& cfg) {
    if (!cfg.data.classical) return cfg.data.nonclassical;
    const ClassicalData& cd = cfg.data.classical_data;
    return classical_to_nonclassical(cd, cfg.domain, cd.analytic() ? kCornerTolAnalytic : kCornerTolSampled);
}

Json function_entry(const Field1D& f, const Axis& axis, const std::string& expression) {
    Json j = Json::object();
    j["nodes"] = std::vector<double>(axis.nodes().begin(), axis.nodes().end());
    j["values"] = f.sample(axis).values;
    if (!expression.empty()) j["expression"] = expression;
    return j;
}

}  // namespace mangeron::cli
