#include "cli/json_out.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mangeron/error.hpp"

namespace mangeron::cli {

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void emit(const Json& v, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, item] : v.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(key).dump() + ": ";
                emit(item, out, depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            bool flat = true;
            for (const Json& item : v) flat = flat && !item.is_structured();
            if (flat) {
                out += "[";
                for (std::size_t k = 0; k < v.size(); ++k) {
                    if (k) out += ", ";
                    emit(v[k], out, depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (k) out += ",\n";
                out += pad;
                emit(v[k], out, depth + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case Json::value_t::number_float:
            out += format_double(v.get<double>());
            return;
        default:
            out += v.dump();
            return;
    }
}

}  // namespace

std::string to_json_text(const Json& doc) {
    std::string out;
    emit(doc, out, 0);
    out += "\n";
    return out;
}

std::string solution_csv(const SolutionBundle& b) {
    b.require_complete();
    const Grid2D& g = b.u.grid;
    std::string out = "x,y,u,ux,uy,uxx,uyy,uxy,uxxy,uxyy,uxxyy\n";
    const GridFn2D* cols[] = {&b.u, &b.ux, &b.uy, &b.uxx, &b.uyy, &b.uxy, &b.uxxy, &b.uxyy, &b.uxxyy};
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            out += format_double(g.x().node(i));
            out += ',';
            out += format_double(g.y().node(j));
            for (const GridFn2D* c : cols) {
                out += ',';
                out += format_double(c->at(i, j));
            }
            out += '\n';
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace mangeron::cli
