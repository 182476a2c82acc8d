#include "hypcmc/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hypcmc {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void check_written(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

MeshFormat parse_mesh_format(const std::string& name) {
    if (name == "ply") return MeshFormat::Ply;
    if (name == "obj") return MeshFormat::Obj;
    throw IoError("unknown mesh format '" + name + "'");
}

void export_mesh(const EmbeddedMesh& mesh, const std::string& path, MeshFormat format) {
    auto out = open_out(path);
    const int d = mesh.vertices.empty() ? 3 : mesh.vertices.front().dim();
    if (format == MeshFormat::Ply) {
        if (d != 3) throw IoError("PLY export supports surfaces in 3-space only");
        out << "ply\nformat ascii 1.0\n";
        out << "element vertex " << mesh.vertices.size() << "\n";
        out << "property float64 x\nproperty float64 y\nproperty float64 z\n";
        out << "element face " << mesh.triangles.size() << "\n";
        out << "property list uchar int vertex_indices\nend_header\n";
        for (const auto& v : mesh.vertices) {
            out << format_double(v.coords()[0]) << ' ' << format_double(v.coords()[1]) << ' '
                << format_double(v.coords()[2]) << '\n';
        }
        for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    } else {
        if (d != 3) throw IoError("OBJ export supports surfaces in 3-space only");
        for (const auto& v : mesh.vertices) {
            out << "v " << format_double(v.coords()[0]) << ' ' << format_double(v.coords()[1]) << ' '
                << format_double(v.coords()[2]) << '\n';
        }
        for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
    check_written(out, path);
}

std::size_t ReportTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw IoError("table has no column '" + name + "'");
}

void write_csv(const ReportTable& table, const std::string& path) {
    const bool labelled = !table.label_column.empty();
    if (labelled && table.labels.size() != table.rows.size()) throw IoError("label count differs from row count");
    auto out = open_out(path);
    if (labelled) out << table.label_column << (table.columns.empty() ? "" : ",");
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.columns.size()) throw IoError("row width differs from header in '" + path + "'");
        if (labelled) {
            if (table.labels[r].find_first_of(",\n") != std::string::npos) throw IoError("label contains a separator");
            out << table.labels[r] << (row.empty() ? "" : ",");
        }
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    check_written(out, path);
}

ReportTable read_csv(const std::string& path, bool labelled) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    ReportTable t;
    std::string line;
    if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
    }
    if (labelled) {
        if (t.columns.empty()) throw IoError("'" + path + "' has no label column");
        t.label_column = t.columns.front();
        t.columns.erase(t.columns.begin());
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (labelled && first) {
                t.labels.push_back(cell);
                first = false;
                continue;
            }
            first = false;
            // strtod keeps subnormals that stod would reject
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size()) {
                throw IoError("'" + path + "' line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
            row.push_back(v);
        }
        if (row.size() != t.columns.size()) {
            throw IoError("'" + path + "' line " + std::to_string(lineno) + ": expected " +
                          std::to_string(t.columns.size()) + " values");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_summary(const Summary& summary, const std::string& path) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : summary.scalars) {
        if (std::isfinite(v)) {
            j[k] = v;
        } else {
            j[k] = nullptr;
        }
    }
    for (const auto& [k, v] : summary.fields) j[k] = v;
    if (!summary.checks.empty()) {
        nlohmann::ordered_json c;
        for (const auto& [k, v] : summary.checks) c[k] = v;
        j["checks"] = c;
    }
    auto out = open_out(path);
    out << std::setw(2) << j << '\n';
    check_written(out, path);
}

ReportTable solution_table(const Solution& s, const CurvatureField* curvature, const EmbeddedMesh* mesh) {
    const ChartGrid& g = *s.u.grid;
    const int n = g.dim();
    ReportTable t;
    t.columns.push_back("node");
    for (int a = 0; a < n; ++a) t.columns.push_back("xi_" + std::to_string(a + 1));
    t.columns.push_back("u");
    t.columns.push_back("residual");
    t.columns.push_back("H_est");
    const ResidualField r = residual(s.u, s.h);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t node = 0; node < g.size(); ++node) {
        if (g.kind(node) == NodeKind::Inactive) continue;
        std::vector<double> row;
        row.push_back(static_cast<double>(node));
        const Vec xi = g.coords(node);
        for (int a = 0; a < n; ++a) row.push_back(xi[a]);
        row.push_back(s.u[node]);
        row.push_back(g.kind(node) == NodeKind::Interior ? r.values[node] : nan);
        double h_est = nan;
        if (curvature && mesh) {
            const long v = mesh->vertex_of_node[node];
            if (v >= 0 && curvature->valid[static_cast<std::size_t>(v)]) h_est = curvature->values[static_cast<std::size_t>(v)];
        }
        row.push_back(h_est);
        t.rows.push_back(std::move(row));
    }
    return t;
}

GraphFunction read_solution(const ReportTable& table, const GridPtr& grid) {
    const std::size_t cn = table.column("node");
    const std::size_t cu = table.column("u");
    const int n = grid->dim();
    std::vector<std::size_t> cx;
    for (int a = 0; a < n; ++a) cx.push_back(table.column("xi_" + std::to_string(a + 1)));
    GraphFunction u(grid);
    std::vector<char> seen(grid->size(), 0);
    for (const auto& row : table.rows) {
        const double raw = row[cn];
        if (!(raw >= 0.0) || raw != std::floor(raw) || raw >= static_cast<double>(grid->size())) {
            throw IoError("solution table: invalid node index");
        }
        const auto node = static_cast<std::size_t>(raw);
        if (grid->kind(node) == NodeKind::Inactive) throw IoError("solution table: node is inactive on this grid");
        const Vec xi = grid->coords(node);
        for (int a = 0; a < n; ++a) {
            if (std::abs(xi[a] - row[cx[a]]) > 1e-9) throw IoError("solution table: node coordinates do not match the grid");
        }
        if (!std::isfinite(row[cu])) throw IoError("solution table: non-finite u");
        u[node] = row[cu];
        seen[node] = 1;
    }
    for (std::size_t node = 0; node < grid->size(); ++node) {
        if (grid->kind(node) != NodeKind::Inactive && !seen[node]) throw IoError("solution table: missing nodes");
    }
    return u;
}

}  // namespace hypcmc
