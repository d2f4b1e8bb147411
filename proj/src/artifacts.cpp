#include "shapeflow/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "shapeflow/errors.hpp"

namespace shapeflow {

namespace {

/** Shortest decimal form that parses back to the identical double. */
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = std::strtod(buf, nullptr);
    if (back == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char probe[64];
            std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
            if (std::strtod(probe, nullptr) == v) return probe;
        }
    }
    return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double* out) {
    std::string t = strip(s);
    if (t.empty()) return false;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) return false;
    *out = v;
    return true;
}

double field_double(const std::string& field, const std::string& path, std::size_t line_no) {
    double v = 0.0;
    if (!parse_double(field, &v))
        throw IoError(path + " line " + std::to_string(line_no) + ": bad number '" + field + "'");
    return v;
}

int field_int(const std::string& field, const std::string& path, std::size_t line_no) {
    double v = field_double(field, path, line_no);
    if (v != std::floor(v) || std::abs(v) > 1e15)
        throw IoError(path + " line " + std::to_string(line_no) + ": expected integer, got '" + field + "'");
    return static_cast<int>(v);
}

std::vector<double> parse_bracket_array(const std::string& value, const std::string& path,
                                        std::size_t line_no) {
    std::string t = strip(value);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw IoError(path + " line " + std::to_string(line_no) + ": expected a bracketed array");
    std::vector<double> out;
    for (const std::string& field : split_fields(t.substr(1, t.size() - 2), ','))
        out.push_back(field_double(field, path, line_no));
    return out;
}

} // namespace

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

static const char* const kEnergyHeader = "k,t,e_pot,e_kin,e_tot,j1,j2,j3";

void write_energy_csv(const OptimizerResult& result, const std::string& path) {
    if (result.breakdown.size() != result.energy.size())
        throw ContractError("write_energy_csv: breakdown records (" +
                            std::to_string(result.breakdown.size()) +
                            ") do not match energy records (" +
                            std::to_string(result.energy.size()) + ")");
    std::string text = kEnergyHeader;
    text += '\n';
    for (std::size_t i = 0; i < result.energy.size(); ++i) {
        const EnergyRecord& e = result.energy[i];
        const ObjectiveValue& b = result.breakdown[i];
        text += std::to_string(e.k);
        for (double v : {e.t, e.e_pot, e.e_kin, e.e_tot, b.j1, b.j2, b.j3}) {
            text += ',';
            text += fmt(v);
        }
        text += '\n';
    }
    write_text_file(path, text);
}

std::vector<EnergyCsvRow> read_energy_csv(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    if (lines.empty() || lines[0] != kEnergyHeader)
        throw IoError(path + ": missing header '" + std::string(kEnergyHeader) + "'");
    std::vector<EnergyCsvRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (strip(lines[i]).empty())
            throw IoError(path + " line " + std::to_string(i + 1) + ": blank row");
        std::vector<std::string> f = split_fields(lines[i], ',');
        if (f.size() != 8)
            throw IoError(path + " line " + std::to_string(i + 1) + ": expected 8 fields, got " +
                          std::to_string(f.size()));
        EnergyCsvRow row;
        row.k = field_int(f[0], path, i + 1);
        row.t = field_double(f[1], path, i + 1);
        row.e_pot = field_double(f[2], path, i + 1);
        row.e_kin = field_double(f[3], path, i + 1);
        row.e_tot = field_double(f[4], path, i + 1);
        row.j1 = field_double(f[5], path, i + 1);
        row.j2 = field_double(f[6], path, i + 1);
        row.j3 = field_double(f[7], path, i + 1);
        rows.push_back(row);
    }
    return rows;
}

void write_front_csv(const std::vector<FrontPoint>& front, const std::string& path) {
    Eigen::Index n_q = front.empty() ? 0 : front.front().q_opt.size();
    for (const FrontPoint& p : front)
        if (p.q_opt.size() != n_q)
            throw ContractError("write_front_csv: inconsistent coefficient sizes across points");
    std::string text = "weight,j1,j2,converged";
    for (Eigen::Index j = 0; j < n_q; ++j) text += ",q" + std::to_string(j);
    text += '\n';
    for (const FrontPoint& p : front) {
        text += fmt(p.weight);
        text += ',';
        text += fmt(p.j1);
        text += ',';
        text += fmt(p.j2);
        text += ',';
        text += p.converged ? '1' : '0';
        for (Eigen::Index j = 0; j < n_q; ++j) {
            text += ',';
            text += fmt(p.q_opt[j]);
        }
        text += '\n';
    }
    write_text_file(path, text);
}

namespace {

std::string svg_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.8g", v);
    return buf;
}

} // namespace

void export_shape_svg(const MeshGrid& mesh, const ObstacleCircle& circle,
                      const std::string& path, bool draw_mesh_edges) {
    if (mesh.n_x < 2 || mesh.n_y < 2 || mesh.n_nodes() != mesh.n_x * mesh.n_y)
        throw ContractError("export_shape_svg: mesh is not a structured grid");

    // World-space bounds over the shape and the obstacle.
    double min_x = circle.center.x() - circle.radius;
    double max_x = circle.center.x() + circle.radius;
    double min_y = circle.center.y() - circle.radius;
    double max_y = circle.center.y() + circle.radius;
    for (const Eigen::Vector2d& n : mesh.nodes) {
        min_x = std::min(min_x, n.x());
        max_x = std::max(max_x, n.x());
        min_y = std::min(min_y, n.y());
        max_y = std::max(max_y, n.y());
    }
    double margin = 0.05 * std::max(max_x - min_x, max_y - min_y);
    if (margin <= 0.0) margin = 1.0;
    min_x -= margin;
    max_x += margin;
    min_y -= margin;
    max_y += margin;

    // SVG y grows downward; plot (x, -y) so the view box stays in meters and
    // one user unit is one meter along both axes.
    double vb_w = max_x - min_x;
    double vb_h = max_y - min_y;
    int px_w = 800;
    int px_h = std::max(1, static_cast<int>(std::llround(px_w * vb_h / vb_w)));
    double sw = 0.004 * std::max(vb_w, vb_h);

    std::string text;
    text += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(px_w) +
            "\" height=\"" + std::to_string(px_h) + "\" viewBox=\"" + svg_num(min_x) + " " +
            svg_num(-max_y) + " " + svg_num(vb_w) + " " + svg_num(vb_h) + "\">\n";

    // Outline: bottom edge left to right, right edge up, top edge right to
    // left, left edge down; the polygon closes itself.
    std::string points;
    auto push_node = [&](int column, int row) {
        const Eigen::Vector2d& n = mesh.nodes[static_cast<std::size_t>(mesh.node_id(column, row))];
        if (!points.empty()) points += ' ';
        points += svg_num(n.x()) + "," + svg_num(-n.y());
    };
    for (int c = 0; c < mesh.n_x; ++c) push_node(c, 0);
    for (int r = 1; r < mesh.n_y; ++r) push_node(mesh.n_x - 1, r);
    for (int c = mesh.n_x - 2; c >= 0; --c) push_node(c, mesh.n_y - 1);
    for (int r = mesh.n_y - 2; r >= 1; --r) push_node(0, r);
    text += "<polygon points=\"" + points + "\" fill=\"#dfe8f3\" stroke=\"#28415e\" stroke-width=\"" +
            svg_num(sw) + "\"/>\n";

    if (draw_mesh_edges) {
        std::string d;
        for (const std::array<int, 3>& tri : mesh.triangles) {
            for (int v = 0; v < 3; ++v) {
                const Eigen::Vector2d& n = mesh.nodes[static_cast<std::size_t>(tri[static_cast<std::size_t>(v)])];
                d += (v == 0 ? "M" : "L");
                d += svg_num(n.x()) + " " + svg_num(-n.y());
            }
            d += "Z";
        }
        text += "<path d=\"" + d + "\" fill=\"none\" stroke=\"#8aa4c0\" stroke-width=\"" +
                svg_num(0.35 * sw) + "\"/>\n";
    }

    text += "<circle cx=\"" + svg_num(circle.center.x()) + "\" cy=\"" + svg_num(-circle.center.y()) +
            "\" r=\"" + svg_num(circle.radius) + "\" fill=\"none\" stroke=\"#b23a3a\" stroke-width=\"" +
            svg_num(sw) + "\"/>\n";
    text += "</svg>\n";
    write_text_file(path, text);
}

void write_coefficients(const ShapeParams& params, const std::string& path) {
    Eigen::Index n = params.meanline.size();
    if (n < 1 || params.thickness.size() != n ||
        params.free_mask.size() != static_cast<std::size_t>(2 * n))
        throw ContractError("write_coefficients: inconsistent coefficient block sizes");
    auto block = [&](const Eigen::VectorXd& v) {
        std::string s = "[";
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (i) s += ", ";
            s += fmt(v[i]);
        }
        return s + "]";
    };
    std::string text = "meanline = " + block(params.meanline) + "\n";
    text += "thickness = " + block(params.thickness) + "\n";
    text += "free_mask = [";
    for (std::size_t i = 0; i < params.free_mask.size(); ++i) {
        if (i) text += ", ";
        text += params.free_mask[i] ? '1' : '0';
    }
    text += "]\n";
    write_text_file(path, text);
}

ShapeParams read_coefficients(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);
    std::vector<double> meanline, thickness, mask;
    bool have_ml = false, have_th = false, have_mask = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = strip(lines[i]);
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(path + " line " + std::to_string(i + 1) + ": expected key = value");
        std::string key = strip(line.substr(0, eq));
        std::vector<double> value = parse_bracket_array(line.substr(eq + 1), path, i + 1);
        bool* seen = nullptr;
        std::vector<double>* target = nullptr;
        if (key == "meanline") { seen = &have_ml; target = &meanline; }
        else if (key == "thickness") { seen = &have_th; target = &thickness; }
        else if (key == "free_mask") { seen = &have_mask; target = &mask; }
        else throw IoError(path + " line " + std::to_string(i + 1) + ": unknown key '" + key + "'");
        if (*seen)
            throw IoError(path + " line " + std::to_string(i + 1) + ": duplicate key '" + key + "'");
        *seen = true;
        *target = value;
    }
    if (!have_ml || !have_th || !have_mask)
        throw IoError(path + ": needs meanline, thickness and free_mask entries");
    if (meanline.empty() || thickness.size() != meanline.size() ||
        mask.size() != 2 * meanline.size())
        throw IoError(path + ": coefficient block sizes are inconsistent");
    ShapeParams params;
    params.meanline = Eigen::Map<const Eigen::VectorXd>(meanline.data(),
                                                        static_cast<Eigen::Index>(meanline.size()));
    params.thickness = Eigen::Map<const Eigen::VectorXd>(thickness.data(),
                                                         static_cast<Eigen::Index>(thickness.size()));
    params.free_mask.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] != 0.0 && mask[i] != 1.0)
            throw IoError(path + ": free_mask entries must be 0 or 1");
        params.free_mask[i] = mask[i] == 1.0;
    }
    return params;
}

} // namespace shapeflow
