#include "shapeflow/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "shapeflow/errors.hpp"

namespace shapeflow {

namespace {

struct RawValue {
    enum class Kind { number, boolean, text, array };
    Kind kind = Kind::number;
    double number = 0.0;
    bool boolean = false;
    std::string text;
    std::vector<double> array;
    int line = 0;
};

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& text, double* out) {
    const std::string t = strip(text);
    if (t.empty()) return false;
    char* end = nullptr;
    *out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

bool identifier_ok(const std::string& s) {
    if (s.empty()) return false;
    for (const char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

[[noreturn]] void fail_line(int line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

RawValue parse_value(const std::string& text, int line) {
    RawValue value;
    value.line = line;
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
        value.kind = RawValue::Kind::text;
        value.text = text.substr(1, text.size() - 2);
        if (value.text.find('"') != std::string::npos)
            fail_line(line, "nested quotes are not supported");
        return value;
    }
    if (text == "true" || text == "false") {
        value.kind = RawValue::Kind::boolean;
        value.boolean = text == "true";
        return value;
    }
    if (text.size() >= 2 && text.front() == '[' && text.back() == ']') {
        value.kind = RawValue::Kind::array;
        const std::string body = text.substr(1, text.size() - 2);
        std::string item;
        std::stringstream stream(body);
        while (std::getline(stream, item, ',')) {
            double number;
            if (!parse_number(item, &number))
                fail_line(line, "array entries must be numbers");
            value.array.push_back(number);
        }
        if (strip(body).empty()) fail_line(line, "empty arrays are not allowed");
        return value;
    }
    if (parse_number(text, &value.number)) {
        value.kind = RawValue::Kind::number;
        return value;
    }
    fail_line(line, "cannot parse value '" + text + "'");
}

std::map<std::string, RawValue> lex_config(const std::string& text) {
    std::map<std::string, RawValue> table;
    std::string section;
    std::stringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        // Strip comments outside quotes.
        bool quoted = false;
        std::string line;
        for (const char c : raw) {
            if (c == '"') quoted = !quoted;
            if (c == '#' && !quoted) break;
            line.push_back(c);
        }
        line = strip(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.size() < 3 || line.back() != ']')
                fail_line(line_no, "malformed section header");
            const std::string name = strip(line.substr(1, line.size() - 2));
            if (!identifier_ok(name))
                fail_line(line_no, "malformed section name '" + name + "'");
            section = name;
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail_line(line_no, "expected 'key = value'");
        const std::string key = strip(line.substr(0, eq));
        if (!identifier_ok(key)) fail_line(line_no, "malformed key '" + key + "'");
        const std::string full = section.empty() ? key : section + "." + key;
        if (table.count(full)) fail_line(line_no, "duplicate key '" + full + "'");
        table.emplace(full, parse_value(strip(line.substr(eq + 1)), line_no));
    }
    return table;
}

/** Typed, consumption-tracked view so leftover keys are reported as unknown. */
class Reader {
  public:
    explicit Reader(std::map<std::string, RawValue> table) : table_(std::move(table)) {}

    bool has(const std::string& key) const { return table_.count(key) != 0; }

    double number(const std::string& key) { return fetch(key, RawValue::Kind::number).number; }

    double number_or(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }

    int integer(const std::string& key) {
        const RawValue& value = fetch(key, RawValue::Kind::number);
        const double v = value.number;
        if (v != static_cast<double>(static_cast<long long>(v)) || std::abs(v) > 1e9)
            fail_line(value.line, "'" + key + "' must be an integer");
        return static_cast<int>(v);
    }

    int integer_or(const std::string& key, int fallback) {
        return has(key) ? integer(key) : fallback;
    }

    bool boolean_or(const std::string& key, bool fallback) {
        return has(key) ? fetch(key, RawValue::Kind::boolean).boolean : fallback;
    }

    std::string text(const std::string& key) { return fetch(key, RawValue::Kind::text).text; }

    std::string text_or(const std::string& key, const std::string& fallback) {
        return has(key) ? text(key) : fallback;
    }

    std::vector<double> array(const std::string& key, size_t size) {
        const RawValue& value = fetch(key, RawValue::Kind::array);
        if (value.array.size() != size)
            fail_line(value.line, "'" + key + "' must have " + std::to_string(size) +
                                      " entries");
        return value.array;
    }

    std::vector<double> array_or(const std::string& key, std::vector<double> fallback) {
        return has(key) ? array(key, fallback.size()) : std::move(fallback);
    }

    /** All keys must have been consumed by now. */
    void finish() const {
        for (const auto& [key, value] : table_)
            if (!used_.count(key))
                throw ConfigError("unknown config key '" + key + "' (line " +
                                  std::to_string(value.line) + ")");
    }

  private:
    const RawValue& fetch(const std::string& key, RawValue::Kind kind) {
        const auto it = table_.find(key);
        if (it == table_.end()) throw ConfigError("missing required config key '" + key + "'");
        used_.insert(key);
        const char* names[] = {"a number", "a boolean", "a string", "an array"};
        if (it->second.kind != kind)
            fail_line(it->second.line,
                      "'" + key + "' must be " + names[static_cast<int>(kind)]);
        return it->second;
    }

    std::map<std::string, RawValue> table_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

std::string fmt(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

} // namespace

const char* run_mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::gd: return "gd";
        case RunMode::hamiltonian: return "hamiltonian";
        case RunMode::both: return "both";
    }
    return "unknown";
}

ProblemConfig parse_config(const std::string& text) {
    Reader reader(lex_config(text));
    ProblemConfig config;

    // Default reference stress: the material's ultimate tensile strength
    // (140 MPa), giving an O(1) stress ratio in the failure integrand.
    config.material = MaterialParams::make(
        reader.number("material.youngs_modulus"), reader.number("material.poisson_ratio"),
        reader.number("material.weibull_module"),
        reader.number_or("material.reference_stress", 1.4e8));

    const auto traction = reader.array("loads.traction", 2);
    config.loads.traction = {traction[0], traction[1]};
    const auto volume_force = reader.array_or("loads.volume_force", {0.0, 0.0});
    config.loads.volume_force = {volume_force[0], volume_force[1]};

    config.length = reader.number("geometry.length");
    require(config.length > 0.0, "geometry.length must be positive");
    config.n_x = reader.integer("geometry.n_x");
    require(config.n_x >= 2, "geometry.n_x must be at least 2");
    config.n_y = reader.integer("geometry.n_y");
    require(config.n_y >= 2, "geometry.n_y must be at least 2");
    config.n_basis = reader.integer_or("geometry.n_basis", 5);
    config.degree = reader.integer_or("geometry.degree", 3);
    require(config.degree >= 1, "geometry.degree must be at least 1");
    require(config.n_basis >= config.degree + 1,
            "geometry.n_basis must be at least geometry.degree + 1");
    config.boundary_height = reader.number("geometry.boundary_height");
    require(config.boundary_height > 0.0, "geometry.boundary_height must be positive");
    config.left_center = reader.number_or("geometry.left_center", config.boundary_height / 2.0);
    config.right_offset = reader.number_or("geometry.right_offset", 0.0);

    const auto center = reader.array("obstacle.center", 2);
    config.obstacle.center = {center[0], center[1]};
    config.obstacle.radius = reader.number("obstacle.radius");
    require(config.obstacle.radius > 0.0, "obstacle.radius must be positive");

    config.weights =
        ObjectiveWeights::make(reader.number("weights.lambda1"), reader.number("weights.lambda2"),
                               reader.number("weights.lambda3"), reader.number("weights.penalty"));

    const std::string mode = reader.text_or("optimizer.mode", "both");
    if (mode == "gd") config.mode = RunMode::gd;
    else if (mode == "hamiltonian") config.mode = RunMode::hamiltonian;
    else if (mode == "both") config.mode = RunMode::both;
    else throw ConfigError("optimizer.mode must be one of gd, hamiltonian, both");

    const double friction = reader.number("optimizer.friction");
    require(friction > 0.0, "optimizer.friction must be positive");
    config.flow = HamiltonianParams::make(
        reader.number("optimizer.mass"), friction, reader.number("optimizer.kappa"),
        reader.number("optimizer.alpha"), reader.number("optimizer.horizon"),
        reader.integer_or("optimizer.friction_exponent", 2));
    config.gd_tol = reader.number_or("optimizer.gd_tol", 1e-5);
    require(config.gd_tol > 0.0, "optimizer.gd_tol must be positive");
    config.gd_max_iter = reader.integer_or("optimizer.gd_max_iter", 200);
    require(config.gd_max_iter >= 1, "optimizer.gd_max_iter must be at least 1");

    config.output_dir = reader.text_or("output.directory", "run");
    require(!config.output_dir.empty(), "output.directory must not be empty");
    config.snapshot_every = reader.integer_or("output.snapshot_every", 10);
    require(config.snapshot_every >= 1, "output.snapshot_every must be at least 1");
    config.write_svg = reader.boolean_or("output.write_svg", true);

    config.clearance_margin = reader.number_or("initial_shape.clearance_margin", 0.01);
    require(config.clearance_margin > 0.0, "initial_shape.clearance_margin must be positive");

    reader.finish();
    return config;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream stream(path);
    if (!stream) throw ConfigError("cannot read config file: " + path);
    std::stringstream buffer;
    buffer << stream.rdbuf();
    return parse_config(buffer.str());
}

std::string manifest_text(const ProblemConfig& c) {
    std::ostringstream out;
    out << "[material]\n"
        << "youngs_modulus = " << fmt(c.material.youngs_modulus) << "\n"
        << "poisson_ratio = " << fmt(c.material.poisson_ratio) << "\n"
        << "weibull_module = " << fmt(c.material.weibull_module) << "\n"
        << "reference_stress = " << fmt(c.material.sigma0) << "\n\n"
        << "[loads]\n"
        << "traction = [" << fmt(c.loads.traction.x()) << ", " << fmt(c.loads.traction.y())
        << "]\n"
        << "volume_force = [" << fmt(c.loads.volume_force.x()) << ", "
        << fmt(c.loads.volume_force.y()) << "]\n\n"
        << "[geometry]\n"
        << "length = " << fmt(c.length) << "\n"
        << "n_x = " << c.n_x << "\n"
        << "n_y = " << c.n_y << "\n"
        << "n_basis = " << c.n_basis << "\n"
        << "degree = " << c.degree << "\n"
        << "boundary_height = " << fmt(c.boundary_height) << "\n"
        << "left_center = " << fmt(c.left_center) << "\n"
        << "right_offset = " << fmt(c.right_offset) << "\n\n"
        << "[obstacle]\n"
        << "center = [" << fmt(c.obstacle.center.x()) << ", " << fmt(c.obstacle.center.y())
        << "]\n"
        << "radius = " << fmt(c.obstacle.radius) << "\n\n"
        << "[weights]\n"
        << "lambda1 = " << fmt(c.weights.lambda1) << "\n"
        << "lambda2 = " << fmt(c.weights.lambda2) << "\n"
        << "lambda3 = " << fmt(c.weights.lambda3) << "\n"
        << "penalty = " << fmt(c.weights.penalty) << "\n\n"
        << "[optimizer]\n"
        << "mode = \"" << run_mode_name(c.mode) << "\"\n"
        << "mass = " << fmt(c.flow.mass) << "\n"
        << "friction = " << fmt(c.flow.friction) << "\n"
        << "kappa = " << fmt(c.flow.kappa) << "\n"
        << "alpha = " << fmt(c.flow.alpha) << "\n"
        << "horizon = " << fmt(c.flow.horizon) << "\n"
        << "friction_exponent = " << c.flow.friction_exponent << "\n"
        << "gd_tol = " << fmt(c.gd_tol) << "\n"
        << "gd_max_iter = " << c.gd_max_iter << "\n\n"
        << "[output]\n"
        << "directory = \"" << c.output_dir << "\"\n"
        << "snapshot_every = " << c.snapshot_every << "\n"
        << "write_svg = " << (c.write_svg ? "true" : "false") << "\n\n"
        << "[initial_shape]\n"
        << "clearance_margin = " << fmt(c.clearance_margin) << "\n";
    return out.str();
}

} // namespace shapeflow
