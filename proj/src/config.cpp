#include "sbmlab/config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sbm {

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : path) {
        if (ch == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    for (const auto& p : parts)
        if (p.empty()) throw SchemaError(path, "empty component in key path");
    return parts;
}

void emit_sorted(YAML::Emitter& out, const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Map: {
            std::map<std::string, YAML::Node> sorted;
            for (const auto& kv : node) sorted.emplace(kv.first.as<std::string>(), kv.second);
            out << YAML::BeginMap;
            for (const auto& [k, v] : sorted) {
                out << YAML::Key << k << YAML::Value;
                emit_sorted(out, v);
            }
            out << YAML::EndMap;
            break;
        }
        case YAML::NodeType::Sequence:
            out << YAML::Flow << YAML::BeginSeq;
            for (const auto& v : node) emit_sorted(out, v);
            out << YAML::EndSeq;
            break;
        case YAML::NodeType::Scalar: out << node.Scalar(); break;
        default: out << YAML::Null; break;
    }
}

// Built-in presets; every physical parameter is spelled out.
const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> table = {
        {"h0-smoke", R"(
seed: 20240601
paths: 2000
grid: {L: 5, N: 201}
pde: {dt: 0.0005, startup_levels: 8}
spde: {dt: 0.001, scheme: feller}
initial: {type: indicator, a: -1, b: 1, height: 1}
duality: {mode: h0, t: 0.25, thetas: [1.0]}
)"},
        {"immigration", R"(
seed: 20240602
paths: 4000
grid: {L: 5, N: 201}
pde: {dt: 0.0005, startup_levels: 8}
spde: {dt: 0.001, scheme: feller}
initial: {type: indicator, a: -1, b: 1, height: 1}
duality: {mode: immigration, t: 0.25, a: 1.0, thetas: [0.5, 1.0, 2.0]}
)"},
        {"full-h01", R"(
seed: 20240603
paths: 4000
grid: {L: 5, N: 201}
pde: {dt: 0.001, startup_levels: 8}
spde: {dt: 0.0005, scheme: feller}
drift: {b0: 0, b1: 1}
initial: {type: indicator, a: -1, b: 1, height: 1}
mu: [[0, 1]]
dual: {warm_start: 0.001}
duality: {mode: full, t: 0.1, levels: [5, 10, 20, 40], rhs_paths: 4000}
)"},
        {"pde-delta", R"(
seed: 1
grid: {L: 10, N: 2001}
pde: {dt: 0.001, startup_levels: 8, t: 0.5, curve: true}
mu: [[0, 1]]
)"},
        {"pde-singular", R"(
seed: 1
grid: {L: 6, N: 2401}
pde: {dt: 0.0005, startup_levels: 8, t: 0.25, warm_start: 0.001, profile_csv: true}
mu: [[0, inf]]
)"},
        {"dual-h01", R"(
seed: 7
paths: 200
grid: {L: 5, N: 201}
pde: {dt: 0.001, startup_levels: 8}
drift: {b0: 0, b1: 1}
mu: [[0, 1]]
dual: {horizon: 0.2, level: 40, warm_start: 0.001, snapshots: [0.1, 0.2]}
)"},
        {"branching-small", R"(
seed: 11
paths: 1000
grid: {L: 5, N: 201}
pde: {dt: 0.001, startup_levels: 8}
mu: [[0, 1]]
branching: {horizon: 0.05, nu_bar: 1.0, population_cap: 1000000}
)"},
        {"coupling", R"(
seed: 13
paths: 1000
grid: {L: 5, N: 1001}
pde: {dt: 0.001, startup_levels: 8}
drift: {b0: 0, b1: 1}
mu: [[0, 1]]
dual: {horizon: 0.2, level: inf, warm_start: 0.001}
branching: {horizon: 0.2, nu_bar: 1.0, couple: true}
)"},
        {"spde-mass", R"(
seed: 17
paths: 1000
grid: {L: 5, N: 201}
spde: {dt: 0.001, horizon: 0.25, scheme: feller, snapshots: [0.1, 0.25]}
drift: {b0: 0, b1: 0}
initial: {type: indicator, a: -1, b: 1, height: 1}
)"},
        {"sde-bessel", R"(
seed: 19
paths: 2000
drift: {b0: 0, b1: 0.5}
sde: {x0: 0, dt: 0.001, horizon: 1.0, policies: [strict, escape], eps: [0, 0.001, 0.01]}
)"},
        {"cozero-thm", R"(
seed: 23
paths: 200
grid: {L: 4, N: 161}
spde: {dt: 0.001, scheme: feller}
drift: {b0: 0, b1: 1}
initial: {type: indicator, a: -0.5, b: 0.5, height: 1}
cozero: {t: 0.1, eps: 0}
)"},
    };
    return table;
}

}  // namespace

SchemaError::SchemaError(std::string path, const std::string& what)
    : std::runtime_error(fmt::format("config field '{}': {}", path, what)), path_(std::move(path)) {}

Config::Config(YAML::Node root) : root_(std::move(root)) {
    if (!root_.IsMap()) throw SchemaError("<root>", "config must be a key-value mapping");
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("<file>", fmt::format("cannot open config file '{}'", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    try {
        return Config(YAML::Load(text));
    } catch (const YAML::Exception& e) {
        throw SchemaError("<root>", fmt::format("YAML parse error: {}", e.what()));
    }
}

Config Config::preset(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) throw SchemaError("--preset", fmt::format("unknown preset '{}'", name));
    return from_string(it->second);
}

std::vector<std::string> Config::preset_names() {
    std::vector<std::string> names;
    for (const auto& kv : presets()) names.push_back(kv.first);
    return names;
}

YAML::Node Config::lookup(const std::string& path) const {
    // Walk with copies so that missing keys never insert nodes.
    YAML::Node cur = YAML::Clone(root_);
    for (const auto& part : split_path(path)) {
        if (!cur.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
        YAML::Node next = cur[part];
        if (!next.IsDefined() || next.IsNull()) return YAML::Node(YAML::NodeType::Undefined);
        cur = next;
    }
    return cur;
}

bool Config::has(const std::string& path) const { return lookup(path).IsDefined(); }

YAML::Node Config::node(const std::string& path) const {
    YAML::Node n = lookup(path);
    if (!n.IsDefined()) throw SchemaError(path, "required field is missing");
    return n;
}

template <class T>
T Config::get(const std::string& path) const {
    YAML::Node n = node(path);
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw SchemaError(path, "value has the wrong type");
    }
}

template <class T>
T Config::get_or(const std::string& path, const T& fallback) const {
    return has(path) ? get<T>(path) : fallback;
}

template double Config::get<double>(const std::string&) const;
template int Config::get<int>(const std::string&) const;
template std::size_t Config::get<std::size_t>(const std::string&) const;
template bool Config::get<bool>(const std::string&) const;
template std::string Config::get<std::string>(const std::string&) const;
template std::vector<double> Config::get<std::vector<double>>(const std::string&) const;
template std::vector<std::string> Config::get<std::vector<std::string>>(const std::string&) const;
template double Config::get_or<double>(const std::string&, const double&) const;
template int Config::get_or<int>(const std::string&, const int&) const;
template std::size_t Config::get_or<std::size_t>(const std::string&, const std::size_t&) const;
template bool Config::get_or<bool>(const std::string&, const bool&) const;
template std::string Config::get_or<std::string>(const std::string&, const std::string&) const;
template std::vector<double> Config::get_or<std::vector<double>>(const std::string&, const std::vector<double>&) const;
template std::vector<std::string> Config::get_or<std::vector<std::string>>(const std::string&,
                                                                           const std::vector<std::string>&) const;

void Config::set(const std::string& path, const YAML::Node& value) {
    const auto parts = split_path(path);
    YAML::Node cur = root_;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next = cur[parts[i]];
        if (!next.IsDefined() || next.IsNull() || !next.IsMap()) {
            if (next.IsDefined() && !next.IsNull() && !next.IsMap())
                throw SchemaError(path, fmt::format("'{}' is not a mapping", parts[i]));
            cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
            next = cur[parts[i]];
        }
        cur.reset(next);
    }
    cur[parts.back()] = value;
}

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw SchemaError(assignment, "override must look like key.path=value");
    const std::string key = assignment.substr(0, eq);
    YAML::Node value;
    try {
        value = YAML::Load(assignment.substr(eq + 1));
    } catch (const YAML::Exception& e) {
        throw SchemaError(key, fmt::format("override value does not parse: {}", e.what()));
    }
    set(key, value);
}

std::string Config::canonical() const {
    YAML::Emitter out;
    emit_sorted(out, root_);
    return out.c_str();
}

std::uint64_t Config::hash() const {
    YAML::Node copy = YAML::Clone(root_);
    copy.remove("seed");
    return fnv1a(Config(copy).canonical());
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Grid1D grid_from(const Config& c, const std::string& prefix) {
    const double L = c.get<double>(prefix + ".L");
    const int N = c.get<int>(prefix + ".N");
    if (!(L > 0.0)) throw SchemaError(prefix + ".L", "must be positive");
    if (N < 3) throw SchemaError(prefix + ".N", "must be at least 3");
    return Grid1D(L, static_cast<std::size_t>(N));
}

FlowOptions flow_from(const Config& c, const std::string& prefix) {
    FlowOptions o;
    o.dt = c.get_or<double>(prefix + ".dt", o.dt);
    o.startup_levels = c.get_or<int>(prefix + ".startup_levels", o.startup_levels);
    if (!(o.dt >= 1e-9)) throw SchemaError(prefix + ".dt", "time step below the 1e-9 floor");
    if (o.startup_levels < 0) throw SchemaError(prefix + ".startup_levels", "must be >= 0");
    return o;
}

MeasureSpec measure_from(const Config& c, const std::string& path) {
    if (!c.has(path)) return {};
    std::vector<MeasureAtom> atoms;
    if (c.has(path + ".atoms")) {
        const YAML::Node list = c.node(path + ".atoms");
        if (!list.IsSequence()) throw SchemaError(path + ".atoms", "expected a list of [lambda, weight] pairs");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const YAML::Node pair = list[i];
            if (!pair.IsSequence() || pair.size() != 2)
                throw SchemaError(fmt::format("{}.atoms[{}]", path, i), "expected [lambda, weight]");
            atoms.push_back({pair[0].as<double>(), pair[1].as<double>()});
        }
    }
    std::optional<DensityTable> density;
    if (c.has(path + ".density")) {
        DensityTable t;
        t.breakpoints = c.get<std::vector<double>>(path + ".density.breakpoints");
        t.values = c.get<std::vector<double>>(path + ".density.values");
        density = std::move(t);
    }
    try {
        return MeasureSpec(std::move(atoms), std::move(density));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
}

DriftSpec drift_from(const Config& c, const std::string& prefix) {
    const double b0 = c.get<double>(prefix + ".b0");
    const double b1 = c.get<double>(prefix + ".b1");
    try {
        return DriftSpec(measure_from(c, prefix + ".nu1"), measure_from(c, prefix + ".nu2"), b0, b1);
    } catch (const InvalidDrift& e) {
        throw SchemaError(prefix, e.what());
    }
}

TruncationLevel level_from(const Config& c, const std::string& path) {
    const std::string text = c.get_or<std::string>(path, "inf");
    if (text == "inf" || text == "infinity" || text == ".inf") return TruncationLevel::infinity();
    try {
        const double n = std::stod(text);
        if (!(n > 0.0)) throw SchemaError(path, "level must be positive or 'inf'");
        return TruncationLevel::finite(n);
    } catch (const std::logic_error&) {
        throw SchemaError(path, fmt::format("cannot read truncation level '{}'", text));
    }
}

std::vector<PointMass> atoms_from(const Config& c, const std::string& path) {
    std::vector<PointMass> out;
    const YAML::Node list = c.node(path);
    if (!list.IsSequence()) throw SchemaError(path, "expected a list of [location, mass] pairs");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const YAML::Node pair = list[i];
        const std::string where = fmt::format("{}[{}]", path, i);
        if (!pair.IsSequence() || pair.size() != 2) throw SchemaError(where, "expected [location, mass]");
        const std::string m = pair[1].as<std::string>();
        const double mass = (m == "inf" || m == ".inf") ? std::numeric_limits<double>::infinity() : pair[1].as<double>();
        if (!(mass >= 0.0)) throw SchemaError(where, "mass must be nonnegative");
        out.push_back({pair[0].as<double>(), mass});
    }
    return out;
}

Field field_from(const Config& c, const std::string& path, const Grid1D& grid) {
    const std::string type = c.get<std::string>(path + ".type");
    Field f(grid);
    if (type == "zero") return f;
    const double height = c.get_or<double>(path + ".height", 1.0);
    if (!(height >= 0.0)) throw SchemaError(path + ".height", "must be nonnegative");
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double x = grid.x(i);
        if (type == "indicator") {
            const double a = c.get<double>(path + ".a");
            const double b = c.get<double>(path + ".b");
            const double tol = 1e-9 * grid.dx();
            f.values[i] = (x >= a - tol && x <= b + tol) ? height : 0.0;
        } else if (type == "gaussian") {
            const double s = c.get<double>(path + ".sigma");
            f.values[i] = height * std::exp(-0.5 * x * x / (s * s));
        } else if (type == "constant") {
            f.values[i] = height;
        } else {
            throw SchemaError(path + ".type", fmt::format("unknown field type '{}'", type));
        }
    }
    return f;
}

}  // namespace sbm
