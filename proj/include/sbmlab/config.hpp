#pragma once

#include "sbmlab/drift.hpp"
#include "sbmlab/grid.hpp"
#include "sbmlab/log_laplace.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbm {

/// Config problem tied to a dotted key path such as "grid.N".
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& what);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Nested key-value experiment config (YAML) with dotted-path access.
class Config {
public:
    Config() : root_(YAML::NodeType::Map) {}
    explicit Config(YAML::Node root);

    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);
    static Config preset(const std::string& name);
    static std::vector<std::string> preset_names();

    bool has(const std::string& path) const;
    /// Required value; throws SchemaError naming `path` when missing or mistyped.
    template <class T>
    T get(const std::string& path) const;
    template <class T>
    T get_or(const std::string& path, const T& fallback) const;
    YAML::Node node(const std::string& path) const;

    /// `key=value` with a dotted key; the value is parsed as YAML.
    void apply_override(const std::string& assignment);
    void set(const std::string& path, const YAML::Node& value);

    /// Canonical text (keys sorted) used for hashing and echoing.
    std::string canonical() const;
    /// FNV-1a of the canonical text with the seed removed.
    std::uint64_t hash() const;

    const YAML::Node& root() const { return root_; }

private:
    YAML::Node lookup(const std::string& path) const;
    YAML::Node root_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

Grid1D grid_from(const Config& c, const std::string& prefix = "grid");
FlowOptions flow_from(const Config& c, const std::string& prefix = "pde");
MeasureSpec measure_from(const Config& c, const std::string& path);
DriftSpec drift_from(const Config& c, const std::string& prefix = "drift");
TruncationLevel level_from(const Config& c, const std::string& path);
/// List of [location, mass] pairs; mass may be "inf".
std::vector<PointMass> atoms_from(const Config& c, const std::string& path);
/// Field from {type: indicator|gaussian|zero|constant, ...}.
Field field_from(const Config& c, const std::string& path, const Grid1D& grid);

}  // namespace sbm
