#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lsinf/metric.hpp"

namespace lsinf {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Structure-definition files use a small TOML subset (full schema in
 * docs/config.md):
 *   - [section] and [section.sub] table headers
 *   - key = value with value one of: number, "string", true/false,
 *     [array, ...] (arrays may nest one level for frame/metric rows)
 *   - '#' comments, blank lines
 */

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
    std::variant<double, bool, std::string, TomlArray> v;

    bool is_number() const { return std::holds_alternative<double>(v); }
    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_array() const { return std::holds_alternative<TomlArray>(v); }
    double num() const { return std::get<double>(v); }
    const std::string& str() const { return std::get<std::string>(v); }
    bool boolean() const { return std::get<bool>(v); }
    const TomlArray& array() const { return std::get<TomlArray>(v); }
};

using TomlTable = std::map<std::string, TomlValue>;

namespace detail {

inline void toml_skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline TomlValue toml_value(const std::string& s, std::size_t& i, int line);

inline TomlValue toml_scalar(const std::string& s, std::size_t& i, int line) {
    toml_skip_ws(s, i);
    if (i >= s.size()) throw config_error("config line " + std::to_string(line) + ": missing value");
    char c = s[i];
    if (c == '"') {
        std::size_t end = s.find('"', i + 1);
        if (end == std::string::npos)
            throw config_error("config line " + std::to_string(line) + ": unterminated string");
        TomlValue v{std::string(s.substr(i + 1, end - i - 1))};
        i = end + 1;
        return v;
    }
    if (s.compare(i, 4, "true") == 0) {
        i += 4;
        return TomlValue{true};
    }
    if (s.compare(i, 5, "false") == 0) {
        i += 5;
        return TomlValue{false};
    }
    std::size_t end = i;
    while (end < s.size() && std::string("+-0123456789.eE").find(s[end]) != std::string::npos) ++end;
    if (end == i)
        throw config_error("config line " + std::to_string(line) + ": unrecognized value");
    try {
        TomlValue v{std::stod(s.substr(i, end - i))};
        i = end;
        return v;
    } catch (...) {
        throw config_error("config line " + std::to_string(line) + ": bad number");
    }
}

inline TomlValue toml_value(const std::string& s, std::size_t& i, int line) {
    toml_skip_ws(s, i);
    if (i < s.size() && s[i] == '[') {
        ++i;
        TomlArray arr;
        toml_skip_ws(s, i);
        if (i < s.size() && s[i] == ']') {
            ++i;
            return TomlValue{arr};
        }
        for (;;) {
            arr.push_back(toml_value(s, i, line));
            toml_skip_ws(s, i);
            if (i < s.size() && s[i] == ',') {
                ++i;
                continue;
            }
            if (i < s.size() && s[i] == ']') {
                ++i;
                return TomlValue{arr};
            }
            throw config_error("config line " + std::to_string(line) + ": expected ',' or ']'");
        }
    }
    return toml_scalar(s, i, line);
}

}  // namespace detail

/// Parses the config text into nested tables keyed "section.key".
inline std::map<std::string, TomlTable> parse_toml(const std::string& text) {
    std::map<std::string, TomlTable> tables;
    std::string current;  // "" = root table
    std::istringstream in(text);
    std::string rawline;
    int line = 0;
    while (std::getline(in, rawline)) {
        ++line;
        std::string s = rawline;
        if (!s.empty() && s.back() == '\r') s.pop_back();
        std::size_t i = 0;
        detail::toml_skip_ws(s, i);
        if (i >= s.size() || s[i] == '#') continue;
        if (s[i] == '[') {
            std::size_t end = s.find(']', i);
            if (end == std::string::npos)
                throw config_error("config line " + std::to_string(line) + ": bad table header");
            current = s.substr(i + 1, end - i - 1);
            tables[current];
            continue;
        }
        std::size_t eq = s.find('=', i);
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(line) + ": expected key = value");
        std::string key = s.substr(i, eq - i);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::size_t vi = eq + 1;
        TomlValue val = detail::toml_value(s, vi, line);
        detail::toml_skip_ws(s, vi);
        if (vi < s.size() && s[vi] != '#')
            throw config_error("config line " + std::to_string(line) + ": trailing characters");
        tables[current][key] = std::move(val);
    }
    return tables;
}

// ---------------------------------------------------------------------------

/// Parsed structure-definition file: chart, frame (builtin or custom rows),
/// metric, probe parameters, seed and output options.
struct StructureConfig {
    int n = 2, k = 1;
    std::string builtin;                         // empty for custom frames
    int base_count = 1;                          // edge-type base/fiber split
    std::vector<std::vector<std::string>> rows;  // custom frame rows
    bool metric_identity = true;
    std::vector<std::vector<std::string>> metric_rows;
    std::uint64_t seed = 1;
    std::map<std::string, TomlTable> raw;

    // geodesic parameters
    std::vector<double> start;
    std::vector<double> direction;
    double T = 1.0;
    double dt = 1e-3;
};

inline StructureConfig parse_structure_config(const std::string& text) {
    auto tables = parse_toml(text);
    StructureConfig cfg;
    cfg.raw = tables;
    auto get = [&](const std::string& table, const std::string& key) -> const TomlValue* {
        auto t = tables.find(table);
        if (t == tables.end()) return nullptr;
        auto k2 = t->second.find(key);
        if (k2 == t->second.end()) return nullptr;
        return &k2->second;
    };
    auto need_num = [&](const TomlValue* v, const char* what) {
        if (!v || !v->is_number()) throw config_error(std::string("config: missing number ") + what);
        return v->num();
    };
    cfg.n = static_cast<int>(need_num(get("chart", "n"), "chart.n"));
    cfg.k = static_cast<int>(need_num(get("chart", "k"), "chart.k"));
    if (const auto* v = get("", "seed")) cfg.seed = static_cast<std::uint64_t>(v->num());
    if (const auto* v = get("structure", "builtin")) {
        if (!v->is_string()) throw config_error("config: structure.builtin must be a string");
        cfg.builtin = v->str();
    }
    if (const auto* v = get("structure", "base_count"))
        cfg.base_count = static_cast<int>(v->num());
    if (const auto* v = get("structure", "rows")) {
        if (!v->is_array()) throw config_error("config: structure.rows must be an array of rows");
        for (const auto& row : v->array()) {
            if (!row.is_array()) throw config_error("config: frame row must be an array");
            std::vector<std::string> r;
            for (const auto& cell : row.array()) {
                if (!cell.is_string()) throw config_error("config: frame entries are strings");
                r.push_back(cell.str());
            }
            cfg.rows.push_back(std::move(r));
        }
    }
    if (cfg.builtin.empty() && cfg.rows.empty())
        throw config_error("config: need structure.builtin or structure.rows");
    if (const auto* v = get("metric", "identity")) cfg.metric_identity = v->boolean();
    if (const auto* v = get("metric", "rows")) {
        cfg.metric_identity = false;
        for (const auto& row : v->array()) {
            std::vector<std::string> r;
            for (const auto& cell : row.array()) {
                if (!cell.is_string()) throw config_error("config: metric entries are strings");
                r.push_back(cell.str());
            }
            cfg.metric_rows.push_back(std::move(r));
        }
    }
    if (const auto* v = get("geodesic", "start"))
        for (const auto& c : v->array()) cfg.start.push_back(c.num());
    if (const auto* v = get("geodesic", "direction"))
        for (const auto& c : v->array()) cfg.direction.push_back(c.num());
    if (const auto* v = get("geodesic", "T")) cfg.T = v->num();
    if (const auto* v = get("geodesic", "dt")) cfg.dt = v->num();
    return cfg;
}

/// Instantiates the algebroid + metric described by a config.
struct StructureInstance {
    Chart chart;
    Algebroid algebroid;
    MetricOnA metric;
};

inline StructureInstance instantiate(const StructureConfig& cfg) {
    Chart chart(cfg.n, cfg.k);
    Algebroid alg = [&] {
        if (!cfg.builtin.empty()) {
            auto b = builtin_from_name(cfg.builtin);
            if (!b) throw config_error("config: unknown builtin structure '" + cfg.builtin + "'");
            return builtin_algebroid(*b, chart, cfg.base_count);
        }
        std::vector<std::vector<Expr>> rows;
        for (const auto& r : cfg.rows) {
            std::vector<Expr> row;
            for (const auto& cell : r) {
                try {
                    row.push_back(chart.parse(cell));
                } catch (const parse_error& e) {
                    throw config_error(std::string("config: bad frame expression: ") + e.what());
                }
            }
            rows.push_back(std::move(row));
        }
        return make_algebroid(chart, std::move(rows));
    }();
    MetricOnA metric = [&] {
        if (cfg.metric_identity) return MetricOnA::identity(alg.rank);
        std::vector<std::vector<Expr>> rows;
        for (const auto& r : cfg.metric_rows) {
            std::vector<Expr> row;
            for (const auto& cell : r) {
                try {
                    row.push_back(chart.parse(cell));
                } catch (const parse_error& e) {
                    throw config_error(std::string("config: bad metric expression: ") + e.what());
                }
            }
            rows.push_back(std::move(row));
        }
        if (rows.size() != alg.rank)
            throw config_error("config: metric rank != frame rank");
        return MetricOnA::from_rows(std::move(rows));
    }();
    return {chart, std::move(alg), std::move(metric)};
}

}  // namespace lsinf
