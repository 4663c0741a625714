#pragma once

// Problem and strategy configuration files: flat key = value lines grouped
// under [section] headers, with # or ; comments. Sections: grid, clock, gas,
// surfaces, inflow, collision, initial_fill, body, strategy. Unknown keys
// are rejected so typos fail loudly instead of silently defaulting.

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsmc/exec.hpp"
#include "dsmc/problem.hpp"

namespace dsmc {

struct LoadedConfig {
    FlowProblem problem;
    StrategyConfig strategy;
    // Every key in file order, as "section.key" -> value, for report echoes.
    std::vector<std::pair<std::string, std::string>> echo;
    std::vector<std::string> warnings;
};

namespace detail_config {

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
    bool used = false;
};

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<Entry> tokenize(std::string_view text) {
    std::vector<Entry> entries;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                             : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto comment = raw.find_first_of("#;");
        if (comment != std::string_view::npos) raw = raw.substr(0, comment);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;

        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": unterminated section header");
            section = trim(std::string_view(stripped).substr(1, stripped.size() - 2));
            if (section.empty())
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": empty section name");
            continue;
        }

        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        Entry e;
        e.section = section;
        e.key = trim(std::string_view(stripped).substr(0, eq));
        e.value = trim(std::string_view(stripped).substr(eq + 1));
        e.line = line_no;
        if (e.section.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": key outside any [section]");
        if (e.key.empty() || e.value.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty key or value");
        for (const auto& prev : entries)
            if (prev.section == e.section && prev.key == e.key)
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": duplicate key " + e.section + "." + e.key);
        entries.push_back(std::move(e));
    }
    return entries;
}

// Keyed access over the token list; lookups mark entries consumed so the
// final sweep can reject leftovers.
class Fields {
  public:
    explicit Fields(std::vector<Entry> entries) : entries_(std::move(entries)) {}

    const std::string* find(const std::string& section, const std::string& key) {
        for (auto& e : entries_)
            if (e.section == section && e.key == key) {
                e.used = true;
                return &e.value;
            }
        return nullptr;
    }

    bool has_section(const std::string& section) const {
        for (const auto& e : entries_)
            if (e.section == section) return true;
        return false;
    }

    std::string require(const std::string& section, const std::string& key) {
        const std::string* v = find(section, key);
        if (!v)
            throw std::invalid_argument("config: missing required key " + section + "." + key);
        return *v;
    }

    double number(const std::string& section, const std::string& key, double fallback) {
        const std::string* v = find(section, key);
        return v ? parse_number(section, key, *v) : fallback;
    }

    std::optional<double> number_opt(const std::string& section, const std::string& key) {
        const std::string* v = find(section, key);
        if (!v) return std::nullopt;
        return parse_number(section, key, *v);
    }

    double required_number(const std::string& section, const std::string& key) {
        return parse_number(section, key, require(section, key));
    }

    int integer(const std::string& section, const std::string& key, int fallback) {
        const std::string* v = find(section, key);
        return v ? parse_integer(section, key, *v) : fallback;
    }

    int required_integer(const std::string& section, const std::string& key) {
        return parse_integer(section, key, require(section, key));
    }

    bool boolean(const std::string& section, const std::string& key, bool fallback) {
        const std::string* v = find(section, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "yes" || *v == "1") return true;
        if (*v == "false" || *v == "no" || *v == "0") return false;
        throw std::invalid_argument("config: " + section + "." + key + " is not a boolean: '" +
                                    *v + "'");
    }

    void reject_unused() const {
        for (const auto& e : entries_)
            if (!e.used)
                throw std::invalid_argument("config line " + std::to_string(e.line) +
                                            ": unknown key " + e.section + "." + e.key);
    }

    std::vector<std::pair<std::string, std::string>> echo() const {
        std::vector<std::pair<std::string, std::string>> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.emplace_back(e.section + "." + e.key, e.value);
        return out;
    }

  private:
    static double parse_number(const std::string& section, const std::string& key,
                               const std::string& v) {
        std::size_t used = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != v.size())
            throw std::invalid_argument("config: " + section + "." + key +
                                        " is not a number: '" + v + "'");
        return out;
    }

    static int parse_integer(const std::string& section, const std::string& key,
                             const std::string& v) {
        std::size_t used = 0;
        int out = 0;
        try {
            out = std::stoi(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != v.size())
            throw std::invalid_argument("config: " + section + "." + key +
                                        " is not an integer: '" + v + "'");
        return out;
    }

    std::vector<Entry> entries_;
};

inline SurfaceKind parse_surface_kind(const std::string& where, const std::string& v) {
    if (v == "vacuum") return SurfaceKind::Vacuum;
    if (v == "specular") return SurfaceKind::Specular;
    if (v == "diffuse") return SurfaceKind::Diffuse;
    throw std::invalid_argument("config: " + where +
                                " must be vacuum, specular, or diffuse, got '" + v + "'");
}

constexpr std::array<std::pair<Face, const char*>, 4> kFaces{
    {{Face::Left, "left"}, {Face::Right, "right"}, {Face::Bottom, "bottom"},
     {Face::Top, "top"}}};

}  // namespace detail_config

inline LoadedConfig parse_config(std::string_view text) {
    using detail_config::Fields;
    using detail_config::kFaces;
    using detail_config::parse_surface_kind;

    Fields f(detail_config::tokenize(text));
    LoadedConfig out;
    FlowProblem& prob = out.problem;

    const std::string kind = f.require("grid", "kind");
    if (kind == "1d") {
        prob.grid = CellGrid::make_1d(f.required_number("grid", "length_x"),
                                      f.required_integer("grid", "cells_x"));
    } else if (kind == "2d") {
        prob.grid = CellGrid::make_2d(
            f.required_number("grid", "length_x"), f.required_number("grid", "length_y"),
            f.required_integer("grid", "cells_x"), f.required_integer("grid", "cells_y"));
    } else {
        throw std::invalid_argument("config: grid.kind must be 1d or 2d, got '" + kind + "'");
    }

    prob.clock.dt = f.required_number("clock", "dt");
    prob.clock.dt_s = f.required_number("clock", "dt_s");
    prob.clock.dt_L = f.required_number("clock", "dt_L");
    prob.clock.dt_av = f.number("clock", "dt_av", prob.clock.dt_s);
    prob.clock.t_H = f.number("clock", "t_H", 0.0);

    prob.particle_weight = f.number("gas", "particle_weight", 1.0);

    const int nfaces = prob.grid.dim == 1 ? 2 : 4;
    for (int i = 0; i < 4; ++i) {
        const auto [face, name] = kFaces[static_cast<std::size_t>(i)];
        const std::string* kind_v = f.find("surfaces", name);
        const auto temp = f.number_opt("surfaces", std::string(name) + "_temperature");
        const auto density = f.number_opt("inflow", std::string(name) + "_density");
        const auto in_temp = f.number_opt("inflow", std::string(name) + "_temperature");
        const auto dx = f.number_opt("inflow", std::string(name) + "_drift_x");
        const auto dy = f.number_opt("inflow", std::string(name) + "_drift_y");
        const auto dz = f.number_opt("inflow", std::string(name) + "_drift_z");
        if (i >= nfaces) {
            if (kind_v || temp || density || in_temp || dx || dy || dz)
                throw std::invalid_argument(std::string("config: face '") + name +
                                            "' requires a 2-D grid");
            continue;
        }
        auto& spec = prob.surfaces[static_cast<std::size_t>(i)];
        if (kind_v) spec.kind = parse_surface_kind(std::string("surfaces.") + name, *kind_v);
        if (temp) spec.temperature = *temp;
        if (density) {
            InflowSpec in;
            in.face = face;
            in.density = *density;
            in.temperature = in_temp.value_or(1.0);
            in.drift = {dx.value_or(0.0), dy.value_or(0.0), dz.value_or(0.0)};
            prob.inflows.push_back(in);
        } else if (in_temp || dx || dy || dz) {
            throw std::invalid_argument(std::string("config: inflow.") + name +
                                        "_density is required to enable an inflow on '" + name +
                                        "'");
        }
    }

    prob.collision.enabled = f.boolean("collision", "enabled", prob.collision.enabled);
    prob.collision.diameter = f.number("collision", "diameter", prob.collision.diameter);
    prob.collision.crmax_initial =
        f.number("collision", "crmax_initial", prob.collision.crmax_initial);

    prob.initial_fill.density = f.number("initial_fill", "density", 0.0);
    prob.initial_fill.temperature = f.number("initial_fill", "temperature", 1.0);
    prob.initial_fill.drift = {f.number("initial_fill", "drift_x", 0.0),
                               f.number("initial_fill", "drift_y", 0.0),
                               f.number("initial_fill", "drift_z", 0.0)};
    {
        const auto min_x = f.number_opt("initial_fill", "min_x");
        const auto max_x = f.number_opt("initial_fill", "max_x");
        const auto min_y = f.number_opt("initial_fill", "min_y");
        const auto max_y = f.number_opt("initial_fill", "max_y");
        if (prob.grid.dim == 1 && (min_y || max_y))
            throw std::invalid_argument("config: initial_fill y bounds require a 2-D grid");
        if (min_x || max_x || min_y || max_y) {
            std::array<Position, 2> region{Position{0.0, 0.0},
                                           Position{prob.grid.extent[0], prob.grid.extent[1]}};
            if (min_x) region[0][0] = *min_x;
            if (max_x) region[1][0] = *max_x;
            if (min_y) region[0][1] = *min_y;
            if (max_y) region[1][1] = *max_y;
            prob.initial_fill.region = region;
        }
    }

    if (f.has_section("body")) {
        BodySpec body;
        body.lo = {f.required_number("body", "min_x"), f.required_number("body", "min_y")};
        body.hi = {f.required_number("body", "max_x"), f.required_number("body", "max_y")};
        const std::string* kind_v = f.find("body", "kind");
        if (kind_v) body.kind = parse_surface_kind("body.kind", *kind_v);
        body.temperature = f.number("body", "temperature", 1.0);
        prob.body = body;
    }

    const std::string* name = f.find("strategy", "name");
    out.strategy.strategy =
        name ? strategy_from_name(*name) : StrategyConfig::Strategy::Sequential;
    out.strategy.n = f.integer("strategy", "n", 1);
    out.strategy.p = f.integer("strategy", "p", 0);
    out.strategy.p1 = f.integer("strategy", "p1", 1);
    out.strategy.p2 = f.integer("strategy", "p2", 1);
    out.strategy.pri = f.number("strategy", "pri", 0.0);

    f.reject_unused();
    out.echo = f.echo();
    out.warnings = prob.validate();
    for (const auto& w : out.strategy.normalize()) out.warnings.push_back(w);
    return out;
}

inline LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace dsmc
