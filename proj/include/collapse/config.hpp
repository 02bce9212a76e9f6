#pragma once

/**
 * @file config.hpp
 * @brief Strict JSON run configuration, manifest emission, and run assembly.
 *
 * Unknown keys are rejected everywhere: a silently ignored misspelling is the
 * classic way to invalidate a numerical experiment.  A run directory always
 * receives a manifest.json holding the fully resolved configuration; feeding
 * that manifest back to `simulate --config` reproduces the run byte for byte.
 */

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "collapse/pde_solver.hpp"
#include "collapse/physmap.hpp"
#include "collapse/version.hpp"

namespace collapse {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tagged initial-condition descriptor, mirrored in JSON.
struct IcSpec {
    std::string type;  // smoothed_block | nonsymmetric | self_similar | custom
    // smoothed_block
    double height = 1.0, x_left = -1.0, x_right = 1.0, smoothing_width = 0.25;
    // self_similar
    double B = 1.0, t0 = 1.0, t_start = 0.0, x0 = 0.0;
    // custom
    std::vector<double> x, h;
};

struct RunConfig {
    int version = 1;
    std::string run_id = "run";
    std::optional<double> c;
    std::optional<RockFluidParams> rock_fluid;
    SchemeConfig scheme;
    IcSpec ic;
    std::string output_dir = "out";

    /// The canonical coefficient, whichever way it was supplied.
    double coefficient() const {
        if (c) return *c;
        return reduce(*rock_fluid).c;
    }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

inline double require_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(std::string("missing '") + key + "' in " + where);
    if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number in " + where);
    return j.at(key).get<double>();
}

inline IcSpec parse_ic(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw ConfigError("initial_condition must be an object with a 'type'");
    IcSpec ic;
    ic.type = j.at("type").get<std::string>();
    if (ic.type == "smoothed_block") {
        reject_unknown(j, {"type", "height", "x_left", "x_right", "smoothing_width"},
                       "initial_condition(smoothed_block)");
        ic.height = require_number(j, "height", "smoothed_block");
        ic.x_left = require_number(j, "x_left", "smoothed_block");
        ic.x_right = require_number(j, "x_right", "smoothed_block");
        ic.smoothing_width = require_number(j, "smoothing_width", "smoothed_block");
    } else if (ic.type == "nonsymmetric") {
        reject_unknown(j, {"type"}, "initial_condition(nonsymmetric)");
    } else if (ic.type == "self_similar") {
        reject_unknown(j, {"type", "B", "t0", "t_start", "x0"}, "initial_condition(self_similar)");
        ic.B = require_number(j, "B", "self_similar");
        ic.t0 = require_number(j, "t0", "self_similar");
        ic.t_start = j.contains("t_start") ? require_number(j, "t_start", "self_similar") : 0.0;
        ic.x0 = j.contains("x0") ? require_number(j, "x0", "self_similar") : 0.0;
    } else if (ic.type == "custom") {
        reject_unknown(j, {"type", "x", "h"}, "initial_condition(custom)");
        if (!j.contains("x") || !j.contains("h"))
            throw ConfigError("custom initial_condition needs 'x' and 'h' arrays");
        ic.x = j.at("x").get<std::vector<double>>();
        ic.h = j.at("h").get<std::vector<double>>();
    } else {
        throw ConfigError("unknown initial_condition type '" + ic.type + "'");
    }
    return ic;
}

inline json ic_to_json(const IcSpec& ic) {
    json j;
    j["type"] = ic.type;
    if (ic.type == "smoothed_block") {
        j["height"] = ic.height;
        j["x_left"] = ic.x_left;
        j["x_right"] = ic.x_right;
        j["smoothing_width"] = ic.smoothing_width;
    } else if (ic.type == "self_similar") {
        j["B"] = ic.B;
        j["t0"] = ic.t0;
        j["t_start"] = ic.t_start;
        j["x0"] = ic.x0;
    } else if (ic.type == "custom") {
        j["x"] = ic.x;
        j["h"] = ic.h;
    }
    return j;
}

inline RockFluidParams parse_rock_fluid(const json& j) {
    reject_unknown(j,
                   {"permeability", "block_porosity", "fissure_porosity", "absorption_fraction",
                    "density", "viscosity", "gravity"},
                   "rock_fluid");
    RockFluidParams p;
    p.permeability = require_number(j, "permeability", "rock_fluid");
    p.block_porosity = require_number(j, "block_porosity", "rock_fluid");
    p.fissure_porosity = require_number(j, "fissure_porosity", "rock_fluid");
    p.absorption_fraction = require_number(j, "absorption_fraction", "rock_fluid");
    p.density = require_number(j, "density", "rock_fluid");
    p.viscosity = require_number(j, "viscosity", "rock_fluid");
    if (j.contains("gravity")) p.gravity = require_number(j, "gravity", "rock_fluid");
    return p;
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& root) {
    using detail::reject_unknown;
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    // A manifest wraps the config under "config"; accept it directly.
    if (root.contains("config")) {
        reject_unknown(root, {"artifact", "config"}, "manifest");
        return parse_config(root.at("config"));
    }
    reject_unknown(root,
                   {"version", "run_id", "c", "rock_fluid", "scheme", "dt", "subintervals",
                    "snapshot_every", "stop", "initial_condition", "output_dir"},
                   "config");
    if (!root.contains("version") || !root.at("version").is_number_integer() ||
        root.at("version").get<int>() != 1)
        throw ConfigError("config requires \"version\": 1");

    RunConfig cfg;
    if (root.contains("run_id")) cfg.run_id = root.at("run_id").get<std::string>();
    if (root.contains("c") && root.contains("rock_fluid"))
        throw ConfigError("config specifies both 'c' and 'rock_fluid'; provide exactly one");
    if (!root.contains("c") && !root.contains("rock_fluid"))
        throw ConfigError("config must provide either 'c' or 'rock_fluid'");
    if (root.contains("c")) cfg.c = detail::require_number(root, "c", "config");
    if (root.contains("rock_fluid")) cfg.rock_fluid = detail::parse_rock_fluid(root.at("rock_fluid"));

    if (root.contains("scheme")) {
        const auto s = root.at("scheme").get<std::string>();
        if (s == "explicit")
            cfg.scheme.scheme = Scheme::Explicit;
        else if (s == "implicit")
            cfg.scheme.scheme = Scheme::Implicit;
        else
            throw ConfigError("scheme must be 'explicit' or 'implicit'");
    }
    if (root.contains("dt")) {
        cfg.scheme.dt = detail::require_number(root, "dt", "config");
        if (!(cfg.scheme.dt > 0.0)) throw ConfigError("dt must be positive");
    }
    if (root.contains("subintervals")) {
        if (!root.at("subintervals").is_number_integer())
            throw ConfigError("subintervals must be an integer");
        cfg.scheme.subintervals = root.at("subintervals").get<int>();
    }
    if (root.contains("snapshot_every")) {
        if (!root.at("snapshot_every").is_number_integer())
            throw ConfigError("snapshot_every must be an integer");
        cfg.scheme.snapshot_every = root.at("snapshot_every").get<std::int64_t>();
    }
    if (root.contains("stop")) {
        const auto& st = root.at("stop");
        reject_unknown(st, {"max_time", "min_halfwidth_fraction", "min_height_fraction"}, "stop");
        if (st.contains("max_time"))
            cfg.scheme.stop.max_time = detail::require_number(st, "max_time", "stop");
        if (st.contains("min_halfwidth_fraction"))
            cfg.scheme.stop.min_halfwidth_fraction =
                detail::require_number(st, "min_halfwidth_fraction", "stop");
        if (st.contains("min_height_fraction"))
            cfg.scheme.stop.min_height_fraction =
                detail::require_number(st, "min_height_fraction", "stop");
    }
    if (!root.contains("initial_condition"))
        throw ConfigError("config must provide 'initial_condition'");
    cfg.ic = detail::parse_ic(root.at("initial_condition"));
    if (root.contains("output_dir")) cfg.output_dir = root.at("output_dir").get<std::string>();

    try {
        cfg.scheme.validate();
        if (cfg.rock_fluid) validate(*cfg.rock_fluid);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return parse_config(root);
}

/// Fully resolved configuration (all defaults filled in).
inline nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["version"] = cfg.version;
    j["run_id"] = cfg.run_id;
    if (cfg.c) {
        j["c"] = *cfg.c;
    } else {
        const auto& p = *cfg.rock_fluid;
        j["rock_fluid"] = {{"permeability", p.permeability},
                           {"block_porosity", p.block_porosity},
                           {"fissure_porosity", p.fissure_porosity},
                           {"absorption_fraction", p.absorption_fraction},
                           {"density", p.density},
                           {"viscosity", p.viscosity},
                           {"gravity", p.gravity}};
    }
    j["scheme"] = scheme_name(cfg.scheme.scheme);
    j["dt"] = cfg.scheme.effective_dt();
    j["subintervals"] = cfg.scheme.subintervals;
    j["snapshot_every"] = cfg.scheme.snapshot_every;
    nlohmann::json stop = {{"min_halfwidth_fraction", cfg.scheme.stop.min_halfwidth_fraction},
                           {"min_height_fraction", cfg.scheme.stop.min_height_fraction}};
    if (std::isfinite(cfg.scheme.stop.max_time)) stop["max_time"] = cfg.scheme.stop.max_time;
    j["stop"] = stop;
    j["initial_condition"] = detail::ic_to_json(cfg.ic);
    j["output_dir"] = cfg.output_dir;
    return j;
}

inline nlohmann::json make_manifest(const RunConfig& cfg) {
    nlohmann::json m;
    m["artifact"] = {{"name", kArtifactName}, {"version", kArtifactVersion}};
    m["config"] = config_to_json(cfg);
    return m;
}

inline InitialCondition build_ic(const RunConfig& cfg) {
    const auto& ic = cfg.ic;
    if (ic.type == "smoothed_block")
        return make_smoothed_block(ic.height, ic.x_left, ic.x_right, ic.smoothing_width);
    if (ic.type == "nonsymmetric") return make_nonsymmetric();
    if (ic.type == "self_similar")
        return make_selfsimilar_ic(ic.B, ic.t0, ic.t_start, cfg.coefficient(), ic.x0);
    if (ic.type == "custom") return make_custom(ic.x, ic.h);
    throw ConfigError("unknown initial_condition type '" + ic.type + "'");
}

/// Output directory after the COLLAPSE_SIM_OUT override.
inline std::filesystem::path resolve_output_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("COLLAPSE_SIM_OUT"); env && *env)
        return std::filesystem::path(env);
    return std::filesystem::path(cfg.output_dir);
}

}  // namespace collapse
