#include "mbsat/scenario.hpp"

#include "mbsat/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace mbsat {

MotionConfig Scenario::filter_motion() const
{
    return MotionConfig::constant_velocity(dt, survival, process_noise_scale);
}

MotionConfig Scenario::truth_motion() const
{
    return MotionConfig::constant_velocity(dt, survival, truth_noise_scale);
}

SensorModel Scenario::sensor() const
{
    return {sensing, noise, clutter};
}

PlanningContext Scenario::planning() const
{
    return {sensor(), agent_motion, arena, tracker, grid_resolution};
}

void Scenario::validate() const
{
    if (horizon < 0) {
        throw ConfigError("horizon must be >= 0");
    }
    arena.validate();
    if (!(dt > 0.0) || !(process_noise_scale >= 0.0) || !(truth_noise_scale >= 0.0)) {
        throw ConfigError("motion: dt must be positive and noise scales non-negative");
    }
    if (!(survival >= 0.0 && survival <= 1.0)) {
        throw ConfigError("motion: survival must lie in [0, 1]");
    }
    sensing.validate();
    noise.validate();
    clutter.validate();
    agent_motion.validate();
    filter.validate();
    birth.validate();
    tracker.validate();
    controller.validate();
    ospa.validate();
    if (!(grid_resolution > 0.0)) {
        throw ConfigError("search: grid_resolution must be positive");
    }
    if (grid_every < 0 || sweep_warmup < 0) {
        throw ConfigError("output.grid_every and sweep.warmup_steps must be >= 0");
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& t = targets[i];
        const std::string where = "targets[" + std::to_string(i) + "]";
        if (t.birth < 0 || t.death > horizon || t.birth > t.death) {
            throw ConfigError(where + ": need 0 <= birth <= death <= horizon");
        }
        for (std::size_t w = 0; w < t.waypoints.size(); ++w) {
            if (w > 0 && t.waypoints[w].k <= t.waypoints[w - 1].k) {
                throw ConfigError(where + ": waypoint times must be strictly increasing");
            }
        }
    }
    const auto& rt = random_targets;
    if (rt.count < 0 || rt.birth_min < 0 || rt.birth_max < rt.birth_min || rt.spawn_radius < 0.0
        || rt.speed_std < 0.0 || (rt.count > 0 && rt.birth_max > horizon)) {
        throw ConfigError("random_targets: need count >= 0, 0 <= birth_min <= birth_max <= horizon, "
                          "non-negative spawn_radius and speed_std");
    }
    if (rt.death >= 0 && (rt.death > horizon || rt.death < rt.birth_max)) {
        throw ConfigError("random_targets: death must lie in [birth_max, horizon]");
    }
    if (random_spawn) {
        if (agent_count < 1) {
            throw ConfigError("agents: random_spawn needs count >= 1");
        }
        if (!(controller.d_min * agent_count < arena.diagonal())) {
            throw InfeasibleError("agents: d_min * count must be below the arena diagonal for random spawning");
        }
        return;
    }
    if (agents.empty()) {
        throw ConfigError("agents: at least one agent position required");
    }
    for (const auto& a : agents) {
        if (!arena.contains(a.sx, a.sy)) {
            throw ConfigError("agents: initial position outside the arena");
        }
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
        for (std::size_t j = i + 1; j < agents.size(); ++j) {
            const double d = std::hypot(agents[i].sx - agents[j].sx, agents[i].sy - agents[j].sy);
            if (!(d > controller.d_min)) {
                throw InfeasibleError("agents " + std::to_string(i) + " and " + std::to_string(j) + " start "
                                      + std::to_string(d) + " m apart, not more than d_min = "
                                      + std::to_string(controller.d_min));
            }
        }
    }
}

// ---- YAML parsing ----

namespace {

void check_keys(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> allowed)
{
    if (!node.IsMap()) {
        throw ConfigError(section + ": expected a mapping");
    }
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(section + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& section)
{
    if (const YAML::Node v = node[key]) {
        try {
            out = v.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(section + "." + key + ": wrong type");
        }
    }
}

std::vector<double> read_vector(const YAML::Node& v, std::size_t n, const std::string& where)
{
    if (!v.IsSequence() || v.size() != n) {
        throw ConfigError(where + ": expected a list of " + std::to_string(n) + " numbers");
    }
    std::vector<double> out;
    for (const auto& e : v) {
        try {
            out.push_back(e.as<double>());
        } catch (const YAML::Exception&) {
            throw ConfigError(where + ": expected numbers");
        }
    }
    return out;
}

Scenario from_yaml(const YAML::Node& root)
{
    Scenario sc;
    check_keys(root, "scenario",
               {"name", "horizon", "seed", "arena", "motion", "truth", "sensing", "noise", "clutter", "agent_motion",
                "filter", "birth", "tracker", "controller", "search", "ospa", "agents", "targets", "random_targets",
                "output", "sweep"});
    read(root, "name", sc.name, "scenario");
    read(root, "horizon", sc.horizon, "scenario");
    read(root, "seed", sc.seed, "scenario");

    if (const auto n = root["arena"]) {
        check_keys(n, "arena", {"width", "height"});
        read(n, "width", sc.arena.width, "arena");
        read(n, "height", sc.arena.height, "arena");
    }
    sc.clutter = ClutterConfig::for_arena(sc.clutter.rate, sc.arena);

    if (const auto n = root["motion"]) {
        check_keys(n, "motion", {"dt", "survival", "process_noise_scale"});
        read(n, "dt", sc.dt, "motion");
        read(n, "survival", sc.survival, "motion");
        read(n, "process_noise_scale", sc.process_noise_scale, "motion");
    }
    if (const auto n = root["truth"]) {
        check_keys(n, "truth", {"process_noise_scale", "stochastic_survival", "arena_margin"});
        read(n, "process_noise_scale", sc.truth_noise_scale, "truth");
        read(n, "stochastic_survival", sc.stochastic_survival, "truth");
        read(n, "arena_margin", sc.arena_margin, "truth");
    }
    if (const auto n = root["sensing"]) {
        check_keys(n, "sensing", {"pd_max", "eta", "r0"});
        read(n, "pd_max", sc.sensing.pd_max, "sensing");
        read(n, "eta", sc.sensing.eta, "sensing");
        read(n, "r0", sc.sensing.r0, "sensing");
    }
    if (const auto n = root["noise"]) {
        check_keys(n, "noise", {"phi0", "beta_phi", "zeta0", "beta_zeta"});
        read(n, "phi0", sc.noise.phi0, "noise");
        read(n, "beta_phi", sc.noise.beta_phi, "noise");
        read(n, "zeta0", sc.noise.zeta0, "noise");
        read(n, "beta_zeta", sc.noise.beta_zeta, "noise");
    }
    if (const auto n = root["clutter"]) {
        check_keys(n, "clutter", {"rate", "bearing_min", "bearing_max", "range_min", "range_max"});
        read(n, "rate", sc.clutter.rate, "clutter");
        read(n, "bearing_min", sc.clutter.bearing_min, "clutter");
        read(n, "bearing_max", sc.clutter.bearing_max, "clutter");
        read(n, "range_min", sc.clutter.range_min, "clutter");
        read(n, "range_max", sc.clutter.range_max, "clutter");
    }
    if (const auto n = root["agent_motion"]) {
        check_keys(n, "agent_motion", {"delta_r", "n_r", "n_theta"});
        read(n, "delta_r", sc.agent_motion.delta_r, "agent_motion");
        read(n, "n_r", sc.agent_motion.n_r, "agent_motion");
        read(n, "n_theta", sc.agent_motion.n_theta, "agent_motion");
    }
    if (const auto n = root["filter"]) {
        check_keys(n, "filter", {"prune_threshold", "max_components", "resample_threshold", "particles_per_component"});
        read(n, "prune_threshold", sc.filter.prune_threshold, "filter");
        read(n, "max_components", sc.filter.max_components, "filter");
        read(n, "resample_threshold", sc.filter.resample_threshold, "filter");
        read(n, "particles_per_component", sc.filter.particles_per_component, "filter");
    }
    if (const auto n = root["birth"]) {
        check_keys(n, "birth", {"n_birth", "r_birth", "particles_per_birth", "velocity_std"});
        read(n, "n_birth", sc.birth.n_birth, "birth");
        read(n, "r_birth", sc.birth.r_birth, "birth");
        read(n, "particles_per_birth", sc.birth.particles_per_birth, "birth");
        read(n, "velocity_std", sc.birth.velocity_std, "birth");
    }
    if (const auto n = root["tracker"]) {
        check_keys(n, "tracker", {"v_cap"});
        read(n, "v_cap", sc.tracker.v_cap, "tracker");
    }
    if (const auto n = root["controller"]) {
        check_keys(n, "controller",
                   {"w", "d_min", "population_size", "max_generations", "function_tolerance", "constraint_tolerance",
                    "stall_generations", "elite_fraction", "crossover_rate", "mutation_rate", "tournament_size",
                    "exhaustive_limit", "solver"});
        auto& c = sc.controller;
        read(n, "w", c.w, "controller");
        read(n, "d_min", c.d_min, "controller");
        read(n, "population_size", c.population_size, "controller");
        read(n, "max_generations", c.max_generations, "controller");
        read(n, "function_tolerance", c.function_tolerance, "controller");
        read(n, "constraint_tolerance", c.constraint_tolerance, "controller");
        read(n, "stall_generations", c.stall_generations, "controller");
        read(n, "elite_fraction", c.elite_fraction, "controller");
        read(n, "crossover_rate", c.crossover_rate, "controller");
        read(n, "mutation_rate", c.mutation_rate, "controller");
        read(n, "tournament_size", c.tournament_size, "controller");
        read(n, "exhaustive_limit", c.exhaustive_limit, "controller");
        std::string solver = "ga";
        read(n, "solver", solver, "controller");
        if (solver == "ga") {
            sc.solver = Solver::Genetic;
        } else if (solver == "exhaustive") {
            sc.solver = Solver::Exhaustive;
        } else {
            throw ConfigError("controller.solver: expected 'ga' or 'exhaustive'");
        }
    }
    if (const auto n = root["search"]) {
        check_keys(n, "search", {"grid_resolution", "memory"});
        read(n, "grid_resolution", sc.grid_resolution, "search");
        if (const auto m = n["memory"]) {
            check_keys(m, "search.memory", {"enabled", "kappa", "mode"});
            read(m, "enabled", sc.memory.enabled, "search.memory");
            read(m, "kappa", sc.memory.kappa, "search.memory");
            std::string mode = "field";
            read(m, "mode", mode, "search.memory");
            if (mode == "field") {
                sc.memory.mode = SearchMemory::Mode::Field;
            } else if (mode == "scalar") {
                sc.memory.mode = SearchMemory::Mode::Scalar;
            } else {
                throw ConfigError("search.memory.mode: expected 'field' or 'scalar'");
            }
        }
    }
    if (const auto n = root["ospa"]) {
        check_keys(n, "ospa", {"c", "p"});
        read(n, "c", sc.ospa.c, "ospa");
        read(n, "p", sc.ospa.p, "ospa");
    }
    if (const auto n = root["agents"]) {
        check_keys(n, "agents", {"positions", "random_spawn", "count"});
        read(n, "random_spawn", sc.random_spawn, "agents");
        read(n, "count", sc.agent_count, "agents");
        if (const auto p = n["positions"]) {
            if (!p.IsSequence()) {
                throw ConfigError("agents.positions: expected a list of [x, y]");
            }
            for (const auto& e : p) {
                const auto v = read_vector(e, 2, "agents.positions");
                sc.agents.push_back({v[0], v[1]});
            }
        }
    }
    if (const auto n = root["targets"]) {
        if (!n.IsSequence()) {
            throw ConfigError("targets: expected a list");
        }
        for (const auto& t : n) {
            check_keys(t, "targets[]", {"birth", "death", "initial", "waypoints"});
            ScheduledTarget st;
            read(t, "birth", st.birth, "targets[]");
            read(t, "death", st.death, "targets[]");
            if (const auto init = t["initial"]) {
                const auto v = read_vector(init, 4, "targets[].initial");
                st.initial = {v[0], v[1], v[2], v[3]};
            }
            if (const auto wp = t["waypoints"]) {
                if (!wp.IsSequence() || wp.size() == 0) {
                    throw ConfigError("targets[].waypoints: expected a non-empty list of [k, x, y]");
                }
                for (const auto& e : wp) {
                    const auto v = read_vector(e, 3, "targets[].waypoints");
                    st.waypoints.push_back({static_cast<int>(v[0]), v[1], v[2]});
                }
            }
            if (!t["initial"] && !t["waypoints"]) {
                throw ConfigError("targets[]: either 'initial' or 'waypoints' is required");
            }
            sc.targets.push_back(std::move(st));
        }
    }
    if (const auto n = root["random_targets"]) {
        check_keys(n, "random_targets", {"count", "birth_min", "birth_max", "death", "spawn_radius", "speed_std"});
        auto& rt = sc.random_targets;
        read(n, "count", rt.count, "random_targets");
        read(n, "birth_min", rt.birth_min, "random_targets");
        read(n, "birth_max", rt.birth_max, "random_targets");
        read(n, "death", rt.death, "random_targets");
        read(n, "spawn_radius", rt.spawn_radius, "random_targets");
        read(n, "speed_std", rt.speed_std, "random_targets");
    }
    if (const auto n = root["output"]) {
        check_keys(n, "output", {"grid_every"});
        read(n, "grid_every", sc.grid_every, "output");
    }
    if (const auto n = root["sweep"]) {
        check_keys(n, "sweep", {"warmup_steps"});
        read(n, "warmup_steps", sc.sweep_warmup, "sweep");
    }
    return sc;
}

} // namespace

Scenario parse_scenario(const std::string& yaml_text)
{
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("scenario is not valid YAML: ") + e.what());
    }
    if (!root || root.IsNull()) {
        root = YAML::Node(YAML::NodeType::Map);
    }
    Scenario sc = from_yaml(root);
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario file " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

} // namespace mbsat
