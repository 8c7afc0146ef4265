#pragma once

#include "mbsat/controller.hpp"
#include "mbsat/metrics.hpp"
#include "mbsat/models.hpp"
#include "mbsat/objectives.hpp"
#include "mbsat/rfs.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mbsat {

enum class Solver { Genetic, Exhaustive };

/// Targets drawn per run from the "targets" random substream.
struct RandomTargetConfig {
    int count = 0;
    int birth_min = 1;
    int birth_max = 1;
    /// -1 selects the scenario horizon.
    int death = -1;
    /// > 0: spawn uniformly within this distance of a (round-robin) initial agent position.
    double spawn_radius = 0.0;
    double speed_std = 1.0;
};

struct MemoryConfig {
    bool enabled = false;
    std::size_t kappa = 30;
    SearchMemory::Mode mode = SearchMemory::Mode::Field;
};

/// A complete experiment description. Defaults reproduce the reference parameter table.
struct Scenario {
    std::string name = "scenario";
    int horizon = 180;
    std::uint64_t seed = 1;

    Arena arena;
    double dt = 1.0;
    double survival = 0.99;
    /// Process-noise scale of the filter's motion model.
    double process_noise_scale = 1.0;
    /// Process-noise scale used to propagate unscripted ground-truth targets.
    double truth_noise_scale = 1.0;
    bool stochastic_survival = false;
    double arena_margin = 0.0;

    SensingConfig sensing;
    MeasurementNoiseConfig noise;
    ClutterConfig clutter;
    AgentMotionConfig agent_motion;
    FilterConfig filter;
    BirthConfig birth;
    TrackerParams tracker;
    ControllerConfig controller;
    Solver solver = Solver::Genetic;
    double grid_resolution = 10.0;
    MemoryConfig memory;
    OspaConfig ospa;

    std::vector<AgentState> agents;
    /// Draw agent positions uniformly (rejection-sampled for d_min) instead of using `agents`.
    bool random_spawn = false;
    int agent_count = 0;

    std::vector<ScheduledTarget> targets;
    RandomTargetConfig random_targets;

    /// Write searchgrid_<k>.csv every this many steps (0 disables).
    int grid_every = 10;
    /// Static filter warm-up steps before a w-sweep decision.
    int sweep_warmup = 15;

    [[nodiscard]] std::size_t num_agents() const { return random_spawn ? static_cast<std::size_t>(agent_count) : agents.size(); }
    [[nodiscard]] MotionConfig filter_motion() const;
    [[nodiscard]] MotionConfig truth_motion() const;
    [[nodiscard]] SensorModel sensor() const;
    [[nodiscard]] PlanningContext planning() const;

    /// Throws ConfigError for invalid values and InfeasibleError when the
    /// initial agent positions violate the minimum separation.
    void validate() const;
};

Scenario parse_scenario(const std::string& yaml_text);
Scenario load_scenario(const std::filesystem::path& path);

} // namespace mbsat
