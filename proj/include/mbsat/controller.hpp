#pragma once

#include "mbsat/objectives.hpp"
#include "mbsat/random.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mbsat {

enum class Mode { Search = 0, Track = 1 };

const char* to_string(Mode m);

struct AgentDecision {
    Mode mode = Mode::Search;
    std::size_t control = 0;

    friend bool operator==(const AgentDecision&, const AgentDecision&) = default;
};

/// One (mode, control) per agent. Encoded as genes g = mode * |U| + control.
struct JointDecision {
    std::vector<AgentDecision> per_agent;

    [[nodiscard]] std::vector<int> genes(std::size_t n_controls) const;
    static JointDecision from_genes(const std::vector<int>& genes, std::size_t n_controls);

    friend bool operator==(const JointDecision&, const JointDecision&) = default;
};

struct ControllerConfig {
    /// Weight of the search cost; the track cost gets 1 - w.
    double w = 0.5;
    double d_min = 60.0;
    std::size_t population_size = 400;
    /// 0 selects 150 * |U| * |S|.
    std::size_t max_generations = 0;
    double function_tolerance = 1e-4;
    /// Slack for post-hoc separation audits; the optimizer itself enforces d > d_min strictly.
    double constraint_tolerance = 1e-6;
    /// Generations without an improvement of at least function_tolerance before stopping.
    std::size_t stall_generations = 10;
    double elite_fraction = 0.05;
    double crossover_rate = 0.8;
    /// Negative selects 1 / |S|.
    double mutation_rate = -1.0;
    std::size_t tournament_size = 3;
    /// Largest (2|U|)^|S| solve_exhaustive will enumerate.
    std::uint64_t exhaustive_limit = 1'000'000;

    void validate() const;
};

struct ObjectiveValues {
    double search_cost = 1.0;
    double track_cost = 1.0;
    double combined = 1.0;
};

/// Everything the controller needs to know about a single decision epoch.
struct PlanningContext {
    SensorModel sensor;
    AgentMotionConfig agent_motion;
    Arena arena;
    TrackerParams tracker;
    double grid_resolution = 10.0;
};

/// One decision epoch with the track-cost table and per-control miss fields
/// precomputed, so evaluating a candidate costs one field product.
class DecisionProblem {
public:
    DecisionProblem(std::vector<std::vector<ControlAction>> controls, TrackCostTable table,
                    const SensingConfig& sensing, const Arena& arena, double resolution,
                    const SearchMemory* memory, ControllerConfig cfg);

    /// Builds control sets from agent positions and the track-cost table from predicted beliefs.
    static DecisionProblem build(const std::vector<MultiBernoulli>& predicted, const std::vector<AgentState>& agents,
                                 const PlanningContext& ctx, const SearchMemory* memory, const ControllerConfig& cfg);

    [[nodiscard]] std::size_t agents() const { return controls_.size(); }
    [[nodiscard]] std::size_t controls_per_agent() const { return n_controls_; }
    [[nodiscard]] const std::vector<std::vector<ControlAction>>& controls() const { return controls_; }
    [[nodiscard]] const TrackCostTable& table() const { return table_; }
    [[nodiscard]] const ControllerConfig& config() const { return cfg_; }

    [[nodiscard]] ObjectiveValues evaluate(const JointDecision& d) const;
    [[nodiscard]] bool feasible(const JointDecision& d) const;
    [[nodiscard]] AgentState position(std::size_t agent, std::size_t control) const
    {
        return controls_[agent][control].target;
    }
    /// Post-control positions of the searchers in d.
    [[nodiscard]] std::vector<AgentState> searchers(const JointDecision& d) const;

private:
    std::vector<std::vector<ControlAction>> controls_;
    TrackCostTable table_;
    ControllerConfig cfg_;
    std::size_t n_controls_ = 0;
    Eigen::ArrayXXd cell_weights_;                      // cell area / total area
    std::vector<std::vector<Eigen::ArrayXXd>> miss_;    // [agent][control]
    std::vector<std::vector<Eigen::ArrayXXd>> weighted_miss_;  // miss_ times cell_weights_
    bool use_memory_ = false;
    double memory_total_sum_ = 0.0;                     // integral of the stored fields, or sum of stored totals
    double memory_count_ = 0.0;
};

/// Literal evaluation: builds the searchers' field, applies memory, averages
/// the trackers' table entries (track cost 1 when nobody tracks), and
/// combines with weight w on search.
ObjectiveValues evaluate(const JointDecision& decision, const TrackCostTable& table,
                         const std::vector<std::vector<ControlAction>>& agent_controls, const SensingConfig& sensing,
                         const Arena& arena, double resolution, const SearchMemory* memory, const ControllerConfig& cfg);

/// True iff every pair of post-control positions is strictly more than d_min apart.
bool feasible(const JointDecision& decision, const std::vector<std::vector<ControlAction>>& agent_controls,
              double d_min);

struct Solution {
    JointDecision decision;
    ObjectiveValues values;
    std::size_t generations = 0;
    std::size_t evaluations = 0;
    /// GA only: combined cost of the best feasible member of the initial population (infinity if none).
    double initial_best = std::numeric_limits<double>::infinity();
};

/// Genetic algorithm over integer genes; see ControllerConfig for operators.
/// Throws InfeasibleError when no separated decision was found.
Solution solve_ga(const DecisionProblem& problem, RandomStream& rng);

/// Exact minimizer by enumeration, ties broken by the smaller gene vector.
/// Throws SizeError above cfg.exhaustive_limit and InfeasibleError when no
/// decision is feasible.
Solution solve_exhaustive(const DecisionProblem& problem);

} // namespace mbsat
