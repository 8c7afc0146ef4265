#pragma once

#include "mbsat/controller.hpp"
#include "mbsat/metrics.hpp"
#include "mbsat/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mbsat {

struct AgentRecord {
    AgentState state;       ///< position after the control was applied
    Mode mode = Mode::Search;
    std::size_t control = 0;
    int n_hat = 0;
};

struct StepRecord {
    int k = 0;
    std::vector<AgentRecord> agents;
    int global_n_hat = 0;
    std::vector<TargetState> estimates;
    std::vector<TargetState> truth;
    ObjectiveValues objective;
    /// Instantaneous search cost of the searchers' field (no memory).
    double instantaneous_search_cost = 1.0;
    double ospa = 0.0;
    std::size_t generations = 0;
};

struct RunResult {
    std::vector<StepRecord> steps;
    /// Searchers' instantaneous field at the steps selected by Scenario::grid_every.
    std::map<int, SearchGrid> grids;
};

/// Executes the scenario with its own seed. Deterministic.
RunResult run_scenario(const Scenario& sc);

struct MonteCarloResult {
    std::size_t trials = 0;
    SeriesStatistics search_cost;
    SeriesStatistics track_cost;
    SeriesStatistics ospa;
    SeriesStatistics n_hat;
    std::vector<RunResult> runs;
};

/// Trial t runs with seed seed_base + t; trials run on `threads` worker
/// threads (0 = hardware concurrency) and the result does not depend on it.
MonteCarloResult run_monte_carlo(const Scenario& sc, std::size_t trials, std::uint64_t seed_base,
                                 unsigned threads = 0, bool keep_runs = false);

struct SweepPoint {
    /// Weight given to tracking; the controller's search weight is 1 - tracking_weight.
    double tracking_weight = 0.0;
    JointDecision decision;
    ObjectiveValues values;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    TrackCostTable table;
    std::vector<AgentState> agents;
    /// Per-agent cardinality statistics of the warmed-up belief.
    std::vector<CardinalityEstimate> cardinality;
};

/// Warms the filters up with agents held at their initial positions, then
/// solves the single-step decision for each tracking weight. Uses the exact
/// solver when the instance is small enough, otherwise the GA.
SweepResult sweep_w(const Scenario& sc, const std::vector<double>& tracking_weights);

struct OracleCase {
    std::uint64_t seed = 0;
    double ga_cost = 0.0;
    double exact_cost = 0.0;
    bool same_decision = false;
};

struct OracleReport {
    std::vector<OracleCase> cases;
    double max_gap = 0.0;
    std::size_t matches = 0;
    std::size_t within_tolerance = 0;
};

/// GA against exhaustive enumeration on random instances: agents placed with
/// some pairs close to d_min, random localized beliefs, table from real
/// pseudo-updates. Seeds are 0 .. seeds-1.
OracleReport oracle_check(std::size_t agents, std::size_t seeds, const Scenario& base = {},
                          double tolerance = 0.01);

// ---- Output ----

void write_trace_csv(const RunResult& run, std::ostream& out);
/// Writes trace.csv, ospa.csv, searchgrid_<k>.csv and summary.json into dir.
void write_run_outputs(const Scenario& sc, const RunResult& run, const std::filesystem::path& dir);
/// Writes mc.csv (per-step means/stds), ospa.csv and summary.json into dir.
void write_monte_carlo_outputs(const Scenario& sc, const MonteCarloResult& mc, std::uint64_t seed_base,
                               const std::filesystem::path& dir);
std::string scenario_json(const Scenario& sc);

} // namespace mbsat
