#pragma once

#include "mbsat/models.hpp"
#include "mbsat/rfs.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <vector>

namespace mbsat {

/// A candidate post-move agent position and its ordinal in the admissible-control list.
struct ControlAction {
    AgentState target;
    std::size_t index = 0;
};

/// Admissible controls of one agent wrapped as indexed actions.
std::vector<ControlAction> control_actions(const AgentState& s, const AgentMotionConfig& cfg, const Arena& arena);

struct TrackerParams {
    /// Designed number of targets one agent can track.
    double v_cap = 5.0;

    void validate() const;
};

// ---- Tracking objective ----

/// Noise-free, clutter-free measurements of the predicted states seen from u.
MeasurementSet generate_pims(const std::vector<TargetState>& predicted, const ControlAction& u);

/// (sigma_tilde - 1) * sqrt(n_hat / v_cap) + 1, clamped to [0, 1].
double track_cost_from_statistics(double sigma_tilde, double n_hat, double v_cap);

/// Tracking cost of moving to u: pseudo-update of the predicted belief with
/// `pims`, then the cost of the resulting existence probabilities with the
/// unrounded sum of r as the target count.
double track_cost(const MultiBernoulli& predicted, const ControlAction& u, const MeasurementSet& pims,
                  const SensorModel& sensor, const TrackerParams& params);

/// Costs c(j, i) of agent j under its i-th control; every entry in [0, 1].
struct TrackCostTable {
    Eigen::MatrixXd costs;

    [[nodiscard]] std::size_t agents() const { return static_cast<std::size_t>(costs.rows()); }
    [[nodiscard]] std::size_t controls() const { return static_cast<std::size_t>(costs.cols()); }
    [[nodiscard]] double at(std::size_t agent, std::size_t control) const
    {
        return costs(static_cast<Eigen::Index>(agent), static_cast<Eigen::Index>(control));
    }
};

/// PIMS are generated from predict_estimate(beliefs[j]); an agent with no
/// confirmed predicted target gets a row of ones. All control sets must have
/// the same length.
TrackCostTable build_track_cost_table(const std::vector<MultiBernoulli>& beliefs,
                                      const std::vector<std::vector<ControlAction>>& controls,
                                      const SensorModel& sensor, const TrackerParams& params);

// ---- Search objective ----

/// Cell-centred raster over the arena. The last row/column may be partial when
/// the arena size is not a multiple of the resolution; cells carry their area.
class SearchGrid {
public:
    SearchGrid() = default;
    SearchGrid(const Arena& arena, double resolution, double fill = 1.0);

    [[nodiscard]] double resolution() const { return resolution_; }
    [[nodiscard]] const Arena& arena() const { return arena_; }
    [[nodiscard]] Eigen::Index cols() const { return values_.cols(); }
    [[nodiscard]] Eigen::Index rows() const { return values_.rows(); }
    /// values(row, col); row indexes y, col indexes x.
    [[nodiscard]] const Eigen::ArrayXXd& values() const { return values_; }
    [[nodiscard]] Eigen::ArrayXXd& values() { return values_; }
    [[nodiscard]] const Eigen::ArrayXXd& cell_areas() const { return areas_; }
    [[nodiscard]] Eigen::Vector2d cell_center(Eigen::Index row, Eigen::Index col) const;

private:
    Arena arena_;
    double resolution_ = 10.0;
    Eigen::ArrayXXd values_;
    Eigen::ArrayXXd areas_;
};

/// Per-cell probability that searcher s misses a target at the cell centre.
SearchGrid miss_probability_field(const AgentState& s, const SensingConfig& sensing, const Arena& arena,
                                  double resolution);

/// Product over searchers of the per-cell miss probability (all ones for no searchers).
SearchGrid search_value_field(const std::vector<AgentState>& searchers, const SensingConfig& sensing,
                              const Arena& arena, double resolution);

/// Area-weighted mean of the cell values.
double total_search_cost(const SearchGrid& grid);

/// Moving window over the last `kappa` instantaneous search-value fields.
class SearchMemory {
public:
    enum class Mode { Field, Scalar };

    explicit SearchMemory(std::size_t kappa = 30, Mode mode = Mode::Field);

    [[nodiscard]] std::size_t kappa() const { return kappa_; }
    [[nodiscard]] Mode mode() const { return mode_; }
    [[nodiscard]] std::size_t size() const { return totals_.size(); }
    [[nodiscard]] bool empty() const { return totals_.empty(); }
    [[nodiscard]] const std::deque<SearchGrid>& history() const { return history_; }
    [[nodiscard]] const std::deque<double>& totals() const { return totals_; }

    /// Appends a field, evicting the oldest once `kappa` are stored.
    void push(const SearchGrid& grid);
    void clear();

private:
    std::size_t kappa_;
    Mode mode_;
    std::deque<SearchGrid> history_;
    std::deque<double> totals_;
};

/// Field mode: cell-wise uniform average of the candidate and stored fields,
/// then total_search_cost. Scalar mode: uniform average of the stored totals
/// and the candidate's total.
double memory_search_cost(const SearchGrid& candidate, const SearchMemory& memory);

/// Writes the grid as a CSV matrix, first row = lowest y.
void write_grid_csv(const SearchGrid& grid, std::ostream& out);

} // namespace mbsat
