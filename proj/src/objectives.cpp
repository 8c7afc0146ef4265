#include "mbsat/objectives.hpp"

#include "mbsat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace mbsat {

std::vector<ControlAction> control_actions(const AgentState& s, const AgentMotionConfig& cfg, const Arena& arena)
{
    const auto points = admissible_controls(s, cfg, arena);
    std::vector<ControlAction> out;
    out.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.push_back({points[i], i});
    }
    return out;
}

void TrackerParams::validate() const
{
    if (!(v_cap >= 1.0)) {
        throw ConfigError("tracker: v_cap must be >= 1");
    }
}

MeasurementSet generate_pims(const std::vector<TargetState>& predicted, const ControlAction& u)
{
    MeasurementSet z;
    z.reserve(predicted.size());
    for (const auto& x : predicted) {
        z.push_back(noise_free_measurement(x, u.target));
    }
    return z;
}

double track_cost_from_statistics(double sigma_tilde, double n_hat, double v_cap)
{
    const double xi = (sigma_tilde - 1.0) * std::sqrt(std::max(n_hat, 0.0) / v_cap) + 1.0;
    return std::clamp(xi, 0.0, 1.0);
}

double track_cost(const MultiBernoulli& predicted, const ControlAction& u, const MeasurementSet& pims,
                  const SensorModel& sensor, const TrackerParams& params)
{
    const std::vector<double> r = updated_existence(predicted, pims, u.target, sensor);
    double sum = 0.0;
    for (double ri : r) {
        sum += ri;
    }
    const CardinalityEstimate card = cardinality_statistics(r);
    return track_cost_from_statistics(card.sigma_tilde, sum, params.v_cap);
}

TrackCostTable build_track_cost_table(const std::vector<MultiBernoulli>& beliefs,
                                      const std::vector<std::vector<ControlAction>>& controls,
                                      const SensorModel& sensor, const TrackerParams& params)
{
    if (beliefs.size() != controls.size()) {
        throw std::invalid_argument("build_track_cost_table: one control set per belief required");
    }
    const std::size_t n_controls = controls.empty() ? 0 : controls.front().size();
    TrackCostTable table;
    table.costs = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(beliefs.size()),
                                        static_cast<Eigen::Index>(n_controls));
    for (std::size_t j = 0; j < beliefs.size(); ++j) {
        if (controls[j].size() != n_controls || n_controls == 0) {
            throw std::invalid_argument("build_track_cost_table: control sets must be non-empty and equal-sized");
        }
        const std::vector<TargetState> states = predict_estimate(beliefs[j]);
        if (states.empty()) {
            continue;
        }
        for (std::size_t i = 0; i < n_controls; ++i) {
            const MeasurementSet pims = generate_pims(states, controls[j][i]);
            table.costs(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))
                = track_cost(beliefs[j], controls[j][i], pims, sensor, params);
        }
    }
    return table;
}

// ---- SearchGrid ----

SearchGrid::SearchGrid(const Arena& arena, double resolution, double fill) : arena_(arena), resolution_(resolution)
{
    if (!(resolution > 0.0)) {
        throw ConfigError("search grid: resolution must be positive");
    }
    arena.validate();
    const auto nx = static_cast<Eigen::Index>(std::ceil(arena.width / resolution - 1e-9));
    const auto ny = static_cast<Eigen::Index>(std::ceil(arena.height / resolution - 1e-9));
    values_ = Eigen::ArrayXXd::Constant(ny, nx, fill);
    areas_.resize(ny, nx);
    for (Eigen::Index r = 0; r < ny; ++r) {
        const double h = std::min(resolution, arena.height - r * resolution);
        for (Eigen::Index c = 0; c < nx; ++c) {
            const double w = std::min(resolution, arena.width - c * resolution);
            areas_(r, c) = w * h;
        }
    }
}

Eigen::Vector2d SearchGrid::cell_center(Eigen::Index row, Eigen::Index col) const
{
    const double x0 = col * resolution_;
    const double y0 = row * resolution_;
    const double x1 = std::min(x0 + resolution_, arena_.width);
    const double y1 = std::min(y0 + resolution_, arena_.height);
    return {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
}

SearchGrid miss_probability_field(const AgentState& s, const SensingConfig& sensing, const Arena& arena,
                                  double resolution)
{
    SearchGrid grid(arena, resolution);
    Eigen::ArrayXd dy2(grid.rows());
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        const double dy = grid.cell_center(r, 0).y() - s.sy;
        dy2(r) = dy * dy;
    }
    for (Eigen::Index c = 0; c < grid.cols(); ++c) {
        const double dx = grid.cell_center(0, c).x() - s.sx;
        const double dx2 = dx * dx;
        for (Eigen::Index r = 0; r < grid.rows(); ++r) {
            grid.values()(r, c) = 1.0 - detection_probability(std::sqrt(dx2 + dy2(r)), sensing);
        }
    }
    return grid;
}

SearchGrid search_value_field(const std::vector<AgentState>& searchers, const SensingConfig& sensing,
                              const Arena& arena, double resolution)
{
    SearchGrid grid(arena, resolution);
    for (const auto& s : searchers) {
        grid.values() *= miss_probability_field(s, sensing, arena, resolution).values();
    }
    return grid;
}

double total_search_cost(const SearchGrid& grid)
{
    return (grid.values() * grid.cell_areas()).sum() / grid.cell_areas().sum();
}

// ---- SearchMemory ----

SearchMemory::SearchMemory(std::size_t kappa, Mode mode) : kappa_(kappa), mode_(mode) {}

void SearchMemory::push(const SearchGrid& grid)
{
    if (kappa_ == 0) {
        return;
    }
    if (mode_ == Mode::Field) {
        history_.push_back(grid);
    }
    totals_.push_back(total_search_cost(grid));
    while (totals_.size() > kappa_) {
        totals_.pop_front();
        if (!history_.empty()) {
            history_.pop_front();
        }
    }
}

void SearchMemory::clear()
{
    history_.clear();
    totals_.clear();
}

double memory_search_cost(const SearchGrid& candidate, const SearchMemory& memory)
{
    if (memory.empty()) {
        return total_search_cost(candidate);
    }
    const double n = static_cast<double>(memory.size() + 1);
    if (memory.mode() == SearchMemory::Mode::Scalar) {
        double sum = total_search_cost(candidate);
        for (double t : memory.totals()) {
            sum += t;
        }
        return sum / n;
    }
    SearchGrid averaged = candidate;
    for (const auto& g : memory.history()) {
        if (g.rows() != candidate.rows() || g.cols() != candidate.cols()) {
            throw std::invalid_argument("memory_search_cost: grid shape mismatch");
        }
        averaged.values() += g.values();
    }
    averaged.values() /= n;
    return total_search_cost(averaged);
}

void write_grid_csv(const SearchGrid& grid, std::ostream& out)
{
    out << std::setprecision(10);
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            if (c > 0) {
                out << ',';
            }
            out << grid.values()(r, c);
        }
        out << '\n';
    }
}

} // namespace mbsat
