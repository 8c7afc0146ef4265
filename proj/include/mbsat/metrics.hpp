#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace mbsat {

struct OspaConfig {
    double c = 100.0;
    double p = 2.0;

    void validate() const;
};

using PointSet = std::vector<Eigen::Vector2d>;

/// Minimum-cost assignment of every row of an n x m cost matrix (n <= m) to a
/// distinct column. Returns the column of each row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Optimal sub-pattern assignment distance with cutoff c and order p.
double ospa(const PointSet& truth, const PointSet& estimate, const OspaConfig& cfg = {});

struct SeriesStatistics {
    std::vector<double> mean;
    /// Sample standard deviation (n - 1 denominator); zero for a single run.
    std::vector<double> stddev;
};

/// Element-wise mean and standard deviation over equal-length runs.
SeriesStatistics mc_aggregate(const std::vector<std::vector<double>>& runs);

/// CSV with header `timestep,ospaMean,ospaStd`; timesteps start at `first_step`.
void write_ospa_csv(const SeriesStatistics& stats, std::ostream& out, int first_step = 1);

} // namespace mbsat
