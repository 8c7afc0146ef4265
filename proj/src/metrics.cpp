#include "mbsat/metrics.hpp"

#include "mbsat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mbsat {

void OspaConfig::validate() const
{
    if (!(c > 0.0) || !(p >= 1.0)) {
        throw ConfigError("ospa: need c > 0 and p >= 1");
    }
}

// Shortest augmenting path (Jonker-Volgenant style potentials), O(n^2 m).
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost)
{
    const auto n = static_cast<int>(cost.rows());
    const auto m = static_cast<int>(cost.cols());
    if (n > m) {
        throw std::invalid_argument("solve_assignment: more rows than columns");
    }
    if (n == 0) {
        return {};
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based arrays; column 0 is a virtual start.
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(m + 1, 0.0);
    std::vector<int> owner(m + 1, 0);
    std::vector<int> way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        owner[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = owner[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do {
            const int j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= m; ++j) {
        if (owner[j] != 0) {
            assignment[owner[j] - 1] = j - 1;
        }
    }
    return assignment;
}

double ospa(const PointSet& truth, const PointSet& estimate, const OspaConfig& cfg)
{
    cfg.validate();
    const PointSet& small = truth.size() <= estimate.size() ? truth : estimate;
    const PointSet& large = truth.size() <= estimate.size() ? estimate : truth;
    const auto m = static_cast<Eigen::Index>(small.size());
    const auto n = static_cast<Eigen::Index>(large.size());
    if (n == 0) {
        return 0.0;
    }
    if (m == 0) {
        return cfg.c;
    }
    Eigen::MatrixXd cost(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = (small[static_cast<std::size_t>(i)] - large[static_cast<std::size_t>(j)]).norm();
            cost(i, j) = std::pow(std::min(d, cfg.c), cfg.p);
        }
    }
    const std::vector<int> a = solve_assignment(cost);
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        total += cost(i, a[static_cast<std::size_t>(i)]);
    }
    total += std::pow(cfg.c, cfg.p) * static_cast<double>(n - m);
    return std::min(cfg.c, std::pow(total / static_cast<double>(n), 1.0 / cfg.p));
}

SeriesStatistics mc_aggregate(const std::vector<std::vector<double>>& runs)
{
    SeriesStatistics s;
    if (runs.empty()) {
        return s;
    }
    const std::size_t len = runs.front().size();
    for (const auto& r : runs) {
        if (r.size() != len) {
            throw std::invalid_argument("mc_aggregate: runs have different lengths");
        }
    }
    s.mean.assign(len, 0.0);
    s.stddev.assign(len, 0.0);
    const double n = static_cast<double>(runs.size());
    for (std::size_t k = 0; k < len; ++k) {
        double sum = 0.0;
        for (const auto& r : runs) {
            sum += r[k];
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& r : runs) {
            ss += (r[k] - mean) * (r[k] - mean);
        }
        s.mean[k] = mean;
        s.stddev[k] = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    return s;
}

void write_ospa_csv(const SeriesStatistics& stats, std::ostream& out, int first_step)
{
    out << "timestep,ospaMean,ospaStd\n" << std::setprecision(10);
    for (std::size_t k = 0; k < stats.mean.size(); ++k) {
        out << first_step + static_cast<int>(k) << ',' << stats.mean[k] << ',' << stats.stddev[k] << '\n';
    }
}

} // namespace mbsat
