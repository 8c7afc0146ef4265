#include "mbsat/metrics.hpp"
#include "mbsat/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace mbsat;

namespace {

/// OSPA by enumerating every injection of the smaller set into the larger one.
double brute_force_ospa(const PointSet& x, const PointSet& y, double c, double p)
{
    const PointSet& small = x.size() <= y.size() ? x : y;
    const PointSet& large = x.size() <= y.size() ? y : x;
    const std::size_t m = small.size();
    const std::size_t n = large.size();
    if (n == 0) {
        return 0.0;
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            sum += std::pow(std::min(c, (small[i] - large[static_cast<std::size_t>(perm[i])]).norm()), p);
        }
        best = std::min(best, sum);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double total = best + std::pow(c, p) * static_cast<double>(n - m);
    return std::pow(total / static_cast<double>(n), 1.0 / p);
}

PointSet random_set(std::size_t n, RandomStream& rng, double spread)
{
    PointSet out;
    for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back(rng.uniform(0, spread), rng.uniform(0, spread));
    }
    return out;
}

} // namespace

TEST(Ospa, Examples)
{
    const PointSet a{{0, 0}, {10, 0}};
    EXPECT_DOUBLE_EQ(ospa(a, a), 0.0);
    EXPECT_DOUBLE_EQ(ospa({{0, 0}}, {}), 100.0);
    EXPECT_DOUBLE_EQ(ospa({}, {{3, 4}}), 100.0);
    EXPECT_DOUBLE_EQ(ospa({}, {}), 0.0);
    EXPECT_NEAR(ospa(a, {{0, 0}}), std::sqrt(100.0 * 100.0 / 2.0), 1e-12);
    EXPECT_NEAR(ospa(a, {{0, 0}}), 70.71, 5e-3);
}

TEST(Ospa, AgreesWithBruteForce)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        RandomStream rng(seed);
        const auto nx = static_cast<std::size_t>(rng.uniform_int(0, 6));
        const auto ny = static_cast<std::size_t>(rng.uniform_int(0, 6));
        const double spread = rng.uniform() < 0.5 ? 80.0 : 400.0;
        const PointSet x = random_set(nx, rng, spread);
        const PointSet y = random_set(ny, rng, spread);
        for (double p : {1.0, 2.0}) {
            const OspaConfig cfg{100.0, p};
            EXPECT_NEAR(ospa(x, y, cfg), brute_force_ospa(x, y, 100.0, p), 1e-9) << "seed " << seed;
        }
    }
}

TEST(Ospa, SymmetricBoundedAndZeroOnPermutation)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RandomStream rng(seed + 1000);
        const PointSet x = random_set(static_cast<std::size_t>(rng.uniform_int(0, 8)), rng, 300.0);
        const PointSet y = random_set(static_cast<std::size_t>(rng.uniform_int(0, 8)), rng, 300.0);
        const double d = ospa(x, y);
        EXPECT_NEAR(d, ospa(y, x), 1e-12);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 100.0 + 1e-12);
        PointSet shuffled(x.rbegin(), x.rend());
        EXPECT_NEAR(ospa(x, shuffled), 0.0, 1e-12);
    }
}

TEST(Assignment, RectangularOptimum)
{
    Eigen::MatrixXd cost(2, 3);
    cost << 4, 1, 3,
            2, 0, 5;
    const auto a = solve_assignment(cost);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[0], 1);
    EXPECT_EQ(a[1], 0);
}

TEST(Aggregate, SingleRun)
{
    const auto s = mc_aggregate({{1.0, 2.0, 3.0}});
    EXPECT_EQ(s.mean, (std::vector<double>{1.0, 2.0, 3.0}));
    EXPECT_EQ(s.stddev, (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(Aggregate, TwoConstantRuns)
{
    const auto s = mc_aggregate({{2.0, 2.0}, {4.0, 4.0}});
    EXPECT_EQ(s.mean, (std::vector<double>{3.0, 3.0}));
    EXPECT_NEAR(s.stddev[0], std::sqrt(2.0), 1e-15);
}

TEST(Aggregate, NoiseStandardDeviation)
{
    RandomStream rng(5);
    std::vector<std::vector<double>> runs;
    for (int i = 0; i < 30; ++i) {
        runs.push_back({rng.normal(0.0, 2.0)});
    }
    EXPECT_NEAR(mc_aggregate(runs).stddev[0], 2.0, 0.6);
}

TEST(Aggregate, RejectsMismatchedLengths)
{
    EXPECT_THROW(mc_aggregate({{1.0}, {1.0, 2.0}}), std::invalid_argument);
}

TEST(OspaCsv, HeaderAndRows)
{
    std::ostringstream out;
    write_ospa_csv({{1.5, 2.5}, {0.0, 0.5}}, out);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "timestep,ospaMean,ospaStd");
    EXPECT_NE(out.str().find("\n2,"), std::string::npos);
}
