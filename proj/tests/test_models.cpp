#include "mbsat/errors.hpp"
#include "mbsat/models.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace mbsat;

namespace {

MotionConfig noiseless_cv()
{
    return MotionConfig::constant_velocity(1.0, 0.99, 0.0);
}

} // namespace

TEST(Motion, ZeroStateIsFixedPointWithoutNoise)
{
    RandomStream rng(1);
    const TargetState x = step_target({}, noiseless_cv(), rng);
    EXPECT_EQ(x, TargetState{});
}

TEST(Motion, ConstantVelocityShift)
{
    RandomStream rng(1);
    const TargetState x = step_target({10, 1, 20, -2}, noiseless_cv(), rng);
    EXPECT_DOUBLE_EQ(x.px, 11.0);
    EXPECT_DOUBLE_EQ(x.vx, 1.0);
    EXPECT_DOUBLE_EQ(x.py, 18.0);
    EXPECT_DOUBLE_EQ(x.vy, -2.0);
}

TEST(Motion, ProcessNoiseMatrix)
{
    const auto cfg = MotionConfig::constant_velocity(2.0);
    const Eigen::Matrix4d& Q = cfg.Q();
    EXPECT_DOUBLE_EQ(Q(0, 0), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(Q(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(Q(1, 1), 2.0);
    EXPECT_DOUBLE_EQ(Q(2, 3), 1.0);
    EXPECT_DOUBLE_EQ(Q(0, 2), 0.0);
    const Eigen::Matrix4d& L = cfg.noise_factor();
    EXPECT_LT((L * L.transpose() - Q).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Motion, SampleMeanMatchesPrediction)
{
    const auto cfg = MotionConfig::constant_velocity();
    RandomStream rng(42);
    constexpr int n = 10000;
    Eigen::Vector4d sum = Eigen::Vector4d::Zero();
    for (int i = 0; i < n; ++i) {
        sum += step_target({10, 1, 20, -2}, cfg, rng).vector();
    }
    const Eigen::Vector4d mean = sum / n;
    const Eigen::Vector4d expected(11, 1, 18, -2);
    for (int i = 0; i < 4; ++i) {
        const double sd = std::sqrt(cfg.Q()(i, i));
        EXPECT_NEAR(mean[i], expected[i], 3.0 * sd / 100.0) << "component " << i;
    }
}

TEST(Sensing, DetectionProbabilityExamples)
{
    const SensingConfig cfg;
    EXPECT_DOUBLE_EQ(detection_probability(10.0, cfg), 0.99);
    EXPECT_DOUBLE_EQ(detection_probability(30.0, cfg), 0.99);
    EXPECT_DOUBLE_EQ(detection_probability(460.44, cfg), 0.0);
    EXPECT_DOUBLE_EQ(detection_probability(1000.0, cfg), 0.0);
    EXPECT_NEAR(cfg.zero_range(), 30.0 + 0.99 / 0.0023, 1e-9);
    EXPECT_GT(detection_probability(460.4, cfg), 0.0);
}

TEST(Sensing, DetectionProbabilityMonotoneAndContinuous)
{
    const SensingConfig cfg;
    double prev = 1.0;
    for (double d = 0.0; d <= 600.0; d += 0.25) {
        const double pd = detection_probability(d, cfg);
        EXPECT_LE(pd, prev);
        EXPECT_GE(pd, 0.0);
        prev = pd;
    }
    EXPECT_NEAR(detection_probability(30.0 + 1e-9, cfg), 0.99, 1e-9);
}

TEST(Sensing, DetectionProbabilityFromStates)
{
    const SensingConfig cfg;
    EXPECT_NEAR(detection_probability(TargetState{130, 0, 0, 0}, AgentState{0, 0}, cfg), 0.99 - 0.0023 * 100, 1e-12);
}

TEST(Measurement, NoiseFreeAxes)
{
    const Measurement a = noise_free_measurement({100, 0, 0, 0}, {0, 0});
    EXPECT_DOUBLE_EQ(a.bearing, 0.0);
    EXPECT_DOUBLE_EQ(a.range, 100.0);
    const Measurement b = noise_free_measurement({0, 0, 100, 0}, {0, 0});
    EXPECT_DOUBLE_EQ(b.bearing, std::numbers::pi / 2);
    EXPECT_DOUBLE_EQ(b.range, 100.0);
}

TEST(Measurement, NoiseStandardDeviations)
{
    const MeasurementNoiseConfig noise;
    EXPECT_NEAR(noise.bearing_std(100.0), 2 * std::numbers::pi / 180 + 1e-3, 1e-15);
    EXPECT_NEAR(noise.bearing_std(100.0), 0.03591, 1e-5);
    EXPECT_DOUBLE_EQ(noise.range_std(100.0), 1.5);
}

TEST(Measurement, CoLocatedTargetThrows)
{
    RandomStream rng(3);
    EXPECT_THROW(measure({5, 0, 5, 0}, {5, 5}, {}, rng), DomainError);
}

TEST(Measurement, WrapAngle)
{
    EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
    EXPECT_NEAR(wrap_angle(-std::numbers::pi), std::numbers::pi, 1e-15);
    EXPECT_NEAR(wrap_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(wrap_angle(0.3 + 4 * std::numbers::pi), 0.3, 1e-12);
}

TEST(Likelihood, PeakValue)
{
    const MeasurementNoiseConfig noise;
    const TargetState x{60, 0, 80, 0};
    const AgentState s{0, 0};
    const double ll = measurement_loglikelihood(noise_free_measurement(x, s), x, s, noise);
    const double expected = std::log(1.0 / (2 * std::numbers::pi * noise.bearing_std(100) * noise.range_std(100)));
    EXPECT_NEAR(ll, expected, 1e-12);
}

TEST(Likelihood, BearingResidualWrapInvariance)
{
    const MeasurementNoiseConfig noise;
    const TargetState x{60, 0, 80, 0};
    const AgentState s{0, 0};
    Measurement z = noise_free_measurement(x, s);
    z.bearing += 0.01;
    z.range += 0.7;
    Measurement shifted = z;
    shifted.bearing += 2 * std::numbers::pi;
    EXPECT_NEAR(measurement_loglikelihood(z, x, s, noise), measurement_loglikelihood(shifted, x, s, noise), 1e-9);
}

TEST(Likelihood, DensityIntegratesToOne)
{
    const MeasurementNoiseConfig noise;
    const TargetState x{100, 0, 50, 0};
    const AgentState s{0, 0};
    const Measurement h = noise_free_measurement(x, s);
    const double d = std::hypot(100.0, 50.0);
    const double sb = noise.bearing_std(d);
    const double sr = noise.range_std(d);
    constexpr int n = 200;
    const double db = 12 * sb / n;
    const double dr = 12 * sr / n;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Measurement z{h.bearing - 6 * sb + (i + 0.5) * db, h.range - 6 * sr + (j + 0.5) * dr};
            total += std::exp(measurement_loglikelihood(z, x, s, noise)) * db * dr;
        }
    }
    EXPECT_NEAR(total, 1.0, 0.01);
}

TEST(Generation, EmptyWithoutTargetsOrClutter)
{
    RandomStream rng(5);
    ClutterConfig clutter = ClutterConfig::for_arena(0.0, Arena{});
    EXPECT_TRUE(generate_measurements({}, {250, 250}, {}, {}, clutter, rng).empty());
}

TEST(Generation, DetectionFrequency)
{
    RandomStream rng(11);
    const ClutterConfig clutter = ClutterConfig::for_arena(0.0, Arena{});
    constexpr int trials = 10000;
    int detections = 0;
    for (int i = 0; i < trials; ++i) {
        detections += static_cast<int>(generate_measurements({{260, 0, 250, 0}}, {250, 250}, {}, {}, clutter, rng).size());
    }
    EXPECT_NEAR(static_cast<double>(detections) / trials, 0.99, 0.01);
}

TEST(Generation, ClutterCardinality)
{
    RandomStream rng(12);
    const ClutterConfig clutter = ClutterConfig::for_arena(10.0, Arena{});
    constexpr int trials = 10000;
    double total = 0.0;
    for (int i = 0; i < trials; ++i) {
        const auto z = generate_measurements({}, {250, 250}, {}, {}, clutter, rng);
        total += static_cast<double>(z.size());
        for (const auto& m : z) {
            ASSERT_GT(m.bearing, -std::numbers::pi);
            ASSERT_LE(m.bearing, std::numbers::pi);
            ASSERT_GE(m.range, 0.0);
            ASSERT_LE(m.range, Arena{}.diagonal());
        }
    }
    EXPECT_NEAR(total / trials, 10.0, 0.3);
}

TEST(Generation, PerfectSensorOneMeasurementPerTarget)
{
    RandomStream rng(13);
    SensingConfig sensing{1.0, 1e-12, 30.0};
    const ClutterConfig clutter = ClutterConfig::for_arena(0.0, Arena{});
    const std::vector<TargetState> targets{{10, 0, 10, 0}, {400, 0, 20, 0}, {300, 1, 450, -1}};
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(generate_measurements(targets, {250, 250}, sensing, {}, clutter, rng).size(), targets.size());
    }
}

TEST(Generation, Reproducible)
{
    RandomStream a(99);
    RandomStream b(99);
    const ClutterConfig clutter = ClutterConfig::for_arena(10.0, Arena{});
    const auto za = generate_measurements({{100, 0, 100, 0}}, {120, 90}, {}, {}, clutter, a);
    const auto zb = generate_measurements({{100, 0, 100, 0}}, {120, 90}, {}, {}, clutter, b);
    EXPECT_EQ(za, zb);
}

TEST(Controls, SeventeenDistinctInteriorPoints)
{
    const AgentMotionConfig cfg;
    const AgentState s{250, 250};
    const auto u = admissible_controls(s, cfg, Arena{});
    ASSERT_EQ(u.size(), 17u);
    EXPECT_EQ(u.front(), s);
    std::set<std::pair<long long, long long>> distinct;
    for (const auto& p : u) {
        distinct.insert({std::llround(p.sx * 1e6), std::llround(p.sy * 1e6)});
    }
    EXPECT_EQ(distinct.size(), 17u);
    EXPECT_NEAR(std::hypot(u[1].sx - s.sx, u[1].sy - s.sy), 5.0, 1e-12);
    EXPECT_NEAR(std::hypot(u[16].sx - s.sx, u[16].sy - s.sy), 10.0, 1e-12);
}

TEST(Controls, NoRingsMeansStayOnly)
{
    const AgentMotionConfig cfg{5.0, 0, 8};
    const auto u = admissible_controls({10, 10}, cfg, Arena{});
    ASSERT_EQ(u.size(), 1u);
    EXPECT_EQ(u.front(), (AgentState{10, 10}));
}

TEST(Controls, CornerClampedIntoArena)
{
    const Arena arena;
    for (const AgentState s : {AgentState{0, 0}, AgentState{500, 500}, AgentState{0, 500}, AgentState{3, 498}}) {
        const auto u = admissible_controls(s, {}, arena);
        EXPECT_EQ(u.size(), 17u);
        EXPECT_EQ(u.front(), s);
        for (const auto& p : u) {
            EXPECT_TRUE(arena.contains(p.sx, p.sy));
        }
    }
}

TEST(GroundTruth, ScheduledBirthAppearsOnTime)
{
    GroundTruth world;
    world.schedule.push_back({27, 86, {35, 0, 31, 0}, {}});
    RandomStream rng(0);
    const auto motion = noiseless_cv();
    for (int k = 1; k <= 26; ++k) {
        step_ground_truth(world, k, motion, Arena{}, rng);
        EXPECT_TRUE(world.live.empty()) << "k=" << k;
    }
    step_ground_truth(world, 27, motion, Arena{}, rng);
    ASSERT_EQ(world.states().size(), 1u);
    EXPECT_EQ(world.states().front(), (TargetState{35, 0, 31, 0}));
}

TEST(GroundTruth, DeathRemovesAfterLastStep)
{
    GroundTruth world;
    world.schedule.push_back({2, 4, {100, 1, 100, 0}, {}});
    RandomStream rng(0);
    std::vector<std::size_t> counts;
    for (int k = 1; k <= 6; ++k) {
        step_ground_truth(world, k, noiseless_cv(), Arena{}, rng);
        counts.push_back(world.live.size());
    }
    EXPECT_EQ(counts, (std::vector<std::size_t>{0, 1, 1, 1, 0, 0}));
}

TEST(GroundTruth, WaypointInterpolation)
{
    GroundTruth world;
    world.schedule.push_back({1, 20, {}, {{1, 0, 0}, {11, 100, 50}}});
    RandomStream rng(0);
    for (int k = 1; k <= 6; ++k) {
        step_ground_truth(world, k, noiseless_cv(), Arena{}, rng);
    }
    ASSERT_EQ(world.live.size(), 1u);
    EXPECT_NEAR(world.live[0].state.px, 50.0, 1e-9);
    EXPECT_NEAR(world.live[0].state.py, 25.0, 1e-9);
}

TEST(GroundTruth, EmptyScheduleStaysEmpty)
{
    GroundTruth world;
    RandomStream rng(0);
    for (int k = 1; k <= 50; ++k) {
        step_ground_truth(world, k, MotionConfig::constant_velocity(), Arena{}, rng);
        EXPECT_TRUE(world.live.empty());
    }
}

TEST(Random, SplitIsIndependentOfParentDraws)
{
    RandomStream a(7);
    RandomStream b(7);
    for (int i = 0; i < 10; ++i) {
        (void)b.uniform();
    }
    RandomStream sa = a.split("filter", 2);
    RandomStream sb = b.split("filter", 2);
    EXPECT_EQ(sa.next_u64(), sb.next_u64());
    EXPECT_NE(a.split("filter", 1).next_u64(), a.split("filter", 2).next_u64());
    EXPECT_NE(a.split("world").next_u64(), a.split("ga").next_u64());
}
