#include "mbsat/objectives.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace mbsat;

namespace {

SensorModel default_sensor()
{
    SensorModel s;
    s.clutter = ClutterConfig::for_arena(10.0, Arena{});
    return s;
}

BernoulliComponent cloud(double r, double x, double y, double spread, RandomStream& rng, int n = 200)
{
    BernoulliComponent c;
    c.r = r;
    for (int i = 0; i < n; ++i) {
        c.density.particles.push_back({{rng.normal(x, spread), rng.normal(0, 0.5), rng.normal(y, spread), rng.normal(0, 0.5)}, 1.0});
    }
    c.density.normalize();
    return c;
}

SearchGrid filled(double value, double resolution = 10.0)
{
    return SearchGrid(Arena{}, resolution, value);
}

} // namespace

TEST(Pims, OneNoiseFreeMeasurementPerState)
{
    EXPECT_TRUE(generate_pims({}, {{0, 0}, 0}).empty());
    const auto z = generate_pims({{100, 0, 0, 0}}, {{0, 0}, 0});
    ASSERT_EQ(z.size(), 1u);
    EXPECT_DOUBLE_EQ(z[0].bearing, 0.0);
    EXPECT_DOUBLE_EQ(z[0].range, 100.0);
    EXPECT_EQ(generate_pims({{1, 0, 2, 0}, {3, 0, 4, 0}, {5, 0, 6, 0}}, {{0, 0}, 0}).size(), 3u);
}

TEST(TrackCost, BoundaryValues)
{
    EXPECT_EQ(track_cost_from_statistics(0.0, 5.0, 5.0), 0.0);
    EXPECT_EQ(track_cost_from_statistics(0.3, 0.0, 5.0), 1.0);
    EXPECT_EQ(track_cost_from_statistics(1.0, 0.0, 5.0), 1.0);
    for (double n : {0.5, 1.0, 2.7, 5.0, 9.0}) {
        EXPECT_EQ(track_cost_from_statistics(1.0, n, 5.0), 1.0) << n;
    }
}

TEST(TrackCost, ClampedAboveCapacity)
{
    EXPECT_EQ(track_cost_from_statistics(0.0, 20.0, 5.0), 0.0);
    EXPECT_NEAR(track_cost_from_statistics(0.5, 1.25, 5.0), 0.75, 1e-15);
}

TEST(TrackCost, AlwaysInUnitInterval)
{
    const SensorModel sensor = default_sensor();
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        RandomStream rng(seed);
        MultiBernoulli mb;
        const int n = static_cast<int>(rng.uniform_int(0, 8));
        for (int i = 0; i < n; ++i) {
            mb.components.push_back(cloud(rng.uniform(), rng.uniform(0, 500), rng.uniform(0, 500), rng.uniform(0.5, 20), rng, 50));
        }
        const AgentState s{rng.uniform(0, 500), rng.uniform(0, 500)};
        const auto controls = control_actions(s, {}, Arena{});
        const auto table = build_track_cost_table({mb}, {controls}, sensor, {});
        EXPECT_GE(table.costs.minCoeff(), 0.0);
        EXPECT_LE(table.costs.maxCoeff(), 1.0);
    }
}

TEST(TrackCostTable, EmptyPredictionGivesRowOfOnes)
{
    RandomStream rng(1);
    MultiBernoulli weak;
    weak.components.push_back(cloud(0.4, 200, 200, 2.0, rng));
    MultiBernoulli strong;
    strong.components.push_back(cloud(0.95, 200, 200, 2.0, rng));
    const std::vector<std::vector<ControlAction>> controls{control_actions({150, 150}, {}, Arena{}),
                                                           control_actions({250, 250}, {}, Arena{}),
                                                           control_actions({400, 100}, {}, Arena{})};
    const auto table = build_track_cost_table({weak, strong, MultiBernoulli{}}, controls, default_sensor(), {});
    EXPECT_EQ(table.agents(), 3u);
    EXPECT_EQ(table.controls(), 17u);
    EXPECT_TRUE((table.costs.row(0).array() == 1.0).all());
    EXPECT_TRUE((table.costs.row(2).array() == 1.0).all());
    EXPECT_LT(table.costs.row(1).maxCoeff(), 1.0);
}

TEST(TrackCostTable, ApproachingTargetIsCheaper)
{
    RandomStream rng(2);
    MultiBernoulli mb;
    mb.components.push_back(cloud(0.9, 250, 250, 1.0, rng));
    const auto controls = control_actions({200, 250}, {}, Arena{});
    const auto table = build_track_cost_table({mb}, {controls}, default_sensor(), {});
    // Ring 2 heading 0 moves 10 m towards the target (40 m away); heading pi moves to 60 m.
    std::size_t toward = 0;
    std::size_t away = 0;
    for (const auto& u : controls) {
        if (std::abs(u.target.sx - 210.0) < 1e-9 && std::abs(u.target.sy - 250.0) < 1e-9) {
            toward = u.index;
        }
        if (std::abs(u.target.sx - 190.0) < 1e-9 && std::abs(u.target.sy - 250.0) < 1e-9) {
            away = u.index;
        }
    }
    ASSERT_NE(toward, 0u);
    ASSERT_NE(away, 0u);
    EXPECT_LT(table.at(0, toward), table.at(0, away));
}

TEST(SearchGrid, DimensionsAndAreas)
{
    const SearchGrid g(Arena{500, 300}, 10.0);
    EXPECT_EQ(g.cols(), 50);
    EXPECT_EQ(g.rows(), 30);
    EXPECT_NEAR(g.cell_areas().sum(), 500.0 * 300.0, 1e-6);
    EXPECT_EQ(g.cell_center(0, 0), Eigen::Vector2d(5, 5));

    const SearchGrid partial(Arena{25, 10}, 10.0);
    EXPECT_EQ(partial.cols(), 3);
    EXPECT_EQ(partial.rows(), 1);
    EXPECT_NEAR(partial.cell_areas()(0, 2), 50.0, 1e-12);
    EXPECT_NEAR(partial.cell_center(0, 2).x(), 22.5, 1e-12);
}

TEST(SearchValueField, Examples)
{
    const Arena arena;
    const SensingConfig sensing;
    const SearchGrid none = search_value_field({}, sensing, arena, 10.0);
    EXPECT_TRUE((none.values() == 1.0).all());

    const SearchGrid one = search_value_field({{255, 255}}, sensing, arena, 10.0);
    EXPECT_NEAR(one.values()(25, 25), 0.01, 1e-15);

    const SearchGrid two = search_value_field({{255, 255}, {265, 255}}, sensing, arena, 10.0);
    EXPECT_NEAR(two.values()(25, 25), 1e-4, 1e-15);
    EXPECT_NEAR(two.values()(25, 26), 1e-4, 1e-15);
}

TEST(SearchValueField, AddingSearcherNeverIncreasesValues)
{
    RandomStream rng(3);
    std::vector<AgentState> searchers;
    SearchGrid previous = search_value_field(searchers, {}, Arena{}, 10.0);
    double previous_cost = total_search_cost(previous);
    for (int i = 0; i < 6; ++i) {
        searchers.push_back({rng.uniform(0, 500), rng.uniform(0, 500)});
        const SearchGrid next = search_value_field(searchers, {}, Arena{}, 10.0);
        EXPECT_TRUE((next.values() <= previous.values()).all());
        EXPECT_TRUE((next.values() >= 0.0).all());
        const double cost = total_search_cost(next);
        EXPECT_LE(cost, previous_cost);
        previous = next;
        previous_cost = cost;
    }
}

TEST(SearchCost, Examples)
{
    EXPECT_DOUBLE_EQ(total_search_cost(filled(1.0)), 1.0);
    EXPECT_DOUBLE_EQ(total_search_cost(filled(0.0)), 0.0);
    SearchGrid half = filled(0.0);
    half.values().topRows(25) = 1.0;
    EXPECT_DOUBLE_EQ(total_search_cost(half), 0.5);
}

TEST(SearchCost, AreaWeightedWithPartialCells)
{
    SearchGrid g(Arena{15, 10}, 10.0, 0.0);
    g.values()(0, 0) = 1.0;
    EXPECT_NEAR(total_search_cost(g), 100.0 / 150.0, 1e-15);
}

TEST(SearchCost, ResolutionConvergence)
{
    const std::vector<AgentState> agents{{100, 315}, {160, 415}, {48, 240}};
    const double coarse = total_search_cost(search_value_field(agents, {}, Arena{}, 10.0));
    const double fine = total_search_cost(search_value_field(agents, {}, Arena{}, 5.0));
    EXPECT_LT(std::abs(coarse - fine), 1e-3);
}

TEST(Memory, EmptyHistoryIsInstantaneousCost)
{
    const SearchGrid g = search_value_field({{100, 100}}, {}, Arena{}, 10.0);
    for (auto mode : {SearchMemory::Mode::Field, SearchMemory::Mode::Scalar}) {
        const SearchMemory memory(30, mode);
        EXPECT_DOUBLE_EQ(memory_search_cost(g, memory), total_search_cost(g));
    }
}

TEST(Memory, TwoTermAverage)
{
    for (auto mode : {SearchMemory::Mode::Field, SearchMemory::Mode::Scalar}) {
        SearchMemory memory(1, mode);
        memory.push(filled(1.0));
        memory.push(filled(1.0));
        EXPECT_EQ(memory.size(), 1u);
        EXPECT_DOUBLE_EQ(memory_search_cost(filled(0.0), memory), 0.5);
    }
}

TEST(Memory, ConstantHistory)
{
    const SearchGrid g = search_value_field({{100, 100}, {400, 300}}, {}, Arena{}, 10.0);
    SearchMemory memory(5);
    for (int i = 0; i < 8; ++i) {
        memory.push(g);
    }
    EXPECT_EQ(memory.size(), 5u);
    EXPECT_NEAR(memory_search_cost(g, memory), total_search_cost(g), 1e-14);
}

TEST(Memory, FieldAndScalarModesAgree)
{
    RandomStream rng(4);
    SearchMemory field(4, SearchMemory::Mode::Field);
    SearchMemory scalar(4, SearchMemory::Mode::Scalar);
    for (int i = 0; i < 7; ++i) {
        const SearchGrid g = search_value_field({{rng.uniform(0, 500), rng.uniform(0, 500)}}, {}, Arena{}, 10.0);
        field.push(g);
        scalar.push(g);
        const SearchGrid candidate = search_value_field({{rng.uniform(0, 500), rng.uniform(0, 500)}}, {}, Arena{}, 10.0);
        EXPECT_NEAR(memory_search_cost(candidate, field), memory_search_cost(candidate, scalar), 1e-12);
    }
}

TEST(GridCsv, RowsFromLowestY)
{
    SearchGrid g(Arena{20, 20}, 10.0, 0.0);
    g.values()(0, 1) = 1.0;
    std::ostringstream out;
    write_grid_csv(g, out);
    std::istringstream in(out.str());
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first.substr(first.find(',') + 1, 1), "1");
}
