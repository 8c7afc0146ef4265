#include "mbsat/controller.hpp"
#include "mbsat/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mbsat;

namespace {

std::vector<std::vector<ControlAction>> controls_for(const std::vector<AgentState>& agents)
{
    std::vector<std::vector<ControlAction>> out;
    for (const auto& a : agents) {
        out.push_back(control_actions(a, {}, Arena{}));
    }
    return out;
}

TrackCostTable random_table(std::size_t agents, RandomStream& rng)
{
    TrackCostTable t;
    t.costs = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(agents), 17);
    for (Eigen::Index j = 0; j < t.costs.rows(); ++j) {
        if (rng.uniform() < 0.7) {
            const double base = rng.uniform(0.3, 0.8);
            for (Eigen::Index i = 0; i < 17; ++i) {
                t.costs(j, i) = base + rng.uniform(0.0, 0.05);
            }
        }
    }
    return t;
}

DecisionProblem make_problem(const std::vector<AgentState>& agents, TrackCostTable table, ControllerConfig cfg = {},
                             const SearchMemory* memory = nullptr)
{
    return DecisionProblem(controls_for(agents), std::move(table), SensingConfig{}, Arena{}, 10.0, memory, cfg);
}

JointDecision uniform_decision(std::size_t agents, Mode mode, std::size_t control = 0)
{
    JointDecision d;
    d.per_agent.assign(agents, AgentDecision{mode, control});
    return d;
}

} // namespace

TEST(Genes, RoundTrip)
{
    JointDecision d;
    d.per_agent = {{Mode::Search, 3}, {Mode::Track, 16}, {Mode::Track, 0}};
    const auto g = d.genes(17);
    EXPECT_EQ(g, (std::vector<int>{3, 33, 17}));
    EXPECT_EQ(JointDecision::from_genes(g, 17), d);
}

TEST(Evaluate, ModeEndpoints)
{
    RandomStream rng(1);
    const std::vector<AgentState> agents{{100, 100}, {300, 300}};
    const auto problem = make_problem(agents, random_table(2, rng));
    const auto tracking = problem.evaluate(uniform_decision(2, Mode::Track));
    EXPECT_DOUBLE_EQ(tracking.search_cost, 1.0);
    const auto searching = problem.evaluate(uniform_decision(2, Mode::Search));
    EXPECT_DOUBLE_EQ(searching.track_cost, 1.0);
    EXPECT_LT(searching.search_cost, 1.0);
}

TEST(Evaluate, ConvexSumEndpoints)
{
    RandomStream rng(2);
    const std::vector<AgentState> agents{{100, 100}, {300, 300}};
    TrackCostTable table = random_table(2, rng);
    table.costs(0, 4) = 0.4;
    JointDecision d;
    d.per_agent = {{Mode::Track, 4}, {Mode::Search, 7}};
    for (double w : {0.0, 1.0}) {
        ControllerConfig cfg;
        cfg.w = w;
        const auto v = make_problem(agents, table, cfg).evaluate(d);
        EXPECT_EQ(v.combined, w == 0.0 ? v.track_cost : v.search_cost);
    }
    ControllerConfig cfg;
    cfg.w = 0.3;
    const auto v = make_problem(agents, table, cfg).evaluate(d);
    EXPECT_DOUBLE_EQ(v.track_cost, 0.4);
    EXPECT_NEAR(v.combined, 0.3 * v.search_cost + 0.7 * 0.4, 1e-15);
}

TEST(Evaluate, TrackCostIsMeanOverTrackers)
{
    TrackCostTable table;
    table.costs = Eigen::MatrixXd::Ones(3, 17);
    table.costs(0, 2) = 0.2;
    table.costs(2, 5) = 0.6;
    const auto problem = make_problem({{50, 50}, {250, 250}, {450, 450}}, table);
    JointDecision d;
    d.per_agent = {{Mode::Track, 2}, {Mode::Search, 0}, {Mode::Track, 5}};
    EXPECT_DOUBLE_EQ(problem.evaluate(d).track_cost, 0.4);
}

TEST(Evaluate, PrecomputedMatchesLiteral)
{
    RandomStream rng(3);
    const std::vector<AgentState> agents{{120, 80}, {260, 300}, {420, 410}};
    const TrackCostTable table = random_table(3, rng);
    SearchMemory memory(4);
    for (int i = 0; i < 3; ++i) {
        memory.push(search_value_field({{rng.uniform(0, 500), rng.uniform(0, 500)}}, {}, Arena{}, 10.0));
    }
    ControllerConfig cfg;
    cfg.w = 0.37;
    for (const SearchMemory* m : {static_cast<const SearchMemory*>(nullptr), static_cast<const SearchMemory*>(&memory)}) {
        const auto problem = make_problem(agents, table, cfg, m);
        for (int trial = 0; trial < 40; ++trial) {
            JointDecision d;
            for (int j = 0; j < 3; ++j) {
                d.per_agent.push_back({rng.uniform() < 0.5 ? Mode::Search : Mode::Track,
                                       static_cast<std::size_t>(rng.uniform_int(0, 16))});
            }
            const auto fast = problem.evaluate(d);
            const auto literal = evaluate(d, table, problem.controls(), SensingConfig{}, Arena{}, 10.0, m, cfg);
            EXPECT_NEAR(fast.search_cost, literal.search_cost, 1e-12);
            EXPECT_EQ(fast.track_cost, literal.track_cost);
            EXPECT_NEAR(fast.combined, literal.combined, 1e-12);
            const auto again = problem.evaluate(d);
            EXPECT_EQ(fast.combined, again.combined);
            EXPECT_EQ(fast.search_cost, again.search_cost);
        }
    }
}

TEST(Feasible, SeparationExamples)
{
    const auto make = [](AgentState a, AgentState b) {
        return std::vector<std::vector<ControlAction>>{{{a, 0}}, {{b, 0}}};
    };
    const JointDecision stay = uniform_decision(2, Mode::Search);
    EXPECT_FALSE(feasible(stay, make({10, 10}, {10, 10}), 60.0));
    EXPECT_TRUE(feasible(stay, make({10, 10}, {10.5, 10}), 0.0));
    EXPECT_TRUE(feasible(stay, make({0, 0}, {60.0001, 0}), 60.0));
    EXPECT_FALSE(feasible(stay, make({0, 0}, {60.0, 0}), 60.0));
    EXPECT_TRUE(feasible(uniform_decision(1, Mode::Track), {{{{0, 0}, 0}}}, 60.0));
}

TEST(Exhaustive, CandidateCounts)
{
    TrackCostTable one;
    one.costs = Eigen::MatrixXd::Ones(1, 17);
    const auto single = solve_exhaustive(make_problem({{250, 250}}, one));
    EXPECT_EQ(single.evaluations, 34u);
    EXPECT_EQ(single.decision.per_agent[0].mode, Mode::Search);

    TrackCostTable two;
    two.costs = Eigen::MatrixXd::Ones(2, 17);
    const auto pair = solve_exhaustive(make_problem({{100, 100}, {400, 400}}, two));
    EXPECT_EQ(pair.evaluations, 1156u);
}

TEST(Exhaustive, NotWorseThanRandomFeasibleDecisions)
{
    RandomStream rng(4);
    const std::vector<AgentState> agents{{200, 200}, {262, 200}};
    const auto problem = make_problem(agents, random_table(2, rng));
    const auto best = solve_exhaustive(problem);
    ASSERT_TRUE(problem.feasible(best.decision));
    int checked = 0;
    while (checked < 1000) {
        std::vector<int> g{static_cast<int>(rng.uniform_int(0, 33)), static_cast<int>(rng.uniform_int(0, 33))};
        const auto d = JointDecision::from_genes(g, 17);
        if (!problem.feasible(d)) {
            continue;
        }
        EXPECT_LE(best.values.combined, problem.evaluate(d).combined);
        ++checked;
    }
}

TEST(Exhaustive, SizeAndFeasibilityErrors)
{
    TrackCostTable four;
    four.costs = Eigen::MatrixXd::Ones(4, 17);
    EXPECT_THROW(solve_exhaustive(make_problem({{50, 50}, {200, 50}, {350, 50}, {450, 450}}, four)), SizeError);

    TrackCostTable two;
    two.costs = Eigen::MatrixXd::Ones(2, 17);
    ControllerConfig cfg;
    cfg.d_min = 400.0;
    EXPECT_THROW(solve_exhaustive(make_problem({{200, 200}, {250, 250}}, two, cfg)), InfeasibleError);
    RandomStream rng(5);
    EXPECT_THROW(solve_ga(make_problem({{200, 200}, {250, 250}}, two, cfg), rng), InfeasibleError);
}

TEST(Genetic, AgreesWithExhaustiveOnSmallInstances)
{
    int matches = 0;
    constexpr int instances = 10;
    for (int seed = 0; seed < instances; ++seed) {
        RandomStream rng(static_cast<std::uint64_t>(seed));
        const AgentState a{rng.uniform(50, 450), rng.uniform(50, 450)};
        AgentState b;
        do {
            b = {rng.uniform(0, 500), rng.uniform(0, 500)};
        } while (std::hypot(a.sx - b.sx, a.sy - b.sy) <= 80.0);
        const auto problem = make_problem({a, b}, random_table(2, rng));
        const auto exact = solve_exhaustive(problem);
        RandomStream ga_rng(100 + static_cast<std::uint64_t>(seed));
        const auto ga = solve_ga(problem, ga_rng);
        EXPECT_TRUE(problem.feasible(ga.decision));
        EXPECT_LE(ga.values.combined - exact.values.combined, 0.01);
        EXPECT_GE(ga.values.combined, exact.values.combined - 1e-15);
        matches += ga.decision == exact.decision ? 1 : 0;
    }
    EXPECT_GE(matches, 9);
}

TEST(Genetic, NeverWorseThanInitialPopulation)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        RandomStream rng(seed);
        const auto problem = make_problem({{100, 100}, {200, 150}, {330, 400}}, random_table(3, rng));
        RandomStream ga_rng(seed + 50);
        const auto s = solve_ga(problem, ga_rng);
        EXPECT_LE(s.values.combined, s.initial_best);
        EXPECT_GE(s.generations, 1u);
    }
}

TEST(Genetic, Deterministic)
{
    RandomStream rng(6);
    const auto problem = make_problem({{100, 100}, {200, 150}, {330, 400}}, random_table(3, rng));
    RandomStream a(9);
    RandomStream b(9);
    const auto sa = solve_ga(problem, a);
    const auto sb = solve_ga(problem, b);
    EXPECT_EQ(sa.decision, sb.decision);
    EXPECT_EQ(sa.values.combined, sb.values.combined);
    EXPECT_EQ(sa.generations, sb.generations);
}

TEST(Genetic, WeightEndpointsOptimizeSingleObjective)
{
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        RandomStream rng(seed + 20);
        const std::vector<AgentState> agents{{150, 200}, {320, 260}};
        const TrackCostTable table = random_table(2, rng);
        ControllerConfig search_only;
        search_only.w = 1.0;
        const auto p1 = make_problem(agents, table, search_only);
        RandomStream r1(seed);
        EXPECT_NEAR(solve_ga(p1, r1).values.search_cost, solve_exhaustive(p1).values.search_cost, 1e-12);

        ControllerConfig track_only;
        track_only.w = 0.0;
        const auto p0 = make_problem(agents, table, track_only);
        RandomStream r0(seed);
        EXPECT_NEAR(solve_ga(p0, r0).values.track_cost, solve_exhaustive(p0).values.track_cost, 1e-12);
    }
}

TEST(Genetic, TrackOnlyWeightPicksCheapestTrackers)
{
    TrackCostTable table;
    table.costs = Eigen::MatrixXd::Ones(3, 17);
    table.costs.row(0).setConstant(0.7);
    table.costs.row(1).setConstant(0.45);
    table.costs(1, 3) = 0.4;
    ControllerConfig cfg;
    cfg.w = 0.0;
    const auto problem = make_problem({{100, 100}, {250, 250}, {400, 400}}, table, cfg);
    RandomStream rng(7);
    const auto s = solve_ga(problem, rng);
    EXPECT_EQ(s.decision.per_agent[1], (AgentDecision{Mode::Track, 3}));
    EXPECT_EQ(s.decision.per_agent[0].mode, Mode::Search);
    EXPECT_EQ(s.decision.per_agent[2].mode, Mode::Search);
    EXPECT_DOUBLE_EQ(s.values.track_cost, 0.4);
}

TEST(Genetic, SearchOnlyWhenNoTargets)
{
    TrackCostTable table;
    table.costs = Eigen::MatrixXd::Ones(1, 17);
    RandomStream rng(8);
    const auto s = solve_ga(make_problem({{250, 250}}, table), rng);
    EXPECT_EQ(s.decision.per_agent[0].mode, Mode::Search);
}

TEST(Config, Validation)
{
    ControllerConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.w = 1.5;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.population_size = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}
