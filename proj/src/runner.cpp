#include "mbsat/runner.hpp"

#include "mbsat/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

namespace mbsat {

namespace {

std::vector<AgentState> spawn_agents(const Scenario& sc, RandomStream& rng)
{
    const auto n = static_cast<std::size_t>(sc.agent_count);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<AgentState> out;
        int rejections = 0;
        while (out.size() < n && rejections < 10000) {
            const AgentState c{rng.uniform(0.0, sc.arena.width), rng.uniform(0.0, sc.arena.height)};
            const bool ok = std::all_of(out.begin(), out.end(), [&](const AgentState& a) {
                return std::hypot(a.sx - c.sx, a.sy - c.sy) > sc.controller.d_min;
            });
            if (ok) {
                out.push_back(c);
            } else {
                ++rejections;
            }
        }
        if (out.size() == n) {
            return out;
        }
    }
    throw InfeasibleError("could not spawn agents that are pairwise more than d_min apart");
}

std::vector<ScheduledTarget> draw_random_targets(const Scenario& sc, const std::vector<AgentState>& agents,
                                                 RandomStream& rng)
{
    const auto& rt = sc.random_targets;
    std::vector<ScheduledTarget> out;
    for (int i = 0; i < rt.count; ++i) {
        ScheduledTarget t;
        t.birth = static_cast<int>(rng.uniform_int(rt.birth_min, rt.birth_max));
        t.death = rt.death < 0 ? sc.horizon : rt.death;
        double x = 0.0;
        double y = 0.0;
        do {
            if (rt.spawn_radius > 0.0) {
                const AgentState& a = agents[static_cast<std::size_t>(i) % agents.size()];
                const double rho = rt.spawn_radius * std::sqrt(rng.uniform());
                const double phi = rng.uniform(-std::numbers::pi, std::numbers::pi);
                x = a.sx + rho * std::cos(phi);
                y = a.sy + rho * std::sin(phi);
            } else {
                x = rng.uniform(0.0, sc.arena.width);
                y = rng.uniform(0.0, sc.arena.height);
            }
        } while (!sc.arena.contains(x, y));
        t.initial = {x, rng.normal(0.0, rt.speed_std), y, rng.normal(0.0, rt.speed_std)};
        out.push_back(t);
    }
    return out;
}

PointSet positions(const std::vector<TargetState>& xs)
{
    PointSet p;
    p.reserve(xs.size());
    for (const auto& x : xs) {
        p.push_back(x.position());
    }
    return p;
}

void check_separation(const std::vector<AgentState>& agents, const ControllerConfig& cfg, int k)
{
    for (std::size_t i = 0; i < agents.size(); ++i) {
        for (std::size_t j = i + 1; j < agents.size(); ++j) {
            const double d = std::hypot(agents[i].sx - agents[j].sx, agents[i].sy - agents[j].sy);
            if (d <= cfg.d_min - cfg.constraint_tolerance) {
                throw std::logic_error("separation violated at k=" + std::to_string(k));
            }
        }
    }
}

/// Per-run simulation state shared by run_scenario and sweep_w.
struct Simulation {
    const Scenario& sc;
    MotionConfig filter_motion;
    MotionConfig truth_motion;
    SensorModel sensor;
    RandomStream root;
    RandomStream world_rng;
    RandomStream ga_rng;
    std::vector<RandomStream> filter_rng;
    std::vector<RandomStream> measure_rng;
    std::vector<AgentState> agents;
    GroundTruth world;
    std::vector<MultiBernoulli> beliefs;

    explicit Simulation(const Scenario& s)
        : sc(s),
          filter_motion(s.filter_motion()),
          truth_motion(s.truth_motion()),
          sensor(s.sensor()),
          root(s.seed),
          world_rng(root.split("world")),
          ga_rng(root.split("ga"))
    {
        RandomStream spawn = root.split("spawn");
        agents = s.random_spawn ? spawn_agents(s, spawn) : s.agents;
        RandomStream targets = root.split("targets");
        world.schedule = s.targets;
        for (auto& t : draw_random_targets(s, agents, targets)) {
            world.schedule.push_back(std::move(t));
        }
        world.stochastic_survival = s.stochastic_survival;
        world.arena_margin = s.arena_margin;
        for (std::size_t j = 0; j < agents.size(); ++j) {
            filter_rng.push_back(root.split("filter", j));
            measure_rng.push_back(root.split("measure", j));
        }
        beliefs.resize(agents.size());
        step_ground_truth(world, 0, truth_motion, s.arena, world_rng);
    }

    std::vector<MultiBernoulli> predict_all()
    {
        std::vector<MultiBernoulli> predicted;
        predicted.reserve(agents.size());
        for (std::size_t j = 0; j < agents.size(); ++j) {
            predicted.push_back(predict(beliefs[j], filter_motion, sc.birth, sc.arena, filter_rng[j]));
        }
        return predicted;
    }

    /// Measures from the current agent positions, updates and prunes; returns per-agent estimates.
    std::vector<StateEstimate> correct_all(const std::vector<MultiBernoulli>& predicted)
    {
        const std::vector<TargetState> truth = world.states();
        std::vector<StateEstimate> est;
        for (std::size_t j = 0; j < agents.size(); ++j) {
            const MeasurementSet z
                = generate_measurements(truth, agents[j], sc.sensing, sc.noise, sc.clutter, measure_rng[j]);
            const MultiBernoulli updated = update(predicted[j], z, agents[j], sensor, sc.filter, filter_rng[j]);
            beliefs[j] = prune_and_cap(updated, sc.filter, filter_rng[j]);
            est.push_back(estimate(beliefs[j]));
        }
        return est;
    }
};

} // namespace

RunResult run_scenario(const Scenario& sc)
{
    sc.validate();
    Simulation sim(sc);
    const PlanningContext ctx = sc.planning();
    SearchMemory memory(sc.memory.kappa, sc.memory.mode);
    RunResult result;
    result.steps.reserve(static_cast<std::size_t>(sc.horizon));

    for (int k = 1; k <= sc.horizon; ++k) {
        step_ground_truth(sim.world, k, sim.truth_motion, sc.arena, sim.world_rng);
        const std::vector<MultiBernoulli> predicted = sim.predict_all();

        const DecisionProblem problem = DecisionProblem::build(predicted, sim.agents, ctx,
                                                               sc.memory.enabled ? &memory : nullptr, sc.controller);
        const Solution sol
            = sc.solver == Solver::Exhaustive ? solve_exhaustive(problem) : solve_ga(problem, sim.ga_rng);
        for (std::size_t j = 0; j < sim.agents.size(); ++j) {
            sim.agents[j] = problem.position(j, sol.decision.per_agent[j].control);
        }
        check_separation(sim.agents, sc.controller, k);

        const SearchGrid field
            = search_value_field(problem.searchers(sol.decision), sc.sensing, sc.arena, sc.grid_resolution);
        if (sc.memory.enabled) {
            memory.push(field);
        }

        const std::vector<StateEstimate> est = sim.correct_all(predicted);

        StepRecord rec;
        rec.k = k;
        rec.objective = sol.values;
        rec.instantaneous_search_cost = total_search_cost(field);
        rec.generations = sol.generations;
        for (std::size_t j = 0; j < sim.agents.size(); ++j) {
            rec.agents.push_back({sim.agents[j], sol.decision.per_agent[j].mode, sol.decision.per_agent[j].control,
                                  est[j].cardinality.n_hat});
            rec.global_n_hat += est[j].cardinality.n_hat;
            rec.estimates.insert(rec.estimates.end(), est[j].states.begin(), est[j].states.end());
        }
        rec.truth = sim.world.states();
        rec.ospa = ospa(positions(rec.truth), positions(rec.estimates), sc.ospa);
        if (sc.grid_every > 0 && k % sc.grid_every == 0) {
            result.grids.emplace(k, field);
        }
        result.steps.push_back(std::move(rec));
    }
    return result;
}

MonteCarloResult run_monte_carlo(const Scenario& sc, std::size_t trials, std::uint64_t seed_base, unsigned threads,
                                 bool keep_runs)
{
    if (trials < 1) {
        throw ConfigError("mc: trials must be >= 1");
    }
    sc.validate();
    std::vector<RunResult> runs(trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t = next++; t < trials; t = next++) {
            try {
                Scenario trial = sc;
                trial.seed = seed_base + t;
                trial.grid_every = keep_runs ? sc.grid_every : 0;
                runs[t] = run_scenario(trial);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    MonteCarloResult mc;
    mc.trials = trials;
    std::vector<std::vector<double>> search(trials);
    std::vector<std::vector<double>> track(trials);
    std::vector<std::vector<double>> err(trials);
    std::vector<std::vector<double>> card(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        for (const auto& s : runs[t].steps) {
            search[t].push_back(s.objective.search_cost);
            track[t].push_back(s.objective.track_cost);
            err[t].push_back(s.ospa);
            card[t].push_back(s.global_n_hat);
        }
    }
    mc.search_cost = mc_aggregate(search);
    mc.track_cost = mc_aggregate(track);
    mc.ospa = mc_aggregate(err);
    mc.n_hat = mc_aggregate(card);
    if (keep_runs) {
        mc.runs = std::move(runs);
    }
    return mc;
}

SweepResult sweep_w(const Scenario& sc, const std::vector<double>& tracking_weights)
{
    sc.validate();
    for (double w : tracking_weights) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw ConfigError("sweep-w: weights must lie in [0, 1]");
        }
    }
    Simulation sim(sc);
    for (int k = 1; k <= sc.sweep_warmup; ++k) {
        step_ground_truth(sim.world, k, sim.truth_motion, sc.arena, sim.world_rng);
        sim.correct_all(sim.predict_all());
    }
    step_ground_truth(sim.world, sc.sweep_warmup + 1, sim.truth_motion, sc.arena, sim.world_rng);
    const std::vector<MultiBernoulli> predicted = sim.predict_all();

    const PlanningContext ctx = sc.planning();
    std::vector<std::vector<ControlAction>> controls;
    for (const auto& s : sim.agents) {
        controls.push_back(control_actions(s, ctx.agent_motion, ctx.arena));
    }
    SweepResult result;
    result.table = build_track_cost_table(predicted, controls, ctx.sensor, ctx.tracker);
    result.agents = sim.agents;
    for (const auto& b : sim.beliefs) {
        result.cardinality.push_back(cardinality_statistics(b.existence()));
    }
    for (double t : tracking_weights) {
        ControllerConfig cfg = sc.controller;
        cfg.w = 1.0 - t;
        const DecisionProblem problem(controls, result.table, sc.sensing, sc.arena, sc.grid_resolution, nullptr, cfg);
        Solution sol;
        try {
            sol = solve_exhaustive(problem);
        } catch (const SizeError&) {
            RandomStream rng = sim.ga_rng.split(std::bit_cast<std::uint64_t>(t));
            sol = solve_ga(problem, rng);
        }
        result.points.push_back({t, sol.decision, sol.values});
    }
    return result;
}

OracleReport oracle_check(std::size_t agents, std::size_t seeds, const Scenario& base, double tolerance)
{
    if (agents < 1) {
        throw ConfigError("oracle-check: need at least one agent");
    }
    const PlanningContext ctx = base.planning();
    const double d_min = base.controller.d_min;
    OracleReport report;
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
        RandomStream rng(seed);
        RandomStream layout = rng.split("layout");
        std::vector<AgentState> pos;
        while (pos.size() < agents) {
            AgentState c;
            if (!pos.empty() && layout.uniform() < 0.5) {
                // Just outside d_min of the previous agent so that moves can violate the constraint.
                const double rho = d_min + layout.uniform(1.0, 15.0);
                const double phi = layout.uniform(-std::numbers::pi, std::numbers::pi);
                c = {pos.back().sx + rho * std::cos(phi), pos.back().sy + rho * std::sin(phi)};
            } else {
                c = {layout.uniform(50.0, base.arena.width - 50.0), layout.uniform(50.0, base.arena.height - 50.0)};
            }
            const bool ok = base.arena.contains(c.sx, c.sy)
                            && std::all_of(pos.begin(), pos.end(), [&](const AgentState& a) {
                                   return std::hypot(a.sx - c.sx, a.sy - c.sy) > d_min;
                               });
            if (ok) {
                pos.push_back(c);
            }
        }
        RandomStream beliefs_rng = rng.split("beliefs");
        std::vector<MultiBernoulli> beliefs(agents);
        for (std::size_t j = 0; j < agents; ++j) {
            const auto n_targets = beliefs_rng.uniform_int(0, 2);
            for (std::int64_t t = 0; t < n_targets; ++t) {
                const double rho = beliefs_rng.uniform(5.0, 150.0);
                const double phi = beliefs_rng.uniform(-std::numbers::pi, std::numbers::pi);
                const double spread = beliefs_rng.uniform(0.5, 6.0);
                BernoulliComponent c;
                c.r = beliefs_rng.uniform(0.55, 0.99);
                for (int p = 0; p < 200; ++p) {
                    c.density.particles.push_back({{pos[j].sx + rho * std::cos(phi) + spread * beliefs_rng.normal(),
                                                    beliefs_rng.normal(), pos[j].sy + rho * std::sin(phi)
                                                                              + spread * beliefs_rng.normal(),
                                                    beliefs_rng.normal()},
                                                   1.0 / 200.0});
                }
                beliefs[j].components.push_back(std::move(c));
            }
        }
        const DecisionProblem problem = DecisionProblem::build(beliefs, pos, ctx, nullptr, base.controller);
        RandomStream ga_rng = rng.split("ga");
        const Solution ga = solve_ga(problem, ga_rng);
        const Solution exact = solve_exhaustive(problem);
        OracleCase oc{seed, ga.values.combined, exact.values.combined, ga.decision == exact.decision};
        report.max_gap = std::max(report.max_gap, oc.ga_cost - oc.exact_cost);
        report.matches += oc.same_decision ? 1 : 0;
        report.within_tolerance += (oc.ga_cost - oc.exact_cost <= tolerance) ? 1 : 0;
        report.cases.push_back(oc);
    }
    return report;
}

// ---- Output ----

namespace {

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string point_list(const std::vector<TargetState>& xs)
{
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) {
            s += ';';
        }
        s += fmt(xs[i].px) + ':' + fmt(xs[i].py);
    }
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

std::string solver_name(Solver s)
{
    return s == Solver::Exhaustive ? "exhaustive" : "ga";
}

} // namespace

void write_trace_csv(const RunResult& run, std::ostream& out)
{
    const std::size_t n_agents = run.steps.empty() ? 0 : run.steps.front().agents.size();
    out << "k";
    for (std::size_t j = 0; j < n_agents; ++j) {
        const std::string p = "agent" + std::to_string(j) + "_";
        out << ',' << p << "x," << p << "y," << p << "mode," << p << "control," << p << "nhat";
    }
    out << ",global_nhat,true_count,search_cost,track_cost,combined,instantaneous_search_cost,ospa,generations,"
           "estimates,truth\n";
    for (const auto& s : run.steps) {
        out << s.k;
        for (const auto& a : s.agents) {
            out << ',' << fmt(a.state.sx) << ',' << fmt(a.state.sy) << ',' << to_string(a.mode) << ',' << a.control
                << ',' << a.n_hat;
        }
        out << ',' << s.global_n_hat << ',' << s.truth.size() << ',' << fmt(s.objective.search_cost) << ','
            << fmt(s.objective.track_cost) << ',' << fmt(s.objective.combined) << ','
            << fmt(s.instantaneous_search_cost) << ',' << fmt(s.ospa) << ',' << s.generations << ','
            << point_list(s.estimates) << ',' << point_list(s.truth) << '\n';
    }
}

std::string scenario_json(const Scenario& sc)
{
    using nlohmann::json;
    json agents = json::array();
    for (const auto& a : sc.agents) {
        agents.push_back({a.sx, a.sy});
    }
    json targets = json::array();
    for (const auto& t : sc.targets) {
        json wp = json::array();
        for (const auto& w : t.waypoints) {
            wp.push_back({w.k, w.px, w.py});
        }
        targets.push_back({{"birth", t.birth},
                           {"death", t.death},
                           {"initial", {t.initial.px, t.initial.vx, t.initial.py, t.initial.vy}},
                           {"waypoints", wp}});
    }
    const auto& c = sc.controller;
    const auto& rt = sc.random_targets;
    json j = {
        {"name", sc.name},
        {"horizon", sc.horizon},
        {"seed", sc.seed},
        {"arena", {{"width", sc.arena.width}, {"height", sc.arena.height}}},
        {"motion", {{"dt", sc.dt}, {"survival", sc.survival}, {"process_noise_scale", sc.process_noise_scale}}},
        {"truth",
         {{"process_noise_scale", sc.truth_noise_scale},
          {"stochastic_survival", sc.stochastic_survival},
          {"arena_margin", sc.arena_margin}}},
        {"sensing", {{"pd_max", sc.sensing.pd_max}, {"eta", sc.sensing.eta}, {"r0", sc.sensing.r0}}},
        {"noise",
         {{"phi0", sc.noise.phi0},
          {"beta_phi", sc.noise.beta_phi},
          {"zeta0", sc.noise.zeta0},
          {"beta_zeta", sc.noise.beta_zeta}}},
        {"clutter",
         {{"rate", sc.clutter.rate},
          {"bearing_min", sc.clutter.bearing_min},
          {"bearing_max", sc.clutter.bearing_max},
          {"range_min", sc.clutter.range_min},
          {"range_max", sc.clutter.range_max}}},
        {"agent_motion",
         {{"delta_r", sc.agent_motion.delta_r}, {"n_r", sc.agent_motion.n_r}, {"n_theta", sc.agent_motion.n_theta}}},
        {"filter",
         {{"prune_threshold", sc.filter.prune_threshold},
          {"max_components", sc.filter.max_components},
          {"resample_threshold", sc.filter.resample_threshold},
          {"particles_per_component", sc.filter.particles_per_component}}},
        {"birth",
         {{"n_birth", sc.birth.n_birth},
          {"r_birth", sc.birth.r_birth},
          {"particles_per_birth", sc.birth.particles_per_birth},
          {"velocity_std", sc.birth.velocity_std}}},
        {"tracker", {{"v_cap", sc.tracker.v_cap}}},
        {"controller",
         {{"w", c.w},
          {"d_min", c.d_min},
          {"population_size", c.population_size},
          {"max_generations", c.max_generations},
          {"function_tolerance", c.function_tolerance},
          {"constraint_tolerance", c.constraint_tolerance},
          {"stall_generations", c.stall_generations},
          {"elite_fraction", c.elite_fraction},
          {"crossover_rate", c.crossover_rate},
          {"mutation_rate", c.mutation_rate},
          {"tournament_size", c.tournament_size},
          {"exhaustive_limit", c.exhaustive_limit},
          {"solver", solver_name(sc.solver)}}},
        {"search",
         {{"grid_resolution", sc.grid_resolution},
          {"memory",
           {{"enabled", sc.memory.enabled},
            {"kappa", sc.memory.kappa},
            {"mode", sc.memory.mode == SearchMemory::Mode::Field ? "field" : "scalar"}}}}},
        {"ospa", {{"c", sc.ospa.c}, {"p", sc.ospa.p}}},
        {"agents", {{"positions", agents}, {"random_spawn", sc.random_spawn}, {"count", sc.agent_count}}},
        {"targets", targets},
        {"random_targets",
         {{"count", rt.count},
          {"birth_min", rt.birth_min},
          {"birth_max", rt.birth_max},
          {"death", rt.death},
          {"spawn_radius", rt.spawn_radius},
          {"speed_std", rt.speed_std}}},
        {"output", {{"grid_every", sc.grid_every}}},
        {"sweep", {{"warmup_steps", sc.sweep_warmup}}},
    };
    return j.dump(2);
}

void write_run_outputs(const Scenario& sc, const RunResult& run, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "trace.csv", std::ios::binary);
        write_trace_csv(run, out);
    }
    std::vector<double> series;
    for (const auto& s : run.steps) {
        series.push_back(s.ospa);
    }
    {
        std::ofstream out(dir / "ospa.csv", std::ios::binary);
        write_ospa_csv(mc_aggregate({series}), out);
    }
    for (const auto& [k, grid] : run.grids) {
        std::ofstream out(dir / ("searchgrid_" + std::to_string(k) + ".csv"), std::ios::binary);
        write_grid_csv(grid, out);
    }
    using nlohmann::json;
    double mean_ospa = 0.0;
    json overcount = json::array();
    for (const auto& s : run.steps) {
        mean_ospa += s.ospa;
        if (static_cast<std::size_t>(s.global_n_hat) > s.truth.size()) {
            overcount.push_back(s.k);
        }
    }
    if (!run.steps.empty()) {
        mean_ospa /= static_cast<double>(run.steps.size());
    }
    json summary = {{"tool", "mbsat"},
                    {"version", MBSAT_VERSION},
                    {"command", "run"},
                    {"seed", sc.seed},
                    {"steps", run.steps.size()},
                    {"mean_ospa", mean_ospa},
                    {"overcount_steps", overcount},
                    {"scenario", json::parse(scenario_json(sc))}};
    if (!run.steps.empty()) {
        const auto& last = run.steps.back();
        json agents = json::array();
        for (const auto& a : last.agents) {
            agents.push_back({{"x", a.state.sx}, {"y", a.state.sy}, {"mode", to_string(a.mode)}, {"n_hat", a.n_hat}});
        }
        summary["final"] = {{"k", last.k},
                            {"agents", agents},
                            {"global_n_hat", last.global_n_hat},
                            {"true_count", last.truth.size()},
                            {"search_cost", last.objective.search_cost},
                            {"track_cost", last.objective.track_cost},
                            {"ospa", last.ospa}};
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");
}

void write_monte_carlo_outputs(const Scenario& sc, const MonteCarloResult& mc, std::uint64_t seed_base,
                               const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "ospa.csv", std::ios::binary);
        write_ospa_csv(mc.ospa, out);
    }
    {
        std::ofstream out(dir / "mc.csv", std::ios::binary);
        out << "timestep,searchCostMean,searchCostStd,trackCostMean,trackCostStd,ospaMean,ospaStd,nHatMean,nHatStd\n";
        for (std::size_t k = 0; k < mc.ospa.mean.size(); ++k) {
            out << k + 1 << ',' << fmt(mc.search_cost.mean[k]) << ',' << fmt(mc.search_cost.stddev[k]) << ','
                << fmt(mc.track_cost.mean[k]) << ',' << fmt(mc.track_cost.stddev[k]) << ',' << fmt(mc.ospa.mean[k])
                << ',' << fmt(mc.ospa.stddev[k]) << ',' << fmt(mc.n_hat.mean[k]) << ',' << fmt(mc.n_hat.stddev[k])
                << '\n';
        }
    }
    using nlohmann::json;
    json summary = {{"tool", "mbsat"},
                    {"version", MBSAT_VERSION},
                    {"command", "mc"},
                    {"trials", mc.trials},
                    {"seed_base", seed_base},
                    {"scenario", json::parse(scenario_json(sc))}};
    if (!mc.ospa.mean.empty()) {
        summary["final"] = {{"search_cost_mean", mc.search_cost.mean.back()},
                            {"track_cost_mean", mc.track_cost.mean.back()},
                            {"ospa_mean", mc.ospa.mean.back()}};
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");
}

} // namespace mbsat
