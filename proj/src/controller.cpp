#include "mbsat/controller.hpp"

#include "mbsat/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <utility>
#include <stdexcept>

namespace mbsat {

const char* to_string(Mode m)
{
    return m == Mode::Search ? "search" : "track";
}

std::vector<int> JointDecision::genes(std::size_t n_controls) const
{
    std::vector<int> g;
    g.reserve(per_agent.size());
    for (const auto& a : per_agent) {
        g.push_back(static_cast<int>(static_cast<std::size_t>(a.mode) * n_controls + a.control));
    }
    return g;
}

JointDecision JointDecision::from_genes(const std::vector<int>& genes, std::size_t n_controls)
{
    JointDecision d;
    d.per_agent.reserve(genes.size());
    for (int g : genes) {
        const auto u = static_cast<std::size_t>(g);
        d.per_agent.push_back({u / n_controls == 0 ? Mode::Search : Mode::Track, u % n_controls});
    }
    return d;
}

void ControllerConfig::validate() const
{
    if (!(w >= 0.0 && w <= 1.0)) {
        throw ConfigError("controller: w must lie in [0, 1]");
    }
    if (!(d_min >= 0.0)) {
        throw ConfigError("controller: d_min must be non-negative");
    }
    if (population_size < 2) {
        throw ConfigError("controller: population_size must be >= 2");
    }
    if (!(function_tolerance >= 0.0) || !(constraint_tolerance >= 0.0)) {
        throw ConfigError("controller: tolerances must be non-negative");
    }
    if (stall_generations < 1 || tournament_size < 1) {
        throw ConfigError("controller: stall_generations and tournament_size must be >= 1");
    }
    if (!(elite_fraction >= 0.0 && elite_fraction < 1.0) || !(crossover_rate >= 0.0 && crossover_rate <= 1.0)
        || !(mutation_rate <= 1.0)) {
        throw ConfigError("controller: elite_fraction, crossover_rate and mutation_rate must be probabilities");
    }
}

// ---- DecisionProblem ----

DecisionProblem::DecisionProblem(std::vector<std::vector<ControlAction>> controls, TrackCostTable table,
                                 const SensingConfig& sensing, const Arena& arena, double resolution,
                                 const SearchMemory* memory, ControllerConfig cfg)
    : controls_(std::move(controls)), table_(std::move(table)), cfg_(std::move(cfg))
{
    cfg_.validate();
    if (controls_.empty()) {
        throw std::invalid_argument("DecisionProblem: at least one agent required");
    }
    n_controls_ = controls_.front().size();
    for (const auto& c : controls_) {
        if (c.size() != n_controls_ || n_controls_ == 0) {
            throw std::invalid_argument("DecisionProblem: control sets must be non-empty and equal-sized");
        }
    }
    if (table_.agents() != controls_.size() || table_.controls() != n_controls_) {
        throw std::invalid_argument("DecisionProblem: track-cost table shape does not match the control sets");
    }
    const SearchGrid blank(arena, resolution);
    cell_weights_ = blank.cell_areas() / blank.cell_areas().sum();
    miss_.resize(controls_.size());
    weighted_miss_.resize(controls_.size());
    for (std::size_t j = 0; j < controls_.size(); ++j) {
        miss_[j].reserve(n_controls_);
        weighted_miss_[j].reserve(n_controls_);
        for (const auto& u : controls_[j]) {
            miss_[j].push_back(miss_probability_field(u.target, sensing, arena, resolution).values());
            weighted_miss_[j].push_back(cell_weights_ * miss_[j].back());
        }
    }
    if (memory != nullptr && !memory->empty()) {
        use_memory_ = true;
        memory_count_ = static_cast<double>(memory->size());
        if (memory->mode() == SearchMemory::Mode::Field) {
            Eigen::ArrayXXd field_sum = Eigen::ArrayXXd::Zero(blank.rows(), blank.cols());
            for (const auto& g : memory->history()) {
                field_sum += g.values();
            }
            memory_total_sum_ = (field_sum * cell_weights_).sum();
        } else {
            for (double t : memory->totals()) {
                memory_total_sum_ += t;
            }
        }
    }
}

DecisionProblem DecisionProblem::build(const std::vector<MultiBernoulli>& predicted,
                                       const std::vector<AgentState>& agents, const PlanningContext& ctx,
                                       const SearchMemory* memory, const ControllerConfig& cfg)
{
    std::vector<std::vector<ControlAction>> controls;
    controls.reserve(agents.size());
    for (const auto& s : agents) {
        controls.push_back(control_actions(s, ctx.agent_motion, ctx.arena));
    }
    TrackCostTable table = build_track_cost_table(predicted, controls, ctx.sensor, ctx.tracker);
    return DecisionProblem(std::move(controls), std::move(table), ctx.sensor.sensing, ctx.arena, ctx.grid_resolution,
                           memory, cfg);
}

std::vector<AgentState> DecisionProblem::searchers(const JointDecision& d) const
{
    std::vector<AgentState> out;
    for (std::size_t j = 0; j < d.per_agent.size(); ++j) {
        if (d.per_agent[j].mode == Mode::Search) {
            out.push_back(position(j, d.per_agent[j].control));
        }
    }
    return out;
}

namespace {

using ConstMap = Eigen::Map<const Eigen::ArrayXd>;

template <std::size_t... I>
double fused_product_sum(const double* const* fields, Eigen::Index cells, std::index_sequence<I...>)
{
    return (... * ConstMap(fields[I], cells)).sum();
}

/// sum_c prod_s fields[s](c) in a single vectorized pass for up to eight factors.
double product_sum(const double* const* fields, int count, Eigen::Index cells)
{
    switch (count) {
    case 1: return fused_product_sum(fields, cells, std::make_index_sequence<1>{});
    case 2: return fused_product_sum(fields, cells, std::make_index_sequence<2>{});
    case 3: return fused_product_sum(fields, cells, std::make_index_sequence<3>{});
    case 4: return fused_product_sum(fields, cells, std::make_index_sequence<4>{});
    case 5: return fused_product_sum(fields, cells, std::make_index_sequence<5>{});
    case 6: return fused_product_sum(fields, cells, std::make_index_sequence<6>{});
    case 7: return fused_product_sum(fields, cells, std::make_index_sequence<7>{});
    case 8: return fused_product_sum(fields, cells, std::make_index_sequence<8>{});
    default: break;
    }
    Eigen::ArrayXd product = ConstMap(fields[0], cells);
    for (int s = 1; s < count; ++s) {
        product *= ConstMap(fields[s], cells);
    }
    return product.sum();
}

} // namespace

ObjectiveValues DecisionProblem::evaluate(const JointDecision& d) const
{
    if (d.per_agent.size() != controls_.size()) {
        throw std::invalid_argument("evaluate: decision size does not match the agent count");
    }
    ObjectiveValues v;
    std::array<const double*, 16> fixed{};
    std::vector<const double*> dynamic;
    const double** fields = fixed.data();
    if (d.per_agent.size() > fixed.size()) {
        dynamic.resize(d.per_agent.size());
        fields = dynamic.data();
    }
    double track_sum = 0.0;
    int trackers = 0;
    int searchers = 0;
    for (std::size_t j = 0; j < d.per_agent.size(); ++j) {
        const auto& a = d.per_agent[j];
        if (a.control >= n_controls_) {
            throw std::out_of_range("evaluate: control index out of range");
        }
        if (a.mode == Mode::Search) {
            // The first searcher contributes its area-weighted field.
            fields[searchers] = searchers == 0 ? weighted_miss_[j][a.control].data() : miss_[j][a.control].data();
            ++searchers;
        } else {
            track_sum += table_.at(j, a.control);
            ++trackers;
        }
    }
    // The weights sum to one only up to rounding; an empty searcher set is exactly 1.
    const double instantaneous = searchers == 0 ? 1.0 : product_sum(fields, searchers, cell_weights_.size());
    v.search_cost = use_memory_ ? (memory_total_sum_ + instantaneous) / (memory_count_ + 1.0) : instantaneous;
    v.track_cost = trackers == 0 ? 1.0 : track_sum / trackers;
    v.combined = cfg_.w * v.search_cost + (1.0 - cfg_.w) * v.track_cost;
    return v;
}

bool DecisionProblem::feasible(const JointDecision& d) const
{
    return mbsat::feasible(d, controls_, cfg_.d_min);
}

// ---- Free functions ----

ObjectiveValues evaluate(const JointDecision& decision, const TrackCostTable& table,
                         const std::vector<std::vector<ControlAction>>& agent_controls, const SensingConfig& sensing,
                         const Arena& arena, double resolution, const SearchMemory* memory, const ControllerConfig& cfg)
{
    std::vector<AgentState> searchers;
    double track_sum = 0.0;
    int trackers = 0;
    for (std::size_t j = 0; j < decision.per_agent.size(); ++j) {
        const auto& a = decision.per_agent[j];
        if (a.mode == Mode::Search) {
            searchers.push_back(agent_controls.at(j).at(a.control).target);
        } else {
            track_sum += table.at(j, a.control);
            ++trackers;
        }
    }
    const SearchGrid field = search_value_field(searchers, sensing, arena, resolution);
    ObjectiveValues v;
    v.search_cost = memory != nullptr ? memory_search_cost(field, *memory) : total_search_cost(field);
    v.track_cost = trackers == 0 ? 1.0 : track_sum / trackers;
    v.combined = cfg.w * v.search_cost + (1.0 - cfg.w) * v.track_cost;
    return v;
}

bool feasible(const JointDecision& decision, const std::vector<std::vector<ControlAction>>& agent_controls,
              double d_min)
{
    const auto& a = decision.per_agent;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const AgentState& p = agent_controls.at(i).at(a[i].control).target;
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const AgentState& q = agent_controls.at(j).at(a[j].control).target;
            if (!(std::sqrt((p.sx - q.sx) * (p.sx - q.sx) + (p.sy - q.sy) * (p.sy - q.sy)) > d_min)) {
                return false;
            }
        }
    }
    return true;
}

// ---- Genetic algorithm ----

namespace {

constexpr double kInfeasiblePenalty = 10.0;

struct Individual {
    std::vector<int> genes;
    ObjectiveValues values;
    bool feasible = false;
    double fitness = 0.0;
};

bool fitter(const Individual& a, const Individual& b)
{
    if (a.fitness != b.fitness) {
        return a.fitness < b.fitness;
    }
    return a.genes < b.genes;
}

class GeneticSearch {
public:
    GeneticSearch(const DecisionProblem& problem, RandomStream& rng)
        : p_(problem), cfg_(problem.config()), rng_(rng), repair_base_(rng.fork())
    {
        agents_ = p_.agents();
        controls_ = p_.controls_per_agent();
        genes_ = static_cast<int>(2 * controls_);
        mutation_ = cfg_.mutation_rate < 0.0 ? 1.0 / static_cast<double>(agents_) : cfg_.mutation_rate;
        max_generations_ = cfg_.max_generations > 0 ? cfg_.max_generations : 150 * controls_ * agents_;
        elites_ = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(cfg_.elite_fraction * static_cast<double>(cfg_.population_size))));
        elites_ = std::min(elites_, cfg_.population_size);
    }

    Solution run()
    {
        std::vector<Individual> population;
        population.reserve(cfg_.population_size);
        for (std::size_t c = 0; c < cfg_.population_size; ++c) {
            std::vector<int> g(agents_);
            for (auto& x : g) {
                x = random_gene();
            }
            population.push_back(assess(std::move(g), 0, c));
        }
        std::size_t generation = 0;
        std::size_t stall = 0;
        double best_fitness = track_best(population);
        const double initial_best = best_ ? best_->values.combined : std::numeric_limits<double>::infinity();
        while (generation < max_generations_ && stall < cfg_.stall_generations) {
            ++generation;
            std::sort(population.begin(), population.end(), fitter);
            std::vector<Individual> next(population.begin(),
                                         population.begin() + static_cast<std::ptrdiff_t>(elites_));
            std::size_t child = 0;
            while (next.size() < cfg_.population_size) {
                std::vector<int> a = tournament(population).genes;
                std::vector<int> b = tournament(population).genes;
                if (rng_.uniform() < cfg_.crossover_rate) {
                    for (std::size_t j = 0; j < agents_; ++j) {
                        if (rng_.uniform() < 0.5) {
                            std::swap(a[j], b[j]);
                        }
                    }
                }
                mutate(a);
                mutate(b);
                next.push_back(assess(std::move(a), generation, child++));
                if (next.size() < cfg_.population_size) {
                    next.push_back(assess(std::move(b), generation, child++));
                }
            }
            population = std::move(next);
            const double f = track_best(population);
            if (best_fitness - f >= cfg_.function_tolerance) {
                stall = 0;
            } else {
                ++stall;
            }
            best_fitness = f;
        }
        if (!best_ || !best_->feasible) {
            throw InfeasibleError("no decision keeps every pair of agents more than d_min = "
                                  + std::to_string(cfg_.d_min) + " m apart");
        }
        Solution s;
        s.decision = JointDecision::from_genes(best_->genes, controls_);
        s.values = best_->values;
        s.generations = generation;
        s.evaluations = evaluations_;
        s.initial_best = initial_best;
        return s;
    }

private:
    int random_gene() { return static_cast<int>(rng_.uniform_int(0, genes_ - 1)); }

    void mutate(std::vector<int>& g)
    {
        for (auto& x : g) {
            if (rng_.uniform() < mutation_) {
                x = random_gene();
            }
        }
    }

    const Individual& tournament(const std::vector<Individual>& population)
    {
        const Individual* best = nullptr;
        for (std::size_t t = 0; t < cfg_.tournament_size; ++t) {
            const auto idx = static_cast<std::size_t>(
                rng_.uniform_int(0, static_cast<std::int64_t>(population.size()) - 1));
            if (best == nullptr || fitter(population[idx], *best)) {
                best = &population[idx];
            }
        }
        return *best;
    }

    AgentState position(std::size_t agent, int gene) const
    {
        return p_.position(agent, static_cast<std::size_t>(gene) % controls_);
    }

    bool separated(const AgentState& a, const AgentState& b) const
    {
        return std::sqrt((a.sx - b.sx) * (a.sx - b.sx) + (a.sy - b.sy) * (a.sy - b.sy)) > cfg_.d_min;
    }

    /// Moves later-indexed agents that conflict with an earlier one to a random separated control.
    /// The per-child stream is only created when a conflict has to be resolved.
    void repair(std::vector<int>& g, std::uint64_t key) const
    {
        std::optional<RandomStream> rng;
        std::vector<std::size_t> options;
        for (std::size_t j = 1; j < agents_; ++j) {
            bool conflict = false;
            for (std::size_t i = 0; i < j && !conflict; ++i) {
                conflict = !separated(position(i, g[i]), position(j, g[j]));
            }
            if (!conflict) {
                continue;
            }
            options.clear();
            for (std::size_t c = 0; c < controls_; ++c) {
                const AgentState q = p_.position(j, c);
                bool ok = true;
                for (std::size_t i = 0; i < j && ok; ++i) {
                    ok = separated(position(i, g[i]), q);
                }
                if (ok) {
                    options.push_back(c);
                }
            }
            if (!options.empty()) {
                if (!rng) {
                    rng.emplace(repair_base_.split(key));
                }
                const auto pick = options[static_cast<std::size_t>(
                    rng->uniform_int(0, static_cast<std::int64_t>(options.size()) - 1))];
                const int mode = g[j] / static_cast<int>(controls_);
                g[j] = mode * static_cast<int>(controls_) + static_cast<int>(pick);
            }
        }
    }

    Individual assess(std::vector<int> g, std::size_t generation, std::size_t child)
    {
        repair(g, generation * cfg_.population_size + child);
        Individual ind;
        ind.genes = std::move(g);
        auto it = cache_.find(ind.genes);
        if (it == cache_.end()) {
            const JointDecision d = JointDecision::from_genes(ind.genes, controls_);
            const bool ok = p_.feasible(d);
            it = cache_.emplace(ind.genes, std::make_pair(p_.evaluate(d), ok)).first;
            ++evaluations_;
        }
        ind.values = it->second.first;
        ind.feasible = it->second.second;
        ind.fitness = ind.values.combined + (ind.feasible ? 0.0 : kInfeasiblePenalty);
        return ind;
    }

    /// Updates the best feasible individual seen so far; returns the population's best fitness.
    double track_best(const std::vector<Individual>& population)
    {
        const Individual* top = nullptr;
        for (const auto& ind : population) {
            if (top == nullptr || fitter(ind, *top)) {
                top = &ind;
            }
            if (ind.feasible && (!best_ || fitter(ind, *best_))) {
                best_ = ind;
            }
        }
        return best_ ? std::min(best_->fitness, top->fitness) : top->fitness;
    }

    const DecisionProblem& p_;
    const ControllerConfig& cfg_;
    RandomStream& rng_;
    RandomStream repair_base_;
    std::size_t agents_ = 0;
    std::size_t controls_ = 0;
    int genes_ = 0;
    double mutation_ = 0.0;
    std::size_t max_generations_ = 0;
    std::size_t elites_ = 1;
    std::size_t evaluations_ = 0;
    std::optional<Individual> best_;
    std::map<std::vector<int>, std::pair<ObjectiveValues, bool>> cache_;
};

} // namespace

Solution solve_ga(const DecisionProblem& problem, RandomStream& rng)
{
    GeneticSearch ga(problem, rng);
    Solution s = ga.run();
    if (!problem.feasible(s.decision)) {
        throw std::logic_error("solve_ga produced an infeasible decision");
    }
    return s;
}

Solution solve_exhaustive(const DecisionProblem& problem)
{
    const std::size_t agents = problem.agents();
    const std::size_t controls = problem.controls_per_agent();
    const std::uint64_t base = 2 * controls;
    std::uint64_t total = 1;
    for (std::size_t j = 0; j < agents; ++j) {
        if (total > problem.config().exhaustive_limit / base) {
            throw SizeError("solve_exhaustive: (2|U|)^|S| exceeds the enumeration limit of "
                            + std::to_string(problem.config().exhaustive_limit));
        }
        total *= base;
    }
    std::vector<int> genes(agents, 0);
    std::optional<Solution> best;
    for (std::uint64_t n = 0; n < total; ++n) {
        const JointDecision d = JointDecision::from_genes(genes, controls);
        if (problem.feasible(d)) {
            const ObjectiveValues v = problem.evaluate(d);
            if (!best || v.combined < best->values.combined) {
                best = Solution{d, v, 0, 0};
            }
        }
        for (std::size_t j = agents; j-- > 0;) {
            if (++genes[j] < static_cast<int>(base)) {
                break;
            }
            genes[j] = 0;
        }
    }
    if (!best) {
        throw InfeasibleError("no decision keeps every pair of agents more than d_min = "
                              + std::to_string(problem.config().d_min) + " m apart");
    }
    best->evaluations = total;
    return *best;
}

} // namespace mbsat
