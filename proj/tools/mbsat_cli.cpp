// Command-line front end: run, mc, sweep-w and oracle-check.

#include "mbsat/errors.hpp"
#include "mbsat/runner.hpp"
#include "mbsat/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw mbsat::ConfigError("--w-list: '" + item + "' is not a number");
        }
    }
    if (out.empty()) {
        throw mbsat::ConfigError("--w-list: no values given");
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-agent joint search-and-track simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::size_t trials = 30;
    unsigned threads = 0;
    std::string w_list;
    std::size_t agents = 2;
    std::size_t seeds = 50;

    auto* run = app.add_subcommand("run", "Run one scenario and write trace.csv, ospa.csv, searchgrid_<k>.csv, summary.json");
    run->add_option("--scenario", scenario_path, "Scenario YAML file")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out", out_dir, "Output directory")->required();

    auto* mc = app.add_subcommand("mc", "Monte-Carlo batch; trial t uses seed base + t");
    mc->add_option("--scenario", scenario_path, "Scenario YAML file")->required();
    mc->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
    mc->add_option("--seed", seed, "Seed base (default: scenario seed)");
    mc->add_option("--threads", threads, "Worker threads (0 = all cores)");
    mc->add_option("--out", out_dir, "Output directory")->required();

    auto* sweep = app.add_subcommand("sweep-w", "Mode assignment versus tracking weight at fixed geometry");
    sweep->add_option("--scenario", scenario_path, "Scenario YAML file")->required();
    sweep->add_option("--w-list", w_list, "Comma-separated tracking weights in [0, 1]")->required();
    sweep->add_option("--out", out_dir, "Optional directory for sweep.csv");

    auto* oracle = app.add_subcommand("oracle-check", "Compare the GA against exhaustive enumeration");
    oracle->add_option("--agents", agents, "Agents per instance")->check(CLI::PositiveNumber);
    oracle->add_option("--seeds", seeds, "Number of random instances")->check(CLI::PositiveNumber);
    oracle->add_option("--scenario", scenario_path, "Scenario supplying the model and GA parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            mbsat::Scenario sc = mbsat::load_scenario(scenario_path);
            if (seed) {
                sc.seed = *seed;
            }
            const auto result = mbsat::run_scenario(sc);
            mbsat::write_run_outputs(sc, result, out_dir);
            std::printf("run: %zu steps written to %s\n", result.steps.size(), out_dir.c_str());
        } else if (*mc) {
            const mbsat::Scenario sc = mbsat::load_scenario(scenario_path);
            const std::uint64_t base = seed.value_or(sc.seed);
            const auto result = mbsat::run_monte_carlo(sc, trials, base, threads);
            mbsat::write_monte_carlo_outputs(sc, result, base, out_dir);
            std::printf("mc: %zu trials written to %s\n", trials, out_dir.c_str());
        } else if (*sweep) {
            const mbsat::Scenario sc = mbsat::load_scenario(scenario_path);
            const auto result = mbsat::sweep_w(sc, parse_list(w_list));
            std::ostringstream table;
            table << "w";
            for (std::size_t j = 0; j < result.agents.size(); ++j) {
                table << ",agent" << j << "_mode";
            }
            table << ",search_cost,track_cost,combined\n";
            for (const auto& p : result.points) {
                table << p.tracking_weight;
                for (const auto& a : p.decision.per_agent) {
                    table << ',' << mbsat::to_string(a.mode);
                }
                table << ',' << p.values.search_cost << ',' << p.values.track_cost << ',' << p.values.combined << '\n';
            }
            std::cout << table.str();
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                std::ofstream(std::filesystem::path(out_dir) / "sweep.csv") << table.str();
            }
        } else if (*oracle) {
            const mbsat::Scenario base = scenario_path.empty() ? mbsat::Scenario{} : mbsat::load_scenario(scenario_path);
            const auto report = mbsat::oracle_check(agents, seeds, base);
            std::printf("seed,ga_cost,exact_cost,same_decision\n");
            for (const auto& c : report.cases) {
                std::printf("%llu,%.9f,%.9f,%d\n", static_cast<unsigned long long>(c.seed), c.ga_cost, c.exact_cost,
                            c.same_decision ? 1 : 0);
            }
            std::printf("matches %zu/%zu, within 0.01: %zu/%zu, max gap %.3g\n", report.matches, report.cases.size(),
                        report.within_tolerance, report.cases.size(), report.max_gap);
            const bool ok = report.within_tolerance == report.cases.size()
                            && 10 * report.matches >= 9 * report.cases.size();
            return ok ? 0 : 1;
        }
    } catch (const mbsat::InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const mbsat::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
