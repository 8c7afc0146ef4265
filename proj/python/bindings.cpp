#include "mbsat/errors.hpp"
#include "mbsat/metrics.hpp"
#include "mbsat/models.hpp"
#include "mbsat/objectives.hpp"
#include "mbsat/runner.hpp"
#include "mbsat/scenario.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace mbsat;

namespace {

PointSet to_points(const Eigen::MatrixXd& m)
{
    if (m.size() > 0 && m.cols() != 2) {
        throw py::value_error("point sets must have shape (n, 2)");
    }
    PointSet out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out.emplace_back(m(i, 0), m(i, 1));
    }
    return out;
}

Eigen::MatrixXd states_matrix(const std::vector<TargetState>& xs)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 4);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = xs[i].vector().transpose();
    }
    return m;
}

/// Column arrays of a run, one row per time step.
py::dict run_to_dict(const RunResult& run)
{
    const auto n = static_cast<Eigen::Index>(run.steps.size());
    const auto agents = run.steps.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(run.steps[0].agents.size());
    Eigen::VectorXi k(n);
    Eigen::VectorXd search(n);
    Eigen::VectorXd track(n);
    Eigen::VectorXd combined(n);
    Eigen::VectorXd ospa_series(n);
    Eigen::VectorXi n_hat(n);
    Eigen::MatrixXd x(n, agents);
    Eigen::MatrixXd y(n, agents);
    Eigen::MatrixXi mode(n, agents);
    Eigen::MatrixXi control(n, agents);
    py::list estimates;
    py::list truth;
    for (Eigen::Index i = 0; i < n; ++i) {
        const StepRecord& s = run.steps[static_cast<std::size_t>(i)];
        k(i) = s.k;
        search(i) = s.objective.search_cost;
        track(i) = s.objective.track_cost;
        combined(i) = s.objective.combined;
        ospa_series(i) = s.ospa;
        n_hat(i) = s.global_n_hat;
        for (Eigen::Index j = 0; j < agents; ++j) {
            const AgentRecord& a = s.agents[static_cast<std::size_t>(j)];
            x(i, j) = a.state.sx;
            y(i, j) = a.state.sy;
            mode(i, j) = static_cast<int>(a.mode);
            control(i, j) = static_cast<int>(a.control);
        }
        estimates.append(states_matrix(s.estimates));
        truth.append(states_matrix(s.truth));
    }
    py::dict d;
    d["k"] = k;
    d["search_cost"] = search;
    d["track_cost"] = track;
    d["combined"] = combined;
    d["ospa"] = ospa_series;
    d["n_hat"] = n_hat;
    d["agent_x"] = x;
    d["agent_y"] = y;
    d["mode"] = mode;
    d["control"] = control;
    d["estimates"] = estimates;
    d["truth"] = truth;
    return d;
}

py::dict stats_to_dict(const SeriesStatistics& s)
{
    py::dict d;
    d["mean"] = s.mean;
    d["std"] = s.stddev;
    return d;
}

} // namespace

PYBIND11_MODULE(_mbsat, m)
{
    m.doc() = "Multi-agent joint search and track: filters, planning and simulation";
    m.attr("__version__") = MBSAT_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError");
    py::register_exception<SizeError>(m, "SizeError");
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("horizon", &Scenario::horizon)
        .def_readwrite("seed", &Scenario::seed)
        .def_property(
            "w", [](const Scenario& s) { return s.controller.w; }, [](Scenario& s, double w) { s.controller.w = w; })
        .def_property(
            "clutter_rate", [](const Scenario& s) { return s.clutter.rate; },
            [](Scenario& s, double rate) { s.clutter = ClutterConfig::for_arena(rate, s.arena); })
        .def_property(
            "pd_max", [](const Scenario& s) { return s.sensing.pd_max; },
            [](Scenario& s, double pd) { s.sensing.pd_max = pd; })
        .def_property(
            "solver", [](const Scenario& s) { return s.solver == Solver::Genetic ? "ga" : "exhaustive"; },
            [](Scenario& s, const std::string& name) {
                if (name == "ga") {
                    s.solver = Solver::Genetic;
                } else if (name == "exhaustive") {
                    s.solver = Solver::Exhaustive;
                } else {
                    throw ConfigError("solver must be 'ga' or 'exhaustive'");
                }
            })
        .def_property(
            "agents",
            [](const Scenario& s) {
                std::vector<std::pair<double, double>> out;
                for (const auto& a : s.agents) {
                    out.emplace_back(a.sx, a.sy);
                }
                return out;
            },
            [](Scenario& s, const std::vector<std::pair<double, double>>& positions) {
                s.agents.clear();
                for (const auto& [x, y] : positions) {
                    s.agents.push_back({x, y});
                }
            })
        .def_property_readonly("num_agents", &Scenario::num_agents)
        .def("validate", &Scenario::validate)
        .def("to_json", [](const Scenario& s) { return scenario_json(s); });

    m.def("parse_scenario", &parse_scenario, py::arg("yaml_text"));
    m.def("load_scenario", [](const std::filesystem::path& p) { return load_scenario(p); }, py::arg("path"));

    py::class_<SensingConfig>(m, "SensingConfig")
        .def(py::init<>())
        .def_readwrite("pd_max", &SensingConfig::pd_max)
        .def_readwrite("eta", &SensingConfig::eta)
        .def_readwrite("r0", &SensingConfig::r0)
        .def("zero_range", &SensingConfig::zero_range);
    m.def("detection_probability", py::overload_cast<double, const SensingConfig&>(&detection_probability),
          py::arg("distance"), py::arg("sensing") = SensingConfig{});

    m.def("track_cost_from_statistics", &track_cost_from_statistics, py::arg("sigma_tilde"), py::arg("n_hat"),
          py::arg("v_cap") = 5.0);

    m.def(
        "ospa",
        [](const Eigen::MatrixXd& truth, const Eigen::MatrixXd& estimate, double c, double p) {
            return ospa(to_points(truth), to_points(estimate), OspaConfig{c, p});
        },
        py::arg("truth"), py::arg("estimate"), py::arg("c") = 100.0, py::arg("p") = 2.0);

    m.def(
        "run",
        [](const Scenario& sc) {
            RunResult run;
            {
                py::gil_scoped_release release;
                run = run_scenario(sc);
            }
            return run_to_dict(run);
        },
        py::arg("scenario"), "Runs one simulation and returns per-step arrays.");

    m.def(
        "monte_carlo",
        [](const Scenario& sc, std::size_t trials, std::uint64_t seed_base, unsigned threads) {
            MonteCarloResult mc;
            {
                py::gil_scoped_release release;
                mc = run_monte_carlo(sc, trials, seed_base, threads);
            }
            py::dict d;
            d["trials"] = mc.trials;
            d["search_cost"] = stats_to_dict(mc.search_cost);
            d["track_cost"] = stats_to_dict(mc.track_cost);
            d["ospa"] = stats_to_dict(mc.ospa);
            d["n_hat"] = stats_to_dict(mc.n_hat);
            return d;
        },
        py::arg("scenario"), py::arg("trials"), py::arg("seed_base"), py::arg("threads") = 0);

    m.def(
        "sweep_w",
        [](const Scenario& sc, const std::vector<double>& weights) {
            SweepResult r;
            {
                py::gil_scoped_release release;
                r = sweep_w(sc, weights);
            }
            const auto n = static_cast<Eigen::Index>(r.points.size());
            const auto agents = static_cast<Eigen::Index>(r.agents.size());
            Eigen::VectorXd w(n);
            Eigen::MatrixXi mode(n, agents);
            Eigen::MatrixXi control(n, agents);
            Eigen::VectorXd combined(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const SweepPoint& p = r.points[static_cast<std::size_t>(i)];
                w(i) = p.tracking_weight;
                combined(i) = p.values.combined;
                for (Eigen::Index j = 0; j < agents; ++j) {
                    mode(i, j) = static_cast<int>(p.decision.per_agent[static_cast<std::size_t>(j)].mode);
                    control(i, j) = static_cast<int>(p.decision.per_agent[static_cast<std::size_t>(j)].control);
                }
            }
            py::dict d;
            d["tracking_weight"] = w;
            d["mode"] = mode;
            d["control"] = control;
            d["combined"] = combined;
            d["track_cost_table"] = r.table.costs;
            return d;
        },
        py::arg("scenario"), py::arg("tracking_weights"));

    m.def(
        "oracle_check",
        [](std::size_t agents, std::size_t seeds) {
            OracleReport r;
            {
                py::gil_scoped_release release;
                r = oracle_check(agents, seeds);
            }
            py::dict d;
            d["cases"] = r.cases.size();
            d["matches"] = r.matches;
            d["within_tolerance"] = r.within_tolerance;
            d["max_gap"] = r.max_gap;
            return d;
        },
        py::arg("agents"), py::arg("seeds"));

    m.def(
        "write_outputs",
        [](const Scenario& sc, const std::filesystem::path& dir) {
            RunResult run;
            {
                py::gil_scoped_release release;
                run = run_scenario(sc);
            }
            write_run_outputs(sc, run, dir);
        },
        py::arg("scenario"), py::arg("directory"), "Runs the scenario and writes trace.csv, ospa.csv and summary.json.");
}
