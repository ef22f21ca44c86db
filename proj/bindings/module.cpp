#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "calbench/bayes.hpp"
#include "calbench/diagnostics.hpp"
#include "calbench/gsl_div.hpp"
#include "calbench/harness.hpp"
#include "calbench/mic.hpp"
#include "calbench/models.hpp"
#include "calbench/msm.hpp"
#include "calbench/optimize.hpp"
#include "calbench/parallel.hpp"
#include "calbench/report.hpp"

namespace py = pybind11;
using namespace calbench;

namespace {

ParamVector params_from_items(const std::vector<std::tuple<std::string, double, double, double>>& items) {
    ParamVector p;
    for (const auto& [name, value, lower, upper] : items) p.add(name, value, lower, upper);
    return p;
}

std::vector<std::tuple<std::string, double, double, double>> params_to_items(const ParamVector& p) {
    std::vector<std::tuple<std::string, double, double, double>> out;
    for (const auto& e : p.entries()) out.emplace_back(e.name, e.value, e.lower, e.upper);
    return out;
}

SeriesEnsemble ensemble_from_lists(const std::vector<std::vector<double>>& series) {
    SeriesEnsemble ens;
    for (const auto& s : series) {
        SimOutput o;
        o.values = s;
        ens.members.push_back(std::move(o));
    }
    return ens;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Simulation-based calibration benchmark core";

    py::register_exception<DegenerateSeriesError>(m, "DegenerateSeriesError");

    py::class_<ParamVector>(m, "ParamVector")
        .def(py::init(&params_from_items), py::arg("entries"),
             "entries: list of (name, value, lower, upper)")
        .def("values", &ParamVector::values)
        .def("names", &ParamVector::names)
        .def("get", &ParamVector::get)
        .def("set", &ParamVector::set)
        .def("items", &params_to_items)
        .def("__len__", &ParamVector::size);

    py::class_<SimOutput>(m, "SimOutput")
        .def_readonly("values", &SimOutput::values)
        .def_readonly("model", &SimOutput::model)
        .def_readonly("seed", &SimOutput::seed)
        .def_property_readonly("transforms", [](const SimOutput& s) {
            std::vector<std::string> out;
            for (const auto& t : s.transforms) out.push_back(transform_name(t));
            return out;
        });

    py::class_<TestResult>(m, "TestResult")
        .def_readonly("test_id", &TestResult::test_id)
        .def_readonly("statistic", &TestResult::statistic)
        .def_readonly("p_value", &TestResult::p_value);

    m.def("default_true_params", &default_true_params, py::arg("model_id"));
    m.def("simulate", &simulate_model, py::arg("model_id"), py::arg("params"), py::arg("t_len"),
          py::arg("seed"), py::arg("sigma_eps") = 0.01,
          "Seeded simulation of one of the four benchmark models");
    m.def("first_difference", &first_difference);

    m.def("compute_moments", [](const std::vector<double>& series) {
        const auto mv = compute_moments(series);
        return std::vector<double>(mv.m.begin(), mv.m.end());
    });
    m.def(
        "msm_objective",
        [](const std::vector<double>& real, const std::vector<std::vector<double>>& ensemble,
           int block_len, int bootstrap_samples, std::uint64_t seed) {
            const auto w = estimate_weight_matrix(real, block_len, bootstrap_samples, seed);
            return msm_objective(compute_moments(real), ensemble_from_lists(ensemble), w);
        },
        py::arg("real"), py::arg("ensemble"), py::arg("block_len") = 25,
        py::arg("bootstrap_samples") = 2000, py::arg("seed") = 777);

    m.def(
        "gsl_div",
        [](const std::vector<double>& real, const std::vector<std::vector<double>>& ensemble,
           int alphabet, int max_word_len) {
            return gsl_div(real, ensemble_from_lists(ensemble), {alphabet, max_word_len});
        },
        py::arg("real"), py::arg("ensemble"), py::arg("alphabet") = 10,
        py::arg("max_word_len") = 6);

    py::class_<QuantizerSpec>(m, "QuantizerSpec")
        .def(py::init([](double lo, double hi, int bits, int memory) {
                 return QuantizerSpec{lo, hi, bits, memory};
             }),
             py::arg("lower_clamp"), py::arg("upper_clamp"), py::arg("bits_per_obs"),
             py::arg("memory_obs"))
        .def_readonly("lower_clamp", &QuantizerSpec::lower_clamp)
        .def_readonly("upper_clamp", &QuantizerSpec::upper_clamp)
        .def_readonly("bits_per_obs", &QuantizerSpec::bits_per_obs)
        .def_readonly("memory_obs", &QuantizerSpec::memory_obs);
    m.def("default_quantizer", &default_quantizer, py::arg("model_id"));
    m.def(
        "mic_objective",
        [](const std::vector<double>& real, const std::vector<std::vector<double>>& ensemble,
           const QuantizerSpec& q) { return mic_objective(real, ensemble_from_lists(ensemble), q); },
        py::arg("real"), py::arg("ensemble"), py::arg("quantizer"));

    m.def(
        "kde_log_likelihood",
        [](const std::vector<double>& real, const std::vector<std::vector<double>>& ensemble,
           std::optional<double> bandwidth, const std::string& mode) {
            return kde_log_likelihood(real, ensemble_from_lists(ensemble), bandwidth,
                                      kde_mode_from_string(mode));
        },
        py::arg("real"), py::arg("ensemble"), py::arg("bandwidth") = std::nullopt,
        py::arg("mode") = "fast");

    m.def("stationarity_runs_test",
          [](const std::vector<double>& series, int windows) {
              return stationarity_runs_test(series, windows);
          },
          py::arg("series"), py::arg("n_windows") = 20);
    m.def("ks_two_sample", [](const std::vector<double>& a, const std::vector<double>& b) {
        return ks_two_sample(a, b);
    });

    m.def(
        "pso_minimize",
        [](const std::function<double(std::vector<double>)>& fn, const ParamVector& space,
           int swarm, int budget, std::uint64_t seed) {
            ObjectiveHandle handle(space, [&](std::span<const double> x) {
                return fn(std::vector<double>(x.begin(), x.end()));
            });
            PsoSettings st;
            st.swarm = swarm;
            st.budget = budget;
            st.parallel = false;  // python objectives hold the GIL
            const auto res = pso_minimize(handle, st, seed);
            return py::make_tuple(params_to_items(res.best), res.value, res.evaluations);
        },
        py::arg("objective"), py::arg("space"), py::arg("swarm") = 30, py::arg("budget") = 3000,
        py::arg("seed") = 0);

    m.def(
        "cors_minimize",
        [](const std::function<double(std::vector<double>)>& fn, const ParamVector& space,
           int budget, std::uint64_t seed) {
            ObjectiveHandle handle(space, [&](std::span<const double> x) {
                return fn(std::vector<double>(x.begin(), x.end()));
            });
            CorsSettings st;
            st.budget = budget;
            const auto res = cors_minimize(handle, st, seed);
            return py::make_tuple(params_to_items(res.best), res.value, res.evaluations);
        },
        py::arg("objective"), py::arg("space"), py::arg("budget") = 0, py::arg("seed") = 0);

    m.def(
        "mh_sample",
        [](const std::function<double(std::vector<double>)>& log_target, const ParamVector& space,
           int chains, int draws, int burn_in, double proposal_frac, std::uint64_t seed) {
            MhSettings st;
            st.chains = chains;
            st.draws_per_chain = draws;
            st.burn_in = burn_in;
            st.proposal_frac = proposal_frac;
            st.parallel = false;  // python targets hold the GIL
            const auto sample = mh_sample(
                [&](std::span<const double> x) {
                    return log_target(std::vector<double>(x.begin(), x.end()));
                },
                space, st, seed);
            return py::make_tuple(sample.chains, sample.acceptance_rates,
                                  params_to_items(posterior_mean(sample)));
        },
        py::arg("log_target"), py::arg("space"), py::arg("chains") = 4, py::arg("draws") = 5000,
        py::arg("burn_in") = 1500, py::arg("proposal_frac") = 0.025, py::arg("seed") = 0);

    m.def("loss", [](const ParamVector& a, const ParamVector& b) { return loss(a, b); });

    m.def("preset_names", &ExperimentConfig::preset_names);
    m.def(
        "run_experiment",
        [](const std::string& config_path, const std::vector<std::string>& overrides) {
            auto map = ConfigMap::parse_file(config_path);
            for (const auto& o : overrides) map.apply_override(o);
            const auto config = ExperimentConfig::from_config(map);
            const auto report = run_experiment(config);
            return report_to_json(report).dump();
        },
        py::arg("config_path"), py::arg("overrides") = std::vector<std::string>{},
        "Runs the full comparison and returns the report as a JSON string");
    m.def("set_max_threads", &set_max_threads);
}
