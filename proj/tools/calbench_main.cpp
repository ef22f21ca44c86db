#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "calbench/harness.hpp"
#include "calbench/parallel.hpp"
#include "calbench/report.hpp"

namespace {

bool g_json_logs = false;

void log_info(const std::string& msg) {
    if (g_json_logs) {
        nlohmann::json j = {{"level", "info"}, {"msg", msg}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << msg << "\n";
    }
}

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    unsigned threads = 0;
};

calbench::ExperimentConfig load_config(const CommonArgs& args) {
    auto map = calbench::ConfigMap::parse_file(args.config_path);
    for (const auto& o : args.overrides) map.apply_override(o);
    auto config = calbench::ExperimentConfig::from_config(map);
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    return config;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "experiment config file (TOML)");
    if (config_required) opt->required();
    cmd->add_option("--override", args.overrides,
                    "config override as section.key=value (repeatable)");
    cmd->add_option("--out", args.out_dir, "output directory (overrides [output] dir)");
    cmd->add_option("--threads", args.threads, "worker thread cap (default: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"calbench: simulation-based calibration benchmark"};
    app.require_subcommand(1);
    app.add_flag("--json-logs", g_json_logs, "machine-readable log lines");

    CommonArgs sim_args, surf_args, cal_args, cmp_args;
    std::string surface_criterion = "msm";
    std::vector<std::string> surface_axes;
    int surface_resolution = 0;
    std::string calibrate_method;
    std::string report_path;
    std::string report_out;

    auto* sim = app.add_subcommand("simulate", "write the truth series as CSV");
    add_common(sim, sim_args);

    auto* surf = app.add_subcommand("surface", "evaluate a criterion on a parameter grid");
    add_common(surf, surf_args);
    surf->add_option("--criterion", surface_criterion, "msm | gsl_div | mic");
    surf->add_option("--axes", surface_axes, "free parameters to sweep (1 or 2)");
    surf->add_option("--resolution", surface_resolution, "grid points per axis");

    auto* cal = app.add_subcommand("calibrate", "run one calibration method");
    add_common(cal, cal_args);
    cal->add_option("--method", calibrate_method, "bayes or criterion/optimizer, e.g. msm/pso")
        ->required();

    auto* cmp = app.add_subcommand("compare", "run the full method comparison");
    add_common(cmp, cmp_args);

    auto* rep = app.add_subcommand("report", "re-render CSV tables from a stored report");
    rep->add_option("--report", report_path, "path to report.json")->required();
    rep->add_option("--out", report_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) {
            if (sim_args.threads) calbench::set_max_threads(sim_args.threads);
            const auto config = load_config(sim_args);
            const auto truth = calbench::make_truth_data(config);
            std::filesystem::create_directories(config.out_dir);
            const auto path = std::filesystem::path(config.out_dir) / "truth.csv";
            calbench::write_truth_csv(truth, path.string());
            log_info("wrote " + path.string() +
                     " (stationarity p = " + calbench::format_double(truth.stationarity.p_value) +
                     ")");
            if (truth.stationarity_warning)
                log_info("warning: stationarity test rejects at the 1% level");
        } else if (surf->parsed()) {
            if (surf_args.threads) calbench::set_max_threads(surf_args.threads);
            auto config = load_config(surf_args);
            if (surface_resolution > 0) config.surface_resolution = surface_resolution;
            if (surface_axes.empty()) {
                surface_axes = config.free_names;
                if (surface_axes.size() > 2) surface_axes.resize(2);
            }
            const auto truth = calbench::make_truth_data(config);
            calbench::CriterionContext ctx(config, truth);
            const auto grid = calbench::grid_surface(ctx, surface_criterion, surface_axes,
                                                     config.surface_resolution);
            calbench::ExperimentReport shell;
            shell.config = config;
            shell.truth = truth;
            shell.surfaces.push_back(grid);
            std::filesystem::create_directories(config.out_dir);
            calbench::write_csv_tables(shell, config.out_dir);
            log_info("wrote " + (std::filesystem::path(config.out_dir) /
                                 ("surface_" + surface_criterion + ".csv"))
                                    .string());
        } else if (cal->parsed()) {
            if (cal_args.threads) calbench::set_max_threads(cal_args.threads);
            auto config = load_config(cal_args);
            // disable everything, then re-enable the requested method
            config.msm.enabled = config.gsl.enabled = config.mic.enabled = false;
            config.pso.enabled = config.cors.enabled = config.bayes.enabled = false;
            if (calibrate_method == "bayes") {
                config.bayes.enabled = true;
            } else {
                const auto slash = calibrate_method.find('/');
                if (slash == std::string::npos)
                    throw std::invalid_argument("method must be bayes or criterion/optimizer");
                const std::string criterion = calibrate_method.substr(0, slash);
                const std::string optimizer = calibrate_method.substr(slash + 1);
                if (criterion == "msm") config.msm.enabled = true;
                else if (criterion == "gsl_div") config.gsl.enabled = true;
                else if (criterion == "mic") config.mic.enabled = true;
                else throw std::invalid_argument("unknown criterion: " + criterion);
                if (optimizer == "pso") config.pso.enabled = true;
                else if (optimizer == "cors") config.cors.enabled = true;
                else throw std::invalid_argument("unknown optimizer: " + optimizer);
            }
            const auto report = calbench::run_experiment(config);
            calbench::export_report(report, config.out_dir);
            for (const auto& m : report.methods)
                log_info(m.name + ": loss = " + calbench::format_double(m.loss) + " (" + m.status +
                         ")");
            log_info("wrote " + config.out_dir + "/report.json");
        } else if (cmp->parsed()) {
            if (cmp_args.threads) calbench::set_max_threads(cmp_args.threads);
            const auto config = load_config(cmp_args);
            const auto report = calbench::run_experiment(config);
            calbench::export_report(report, config.out_dir);
            for (const auto& m : report.methods)
                log_info(m.name + ": loss = " + calbench::format_double(m.loss) + " (" + m.status +
                         ")");
            log_info("wrote " + config.out_dir + "/report.json");
        } else if (rep->parsed()) {
            std::ifstream in(report_path);
            if (!in) throw std::invalid_argument("cannot open report: " + report_path);
            nlohmann::json j;
            in >> j;
            const auto report = calbench::report_from_json(j);
            calbench::write_csv_tables(report, report_out);
            log_info("wrote CSV tables to " + report_out);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
