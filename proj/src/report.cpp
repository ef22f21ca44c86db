#include "calbench/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace calbench {
namespace {

using nlohmann::json;

json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double num_from(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        if (j == "inf") return std::numeric_limits<double>::infinity();
        if (j == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("bad numeric field in report");
    }
    return j.get<double>();
}

json params_to_json(const ParamVector& p) {
    json out = json::array();
    for (const auto& e : p.entries())
        out.push_back({{"name", e.name},
                       {"value", num_or_null(e.value)},
                       {"lower", e.lower},
                       {"upper", e.upper}});
    return out;
}

ParamVector params_from_json(const json& j) {
    ParamVector p;
    for (const auto& e : j)
        p.add(e.at("name").get<std::string>(), num_from(e.at("value")),
              e.at("lower").get<double>(), e.at("upper").get<double>());
    return p;
}

json transforms_to_json(const std::vector<TransformTag>& ts) {
    json out = json::array();
    for (const auto& t : ts)
        out.push_back({{"kind", t.kind == TransformKind::FirstDifference ? "first_difference"
                                                                         : "drop_burn_in"},
                       {"n", t.n}});
    return out;
}

std::vector<TransformTag> transforms_from_json(const json& j) {
    std::vector<TransformTag> out;
    for (const auto& t : j) {
        TransformTag tag;
        tag.kind = t.at("kind") == "first_difference" ? TransformKind::FirstDifference
                                                      : TransformKind::DropBurnIn;
        tag.n = t.at("n").get<int>();
        out.push_back(tag);
    }
    return out;
}

json test_result_to_json(const TestResult& t) {
    return {{"test", t.test_id},
            {"statistic", num_or_null(t.statistic)},
            {"p_value", num_or_null(t.p_value)},
            {"input_lengths", t.input_lengths}};
}

TestResult test_result_from_json(const json& j) {
    TestResult t;
    t.test_id = j.at("test").get<std::string>();
    t.statistic = num_from(j.at("statistic"));
    t.p_value = num_from(j.at("p_value"));
    t.input_lengths = j.at("input_lengths").get<std::vector<std::size_t>>();
    return t;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json config_to_json(const ExperimentConfig& c) {
    json theta = json::object();
    for (const auto& e : c.theta_true.entries()) theta[e.name] = e.value;
    const QuantizerSpec q = c.mic.quantizer ? *c.mic.quantizer : default_quantizer(c.model_id);
    return {
        {"model", {{"id", c.model_id}, {"free", c.free_names}, {"sigma_eps", c.bh_sigma_eps}}},
        {"truth",
         {{"seed", c.truth_seed},
          {"t_emp", c.t_emp},
          {"stationarity_windows", c.stationarity_windows},
          {"theta", params_to_json(c.theta_true)}}},
        {"ensemble",
         {{"seed_base", c.ensemble_seed_base},
          {"t_sim", c.t_sim},
          {"r_smd", c.r_smd},
          {"r_bayes", c.r_bayes}}},
        {"methods",
         {{"msm",
           {{"enabled", c.msm.enabled},
            {"block_len", c.msm.block_len},
            {"bootstrap_samples", c.msm.bootstrap_samples},
            {"bootstrap_seed", c.msm.bootstrap_seed}}},
          {"gsl_div",
           {{"enabled", c.gsl.enabled},
            {"alphabet", c.gsl.settings.alphabet},
            {"max_word_len", c.gsl.settings.max_word_len},
            {"binning", "per-series support"},
            {"word_weights", "2l/(L(L+1))"}}},
          {"mic",
           {{"enabled", c.mic.enabled},
            {"lower_clamp", q.lower_clamp},
            {"upper_clamp", q.upper_clamp},
            {"bits_per_obs", q.bits_per_obs},
            {"memory_obs", q.memory_obs},
            {"ensemble_pooling", "counts pooled across replications"}}},
          {"pso",
           {{"enabled", c.pso.enabled},
            {"swarm", c.pso.settings.swarm},
            {"budget", c.pso.settings.budget},
            {"omega", c.pso.settings.omega},
            {"c1", c.pso.settings.c1},
            {"c2", c.pso.settings.c2},
            {"seed", c.pso.seed}}},
          {"cors",
           {{"enabled", c.cors.enabled},
            {"budget", c.cors.settings.budget},
            {"initial_design", c.cors.settings.initial_design},
            {"candidates", c.cors.settings.candidates},
            {"seed", c.cors.seed}}},
          {"bayes",
           {{"enabled", c.bayes.enabled},
            {"schedule", c.bayes.schedule},
            {"chains", c.bayes.mh.chains},
            {"draws", c.bayes.mh.draws_per_chain},
            {"burn_in", c.bayes.mh.burn_in},
            {"proposal_frac", c.bayes.mh.proposal_frac},
            {"bandwidth", c.bayes.bandwidth ? json(*c.bayes.bandwidth) : json(nullptr)},
            {"bandwidth_rule", "silverman"},
            {"kde_mode", kde_mode_name(c.bayes.kde_mode)},
            {"seed", c.bayes.seed},
            {"ks_panel", c.bayes.ks_panel_size}}}}},
        {"output",
         {{"dir", c.out_dir},
          {"surfaces", c.surfaces},
          {"surface_resolution", c.surface_resolution}}},
        {"common_random_numbers", true}};
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.model_id = j.at("model").at("id").get<std::string>();
    c.free_names = j.at("model").at("free").get<std::vector<std::string>>();
    c.bh_sigma_eps = j.at("model").at("sigma_eps").get<double>();
    c.theta_true = params_from_json(j.at("truth").at("theta"));
    c.truth_seed = j.at("truth").at("seed").get<std::int64_t>();
    c.t_emp = j.at("truth").at("t_emp").get<int>();
    c.stationarity_windows = j.at("truth").at("stationarity_windows").get<int>();

    const auto& ens = j.at("ensemble");
    c.ensemble_seed_base = ens.at("seed_base").get<std::int64_t>();
    c.t_sim = ens.at("t_sim").get<int>();
    c.r_smd = ens.at("r_smd").get<int>();
    c.r_bayes = ens.at("r_bayes").get<int>();

    const auto& m = j.at("methods");
    c.msm.enabled = m.at("msm").at("enabled").get<bool>();
    c.msm.block_len = m.at("msm").at("block_len").get<int>();
    c.msm.bootstrap_samples = m.at("msm").at("bootstrap_samples").get<int>();
    c.msm.bootstrap_seed = m.at("msm").at("bootstrap_seed").get<std::uint64_t>();

    c.gsl.enabled = m.at("gsl_div").at("enabled").get<bool>();
    c.gsl.settings.alphabet = m.at("gsl_div").at("alphabet").get<int>();
    c.gsl.settings.max_word_len = m.at("gsl_div").at("max_word_len").get<int>();

    c.mic.enabled = m.at("mic").at("enabled").get<bool>();
    QuantizerSpec q;
    q.lower_clamp = m.at("mic").at("lower_clamp").get<double>();
    q.upper_clamp = m.at("mic").at("upper_clamp").get<double>();
    q.bits_per_obs = m.at("mic").at("bits_per_obs").get<int>();
    q.memory_obs = m.at("mic").at("memory_obs").get<int>();
    c.mic.quantizer = q;

    c.pso.enabled = m.at("pso").at("enabled").get<bool>();
    c.pso.settings.swarm = m.at("pso").at("swarm").get<int>();
    c.pso.settings.budget = m.at("pso").at("budget").get<int>();
    c.pso.settings.omega = m.at("pso").at("omega").get<double>();
    c.pso.settings.c1 = m.at("pso").at("c1").get<double>();
    c.pso.settings.c2 = m.at("pso").at("c2").get<double>();
    c.pso.seed = m.at("pso").at("seed").get<std::uint64_t>();

    c.cors.enabled = m.at("cors").at("enabled").get<bool>();
    c.cors.settings.budget = m.at("cors").at("budget").get<int>();
    c.cors.settings.initial_design = m.at("cors").at("initial_design").get<int>();
    c.cors.settings.candidates = m.at("cors").at("candidates").get<int>();
    c.cors.seed = m.at("cors").at("seed").get<std::uint64_t>();

    c.bayes.enabled = m.at("bayes").at("enabled").get<bool>();
    c.bayes.schedule = m.at("bayes").at("schedule").get<std::string>();
    c.bayes.mh = named_mh_schedule(c.bayes.schedule);
    c.bayes.mh.chains = m.at("bayes").at("chains").get<int>();
    c.bayes.mh.draws_per_chain = m.at("bayes").at("draws").get<int>();
    c.bayes.mh.burn_in = m.at("bayes").at("burn_in").get<int>();
    c.bayes.mh.proposal_frac = m.at("bayes").at("proposal_frac").get<double>();
    if (!m.at("bayes").at("bandwidth").is_null())
        c.bayes.bandwidth = m.at("bayes").at("bandwidth").get<double>();
    c.bayes.kde_mode = kde_mode_from_string(m.at("bayes").at("kde_mode").get<std::string>());
    c.bayes.seed = m.at("bayes").at("seed").get<std::uint64_t>();
    c.bayes.ks_panel_size = m.at("bayes").at("ks_panel").get<int>();

    c.out_dir = j.at("output").at("dir").get<std::string>();
    c.surfaces = j.at("output").at("surfaces").get<bool>();
    c.surface_resolution = j.at("output").at("surface_resolution").get<int>();
    c.validate();
    return c;
}

json report_to_json(const ExperimentReport& report) {
    json methods = json::array();
    for (const auto& m : report.methods) {
        json jm = {{"name", m.name},
                   {"criterion", m.criterion},
                   {"optimizer", m.optimizer},
                   {"status", m.status},
                   {"error", m.error},
                   {"estimate", params_to_json(m.estimate_free)},
                   {"estimate_full", params_to_json(m.estimate_full)},
                   {"objective_value", num_or_null(m.objective_value)},
                   {"loss", num_or_null(m.loss)},
                   {"evaluations", m.evaluations},
                   {"wall_time_s", m.wall_time_s}};
        if (m.name == "bayes") {
            jm["acceptance_rates"] = m.acceptance_rates;
            jm["retained_draws"] = m.retained_draws;
            jm["ks_panel_p"] = m.ks_panel_p;
            if (m.posterior) {
                jm["posterior"] = {{"burn_in", m.posterior->burn_in},
                                   {"chains", m.posterior->chains},
                                   {"failed", m.posterior->failed},
                                   {"space", params_to_json(m.posterior->space)}};
            }
        }
        methods.push_back(std::move(jm));
    }

    json surfaces = json::array();
    for (const auto& s : report.surfaces) {
        json values = json::array();
        for (double v : s.values) values.push_back(num_or_null(v));
        surfaces.push_back(
            {{"criterion", s.criterion}, {"axes", s.axes}, {"points", s.points}, {"values", values}});
    }

    return {{"config", config_to_json(report.config)},
            {"truth_data",
             {{"model", report.truth.series.model},
              {"seed", report.truth.series.seed},
              {"t_requested", report.truth.series.t_requested},
              {"transforms", transforms_to_json(report.truth.series.transforms)},
              {"values", report.truth.series.values},
              {"stationarity", test_result_to_json(report.truth.stationarity)},
              {"stationarity_warning", report.truth.stationarity_warning}}},
            {"methods", methods},
            {"surfaces", surfaces}};
}

ExperimentReport report_from_json(const json& j) {
    ExperimentReport report;
    report.config = config_from_json(j.at("config"));

    const auto& td = j.at("truth_data");
    report.truth.series.model = td.at("model").get<std::string>();
    report.truth.series.seed = td.at("seed").get<std::int64_t>();
    report.truth.series.t_requested = td.at("t_requested").get<int>();
    report.truth.series.transforms = transforms_from_json(td.at("transforms"));
    report.truth.series.values = td.at("values").get<std::vector<double>>();
    report.truth.series.params = report.config.theta_true;
    report.truth.stationarity = test_result_from_json(td.at("stationarity"));
    report.truth.stationarity_warning = td.at("stationarity_warning").get<bool>();

    for (const auto& jm : j.at("methods")) {
        MethodResult m;
        m.name = jm.at("name").get<std::string>();
        m.criterion = jm.at("criterion").get<std::string>();
        m.optimizer = jm.at("optimizer").get<std::string>();
        m.status = jm.at("status").get<std::string>();
        m.error = jm.at("error").get<std::string>();
        m.estimate_free = params_from_json(jm.at("estimate"));
        m.estimate_full = params_from_json(jm.at("estimate_full"));
        m.objective_value = num_from(jm.at("objective_value"));
        m.loss = num_from(jm.at("loss"));
        m.evaluations = jm.at("evaluations").get<std::size_t>();
        m.wall_time_s = jm.at("wall_time_s").get<double>();
        if (jm.contains("acceptance_rates"))
            m.acceptance_rates = jm.at("acceptance_rates").get<std::vector<double>>();
        if (jm.contains("retained_draws"))
            m.retained_draws = jm.at("retained_draws").get<std::size_t>();
        if (jm.contains("ks_panel_p"))
            m.ks_panel_p = jm.at("ks_panel_p").get<std::vector<double>>();
        if (jm.contains("posterior")) {
            auto p = std::make_shared<PosteriorSample>();
            p->burn_in = jm.at("posterior").at("burn_in").get<int>();
            p->chains =
                jm.at("posterior").at("chains").get<std::vector<std::vector<std::vector<double>>>>();
            p->failed = jm.at("posterior").at("failed").get<std::vector<bool>>();
            p->space = params_from_json(jm.at("posterior").at("space"));
            p->acceptance_rates = m.acceptance_rates;
            m.posterior = std::move(p);
        }
        report.methods.push_back(std::move(m));
    }

    for (const auto& js : j.at("surfaces")) {
        SurfaceGrid s;
        s.criterion = js.at("criterion").get<std::string>();
        s.axes = js.at("axes").get<std::vector<std::string>>();
        s.points = js.at("points").get<std::vector<std::vector<double>>>();
        for (const auto& v : js.at("values")) s.values.push_back(num_from(v));
        report.surfaces.push_back(std::move(s));
    }
    return report;
}

void write_csv_tables(const ExperimentReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    {
        auto out = open_out(fs::path(dir) / "table.csv");
        out << "method";
        for (const auto& n : report.config.free_names) out << "," << n;
        out << ",loss\n";
        for (const auto& m : report.methods) {
            out << m.name;
            if (m.estimate_free.size() == report.config.free_names.size()) {
                for (const auto& e : m.estimate_free.entries())
                    out << "," << format_double(e.value);
            } else {
                for (std::size_t i = 0; i < report.config.free_names.size(); ++i) out << ",nan";
            }
            out << "," << format_double(m.loss) << "\n";
        }
    }

    for (const auto& m : report.methods) {
        if (m.name != "bayes") continue;
        if (m.posterior) {
            auto out = open_out(fs::path(dir) / "posterior_draws.csv");
            out << "chain,step";
            for (const auto& e : m.posterior->space.entries()) out << "," << e.name;
            out << "\n";
            const auto burn = static_cast<std::size_t>(m.posterior->burn_in);
            for (std::size_t c = 0; c < m.posterior->chains.size(); ++c) {
                const auto& chain = m.posterior->chains[c];
                for (std::size_t s = burn; s < chain.size(); ++s) {
                    out << c << "," << s;
                    for (double v : chain[s]) out << "," << format_double(v);
                    out << "\n";
                }
            }
        }
        if (!m.ks_panel_p.empty()) {
            auto out = open_out(fs::path(dir) / "ks_panel.csv");
            out << "member,p_value\n";
            for (std::size_t i = 0; i < m.ks_panel_p.size(); ++i)
                out << i << "," << format_double(m.ks_panel_p[i]) << "\n";
        }
    }

    for (const auto& s : report.surfaces) {
        auto out = open_out(fs::path(dir) / ("surface_" + s.criterion + ".csv"));
        for (std::size_t a = 0; a < s.axes.size(); ++a) out << (a ? "," : "") << s.axes[a];
        out << ",value\n";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            for (std::size_t a = 0; a < s.points[i].size(); ++a)
                out << (a ? "," : "") << format_double(s.points[i][a]);
            out << "," << format_double(s.values[i]) << "\n";
        }
    }
}

void export_report(const ExperimentReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto out = open_out(fs::path(dir) / "report.json");
    out << report_to_json(report).dump(2) << "\n";
    write_csv_tables(report, dir);
}

void write_truth_csv(const TruthData& truth, const std::string& path) {
    auto out = open_out(path);
    out << "t,value\n";
    for (std::size_t t = 0; t < truth.series.values.size(); ++t)
        out << t << "," << format_double(truth.series.values[t]) << "\n";
}

}  // namespace calbench
