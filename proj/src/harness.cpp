#include "calbench/harness.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "calbench/parallel.hpp"

namespace calbench {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimOutput apply_transform_policy(SimOutput s) {
    if (model_uses_first_difference(s.model)) return first_difference(s);
    return s;
}

}  // namespace

MhSettings named_mh_schedule(const std::string& name) {
    MhSettings mh;
    if (name == "simple") {
        mh.chains = 4;
        mh.draws_per_chain = 5000;
        mh.burn_in = 1500;
    } else if (name == "large_set1") {
        mh.chains = 2;
        mh.draws_per_chain = 5000;
        mh.burn_in = 1500;
    } else if (name == "large_set2") {
        mh.chains = 2;
        mh.draws_per_chain = 10000;
        mh.burn_in = 1500;
    } else {
        throw std::invalid_argument("unknown MH schedule: " + name);
    }
    return mh;
}

void ExperimentConfig::validate() const {
    if (!is_known_model(model_id)) throw std::invalid_argument("unknown model id: " + model_id);
    if (t_emp < 1 || t_sim < 1) throw std::invalid_argument("series lengths must be positive");
    if (r_smd < 1 || r_bayes < 1) throw std::invalid_argument("ensemble sizes must be positive");
    if (free_names.empty()) throw std::invalid_argument("free parameter set must be non-empty");
    for (const auto& n : free_names)
        if (!theta_true.has(n))
            throw std::invalid_argument("free parameter not in theta_true: " + n);

    // Truth and ensemble seeds must be disjoint.
    const std::int64_t r_max = std::max(r_smd, r_bayes);
    if (truth_seed >= ensemble_seed_base && truth_seed < ensemble_seed_base + r_max)
        throw std::invalid_argument("truth seed " + std::to_string(truth_seed) +
                                    " collides with ensemble seeds [" +
                                    std::to_string(ensemble_seed_base) + ", " +
                                    std::to_string(ensemble_seed_base + r_max - 1) + "]");
    if (bayes.enabled) {
        if (bayes.mh.draws_per_chain <= bayes.mh.burn_in)
            throw std::invalid_argument("MH draws per chain must exceed burn-in");
    }
    if (mic.quantizer) mic.quantizer->validate();
    if (bh_sigma_eps <= 0.0) throw std::invalid_argument("sigma_eps must be positive");
}

double loss(const ParamVector& theta_true, const ParamVector& theta_hat) {
    return param_distance(theta_true, theta_hat);
}

TruthData make_truth_data(const ExperimentConfig& config) {
    config.validate();
    SimOutput truth = apply_transform_policy(simulate_model(
        config.model_id, config.theta_true, config.t_emp, config.truth_seed, config.bh_sigma_eps));
    TruthData out;
    out.stationarity = stationarity_runs_test(truth.values, config.stationarity_windows);
    out.stationarity_warning = out.stationarity.p_value < 0.01;
    out.series = std::move(truth);
    return out;
}

CriterionContext::CriterionContext(const ExperimentConfig& config, const TruthData& truth)
    : config_(config), truth_(truth), free_space_(config.free_space()) {
    quantizer_ = config.mic.quantizer ? *config.mic.quantizer : default_quantizer(config.model_id);
    // Flat prior over the box: constant density 1/volume inside.
    double log_vol = 0.0;
    for (const auto& e : free_space_.entries()) log_vol += std::log(e.upper - e.lower);
    log_prior_ = -log_vol;
}

SeriesEnsemble CriterionContext::simulate_ensemble(std::span<const double> free_values,
                                                   int replications) const {
    const ParamVector theta = config_.theta_true.merged(free_space_.with_values(free_values));
    SeriesEnsemble ens;
    ens.members.resize(static_cast<std::size_t>(replications));
    parallel_for(static_cast<std::size_t>(replications), [&](std::size_t k) {
        const std::int64_t seed = config_.ensemble_seed_base + static_cast<std::int64_t>(k);
        ens.members[k] = apply_transform_policy(
            simulate_model(config_.model_id, theta, config_.t_sim, seed, config_.bh_sigma_eps));
    }, 1);  // callers parallelize at a coarser level
    return ens;
}

const MomentVector& CriterionContext::real_moments() const {
    if (!real_moments_)
        real_moments_ = std::make_unique<MomentVector>(compute_moments(truth_.series.values));
    return *real_moments_;
}

const WeightMatrix& CriterionContext::weight_matrix() const {
    if (!weights_)
        weights_ = std::make_unique<WeightMatrix>(
            estimate_weight_matrix(truth_.series.values, config_.msm.block_len,
                                   config_.msm.bootstrap_samples, config_.msm.bootstrap_seed));
    return *weights_;
}

double CriterionContext::criterion_value(const std::string& criterion,
                                         std::span<const double> free_values) const {
    try {
        const auto ens = simulate_ensemble(free_values, config_.r_smd);
        if (criterion == "msm") return msm_objective(real_moments(), ens, weight_matrix());
        if (criterion == "gsl_div") return gsl_div(truth_.series.values, ens, config_.gsl.settings);
        if (criterion == "mic") return mic_objective(truth_.series.values, ens, quantizer_);
    } catch (const DegenerateSeriesError&) {
        return kInf;  // a divergent simulation cannot fit; keep the optimizer going
    }
    throw std::invalid_argument("unknown criterion: " + criterion);
}

double CriterionContext::log_posterior(std::span<const double> free_values) const {
    for (std::size_t i = 0; i < free_space_.size(); ++i)
        if (free_values[i] < free_space_[i].lower || free_values[i] > free_space_[i].upper)
            return -kInf;
    try {
        const auto ens = simulate_ensemble(free_values, config_.r_bayes);
        return kde_log_likelihood(truth_.series.values, ens, config_.bayes.bandwidth,
                                  config_.bayes.kde_mode) +
               log_prior_;
    } catch (const DegenerateSeriesError&) {
        return -kInf;
    }
}

namespace {

MethodResult run_smd_method(const CriterionContext& ctx, const std::string& criterion,
                            const std::string& optimizer) {
    const auto& config = ctx.config();
    MethodResult out;
    out.name = criterion + "/" + optimizer;
    out.criterion = criterion;
    out.optimizer = optimizer;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        ObjectiveHandle handle(ctx.config().free_space(), [&](std::span<const double> x) {
            return ctx.criterion_value(criterion, x);
        });
        OptimizeResult res;
        if (optimizer == "pso") {
            res = pso_minimize(handle, config.pso.settings, config.pso.seed);
        } else if (optimizer == "cors") {
            res = cors_minimize(handle, config.cors.settings, config.cors.seed);
        } else {
            throw std::invalid_argument("unknown optimizer: " + optimizer);
        }
        out.estimate_free = res.best;
        out.estimate_full = config.theta_true.merged(res.best);
        out.objective_value = res.value;
        out.evaluations = res.evaluations;
        out.loss = loss(config.theta_true.subset(config.free_names), res.best);
    } catch (const std::exception& e) {
        out.status = "failed";
        out.error = e.what();
    }
    out.wall_time_s = seconds_since(t0);
    return out;
}

MethodResult run_bayes_method(const CriterionContext& ctx) {
    const auto& config = ctx.config();
    MethodResult out;
    out.name = "bayes";
    out.criterion = "kde";
    out.optimizer = "mh";
    const auto t0 = std::chrono::steady_clock::now();
    try {
        MhSettings mh = config.bayes.mh;
        auto sample = std::make_shared<PosteriorSample>(mh_sample(
            [&](std::span<const double> x) { return ctx.log_posterior(x); },
            config.free_space(), mh, config.bayes.seed));
        out.posterior = sample;
        out.acceptance_rates = sample->acceptance_rates;
        out.retained_draws = sample->retained_count();
        out.estimate_free = posterior_mean(*sample);
        out.estimate_full = config.theta_true.merged(out.estimate_free);
        out.loss = loss(config.theta_true.subset(config.free_names), out.estimate_free);
        out.evaluations = static_cast<std::size_t>(mh.chains) *
                          static_cast<std::size_t>(mh.draws_per_chain);
        out.objective_value = ctx.log_posterior(out.estimate_free.values());

        // Goodness-of-fit panel: truth data against each ensemble member
        // simulated at the posterior-mean estimate.
        const auto free_vals = out.estimate_free.values();
        const auto panel = ctx.simulate_ensemble(free_vals, config.bayes.ks_panel_size);
        out.ks_panel_p.reserve(panel.size());
        for (const auto& member : panel.members)
            out.ks_panel_p.push_back(
                ks_two_sample(ctx.truth().series.values, member.values).p_value);
    } catch (const std::exception& e) {
        out.status = "failed";
        out.error = e.what();
    }
    out.wall_time_s = seconds_since(t0);
    return out;
}

}  // namespace

SurfaceGrid grid_surface(const CriterionContext& ctx, const std::string& criterion,
                         const std::vector<std::string>& axes, int resolution) {
    if (axes.empty() || axes.size() > 2)
        throw std::invalid_argument("grid_surface: one or two axes required");
    if (resolution < 2) throw std::invalid_argument("grid_surface: resolution must be >= 2");
    const auto space = ctx.config().free_space();
    for (const auto& a : axes)
        if (!space.has(a))
            throw std::invalid_argument("grid_surface: axis is not a free parameter: " + a);

    SurfaceGrid grid;
    grid.criterion = criterion;
    grid.axes = axes;

    const ParamVector axis_space = space.subset(axes);
    std::vector<std::vector<double>> axis_values(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const double lo = axis_space[i].lower, hi = axis_space[i].upper;
        for (int k = 0; k < resolution; ++k)
            axis_values[i].push_back(lo + (hi - lo) * static_cast<double>(k) /
                                              static_cast<double>(resolution - 1));
    }

    std::vector<std::vector<double>> nodes;
    if (axes.size() == 1) {
        for (double v : axis_values[0]) nodes.push_back({v});
    } else {
        for (double v0 : axis_values[0])
            for (double v1 : axis_values[1]) nodes.push_back({v0, v1});
    }

    grid.points = nodes;
    grid.values.assign(nodes.size(), std::numeric_limits<double>::quiet_NaN());
    const auto base = space.values();
    const auto& names = ctx.config().free_names;
    parallel_for(nodes.size(), [&](std::size_t i) {
        auto point = base;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            for (std::size_t j = 0; j < names.size(); ++j)
                if (names[j] == axes[a]) point[j] = nodes[i][a];
        }
        try {
            grid.values[i] = ctx.criterion_value(criterion, point);
        } catch (const std::exception&) {
            // leave NaN
        }
    });
    return grid;
}

const MethodResult* ExperimentReport::find_method(const std::string& name) const {
    for (const auto& m : methods)
        if (m.name == name) return &m;
    return nullptr;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    report.config = config;
    report.truth = make_truth_data(config);

    CriterionContext ctx(config, report.truth);
    if (config.msm.enabled) ctx.weight_matrix();  // fail early and share the work

    std::vector<std::pair<std::string, std::string>> smd;
    for (const auto& criterion : {std::string("msm"), std::string("gsl_div"), std::string("mic")}) {
        const bool on = (criterion == "msm" && config.msm.enabled) ||
                        (criterion == "gsl_div" && config.gsl.enabled) ||
                        (criterion == "mic" && config.mic.enabled);
        if (!on) continue;
        if (config.pso.enabled) smd.emplace_back(criterion, "pso");
        if (config.cors.enabled) smd.emplace_back(criterion, "cors");
    }

    for (const auto& [criterion, optimizer] : smd)
        report.methods.push_back(run_smd_method(ctx, criterion, optimizer));
    if (config.bayes.enabled) report.methods.push_back(run_bayes_method(ctx));

    if (config.surfaces) {
        std::vector<std::string> axes = config.free_names;
        if (axes.size() > 2) axes.resize(2);
        for (const auto& criterion :
             {std::string("msm"), std::string("gsl_div"), std::string("mic")}) {
            const bool on = (criterion == "msm" && config.msm.enabled) ||
                            (criterion == "gsl_div" && config.gsl.enabled) ||
                            (criterion == "mic" && config.mic.enabled);
            if (on)
                report.surfaces.push_back(
                    grid_surface(ctx, criterion, axes, config.surface_resolution));
        }
    }
    return report;
}

ExperimentConfig ExperimentConfig::from_config(const ConfigMap& map) {
    ExperimentConfig c;
    c.model_id = map.get_string("model.id", "");
    if (c.model_id.empty()) throw std::invalid_argument("config: model.id is required");
    if (!is_known_model(c.model_id))
        throw std::invalid_argument("config: unknown model id: " + c.model_id);
    c.theta_true = default_true_params(c.model_id);
    for (const auto& key : map.keys_with_prefix("truth.theta")) {
        const std::string name = key.substr(std::string("truth.theta.").size());
        c.theta_true.set(name, map.get_number(key, 0.0));
    }
    c.free_names = map.get_string_array("model.free");
    if (c.free_names.empty()) throw std::invalid_argument("config: model.free is required");
    c.bh_sigma_eps = map.get_number("model.sigma_eps", c.bh_sigma_eps);

    c.truth_seed = map.get_int("truth.seed", c.truth_seed);
    c.t_emp = static_cast<int>(map.get_int("truth.t_emp", c.t_emp));
    c.stationarity_windows =
        static_cast<int>(map.get_int("truth.stationarity_windows", c.stationarity_windows));

    c.ensemble_seed_base = map.get_int("ensemble.seed_base", c.ensemble_seed_base);
    c.t_sim = static_cast<int>(map.get_int("ensemble.t_sim", c.t_sim));
    c.r_smd = static_cast<int>(map.get_int("ensemble.r_smd", c.r_smd));
    c.r_bayes = static_cast<int>(map.get_int("ensemble.r_bayes", c.r_bayes));

    c.msm.enabled = map.get_bool("methods.msm.enabled", c.msm.enabled);
    c.msm.block_len = static_cast<int>(map.get_int("methods.msm.block_len", c.msm.block_len));
    c.msm.bootstrap_samples = static_cast<int>(
        map.get_int("methods.msm.bootstrap_samples", c.msm.bootstrap_samples));
    c.msm.bootstrap_seed = static_cast<std::uint64_t>(
        map.get_int("methods.msm.bootstrap_seed", static_cast<std::int64_t>(c.msm.bootstrap_seed)));

    c.gsl.enabled = map.get_bool("methods.gsl_div.enabled", c.gsl.enabled);
    c.gsl.settings.alphabet =
        static_cast<int>(map.get_int("methods.gsl_div.alphabet", c.gsl.settings.alphabet));
    c.gsl.settings.max_word_len =
        static_cast<int>(map.get_int("methods.gsl_div.max_word_len", c.gsl.settings.max_word_len));

    c.mic.enabled = map.get_bool("methods.mic.enabled", c.mic.enabled);
    if (map.has("methods.mic.lower_clamp") || map.has("methods.mic.upper_clamp") ||
        map.has("methods.mic.bits_per_obs") || map.has("methods.mic.memory_obs")) {
        QuantizerSpec q = default_quantizer(c.model_id);
        q.lower_clamp = map.get_number("methods.mic.lower_clamp", q.lower_clamp);
        q.upper_clamp = map.get_number("methods.mic.upper_clamp", q.upper_clamp);
        q.bits_per_obs =
            static_cast<int>(map.get_int("methods.mic.bits_per_obs", q.bits_per_obs));
        q.memory_obs = static_cast<int>(map.get_int("methods.mic.memory_obs", q.memory_obs));
        c.mic.quantizer = q;
    }

    c.pso.enabled = map.get_bool("methods.pso.enabled", c.pso.enabled);
    c.pso.settings.swarm = static_cast<int>(map.get_int("methods.pso.swarm", c.pso.settings.swarm));
    c.pso.settings.budget =
        static_cast<int>(map.get_int("methods.pso.budget", c.pso.settings.budget));
    c.pso.settings.omega = map.get_number("methods.pso.omega", c.pso.settings.omega);
    c.pso.settings.c1 = map.get_number("methods.pso.c1", c.pso.settings.c1);
    c.pso.settings.c2 = map.get_number("methods.pso.c2", c.pso.settings.c2);
    c.pso.seed = static_cast<std::uint64_t>(
        map.get_int("methods.pso.seed", static_cast<std::int64_t>(c.pso.seed)));

    c.cors.enabled = map.get_bool("methods.cors.enabled", c.cors.enabled);
    c.cors.settings.budget =
        static_cast<int>(map.get_int("methods.cors.budget", c.cors.settings.budget));
    c.cors.settings.initial_design =
        static_cast<int>(map.get_int("methods.cors.initial_design", c.cors.settings.initial_design));
    c.cors.settings.candidates =
        static_cast<int>(map.get_int("methods.cors.candidates", c.cors.settings.candidates));
    c.cors.seed = static_cast<std::uint64_t>(
        map.get_int("methods.cors.seed", static_cast<std::int64_t>(c.cors.seed)));

    c.bayes.enabled = map.get_bool("methods.bayes.enabled", c.bayes.enabled);
    c.bayes.schedule = map.get_string("methods.bayes.schedule", c.bayes.schedule);
    c.bayes.mh = named_mh_schedule(c.bayes.schedule);
    c.bayes.mh.chains = static_cast<int>(map.get_int("methods.bayes.chains", c.bayes.mh.chains));
    c.bayes.mh.draws_per_chain =
        static_cast<int>(map.get_int("methods.bayes.draws", c.bayes.mh.draws_per_chain));
    c.bayes.mh.burn_in =
        static_cast<int>(map.get_int("methods.bayes.burn_in", c.bayes.mh.burn_in));
    c.bayes.mh.proposal_frac =
        map.get_number("methods.bayes.proposal_frac", c.bayes.mh.proposal_frac);
    c.bayes.bandwidth = map.get_optional_number("methods.bayes.bandwidth");
    c.bayes.kde_mode =
        kde_mode_from_string(map.get_string("methods.bayes.kde_mode", "fast"));
    c.bayes.seed = static_cast<std::uint64_t>(
        map.get_int("methods.bayes.seed", static_cast<std::int64_t>(c.bayes.seed)));
    c.bayes.ks_panel_size =
        static_cast<int>(map.get_int("methods.bayes.ks_panel", c.bayes.ks_panel_size));

    c.out_dir = map.get_string("output.dir", c.out_dir);
    c.surfaces = map.get_bool("output.surfaces", c.surfaces);
    c.surface_resolution =
        static_cast<int>(map.get_int("output.surface_resolution", c.surface_resolution));

    c.validate();
    return c;
}

std::vector<std::string> ExperimentConfig::preset_names() {
    return {"ar1",          "arma_arch_set1",    "arma_arch_set2",   "rw_break_tau",
            "rw_break_sigma", "brock_hommes_set1", "brock_hommes_set2"};
}

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
    ExperimentConfig c;
    if (name == "ar1") {
        c.model_id = "ar1";
        c.free_names = {"a1"};
        c.pso.settings.budget = 600;
        c.cors.settings.budget = 50;
    } else if (name == "arma_arch_set1") {
        c.model_id = "arma_arch";
        c.free_names = {"a0", "a1"};
        c.pso.settings.budget = 900;
        c.cors.settings.budget = 100;
    } else if (name == "arma_arch_set2") {
        c.model_id = "arma_arch";
        c.free_names = {"b1", "b2", "c0", "c1", "c2"};
        c.pso.settings.budget = 1800;
        c.cors.settings.budget = 250;
    } else if (name == "rw_break_tau") {
        c.model_id = "rw_break";
        c.free_names = {"tau"};
        c.pso.settings.budget = 600;
        c.cors.settings.budget = 50;
    } else if (name == "rw_break_sigma") {
        c.model_id = "rw_break";
        c.free_names = {"sigma1", "sigma2"};
        c.pso.settings.budget = 900;
        c.cors.settings.budget = 100;
    } else if (name == "brock_hommes_set1") {
        c.model_id = "brock_hommes";
        c.free_names = {"g2", "b2"};
        c.pso.settings.budget = 900;
        c.cors.settings.budget = 100;
    } else if (name == "brock_hommes_set2") {
        c.model_id = "brock_hommes";
        c.free_names = {"g2", "b2", "g3", "b3"};
        c.pso.settings.budget = 1800;
        c.cors.settings.budget = 200;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    c.theta_true = default_true_params(c.model_id);
    c.out_dir = "out/" + name;
    c.validate();
    return c;
}

}  // namespace calbench
