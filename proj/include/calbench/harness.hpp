#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "calbench/bayes.hpp"
#include "calbench/config.hpp"
#include "calbench/diagnostics.hpp"
#include "calbench/gsl_div.hpp"
#include "calbench/mic.hpp"
#include "calbench/models.hpp"
#include "calbench/msm.hpp"
#include "calbench/optimize.hpp"

namespace calbench {

struct MsmMethodSettings {
    bool enabled = true;
    int block_len = 25;
    int bootstrap_samples = 2000;
    std::uint64_t bootstrap_seed = 777;
};

struct GslMethodSettings {
    bool enabled = true;
    GslDivSettings settings;
};

struct MicMethodSettings {
    bool enabled = true;
    std::optional<QuantizerSpec> quantizer;  // default: built-in table for the model
};

struct PsoMethodSettings {
    bool enabled = true;
    PsoSettings settings;
    std::uint64_t seed = 42;
};

struct CorsMethodSettings {
    bool enabled = true;
    CorsSettings settings;
    std::uint64_t seed = 43;
};

struct BayesMethodSettings {
    bool enabled = true;
    MhSettings mh;
    std::optional<double> bandwidth;  // nullopt: Silverman
    KdeMode kde_mode = KdeMode::Fast;
    std::uint64_t seed = 44;
    int ks_panel_size = 50;
    std::string schedule = "simple";
};

/// Named Metropolis-Hastings schedules (chains, draws per chain, burn-in).
MhSettings named_mh_schedule(const std::string& name);

struct ExperimentConfig {
    std::string model_id;
    ParamVector theta_true;
    std::vector<std::string> free_names;
    int t_emp = 1000;
    int t_sim = 1000;
    int r_smd = 250;
    int r_bayes = 100;
    std::int64_t truth_seed = 0;
    std::int64_t ensemble_seed_base = 1;
    double bh_sigma_eps = 0.01;
    int stationarity_windows = 20;

    MsmMethodSettings msm;
    GslMethodSettings gsl;
    MicMethodSettings mic;
    PsoMethodSettings pso;
    CorsMethodSettings cors;
    BayesMethodSettings bayes;

    std::string out_dir = "out";
    bool surfaces = false;
    int surface_resolution = 41;

    /// Seed discipline and structural checks; throws std::invalid_argument.
    void validate() const;

    ParamVector free_space() const { return theta_true.subset(free_names); }

    static ExperimentConfig from_config(const ConfigMap& map);
    /// Built-in benchmark presets: ar1, arma_arch_set1, arma_arch_set2,
    /// rw_break_tau, rw_break_sigma, brock_hommes_set1, brock_hommes_set2.
    static ExperimentConfig preset(const std::string& name);
    static std::vector<std::string> preset_names();
};

/// Euclidean loss over the free parameters (order-checked).
double loss(const ParamVector& theta_true, const ParamVector& theta_hat);

struct TruthData {
    SimOutput series;
    TestResult stationarity;
    bool stationarity_warning = false;  // rejected at the 1% level
};

TruthData make_truth_data(const ExperimentConfig& config);

/// Deterministic objective context: fixed truth data and fixed ensemble
/// seeds, so every criterion value is a pure function of the free parameters
/// (common random numbers).
class CriterionContext {
public:
    CriterionContext(const ExperimentConfig& config, const TruthData& truth);

    const ExperimentConfig& config() const { return config_; }
    const TruthData& truth() const { return truth_; }

    /// Simulates the seeded ensemble at the given free-parameter values and
    /// applies the model's transform policy.
    SeriesEnsemble simulate_ensemble(std::span<const double> free_values, int replications) const;

    /// criterion: "msm" | "gsl_div" | "mic". Degenerate simulations yield
    /// +infinity rather than an exception.
    double criterion_value(const std::string& criterion, std::span<const double> free_values) const;

    /// Log posterior for the Bayesian path (KDE likelihood + flat prior);
    /// -infinity outside the box or on degenerate simulations.
    double log_posterior(std::span<const double> free_values) const;

    const WeightMatrix& weight_matrix() const;
    const MomentVector& real_moments() const;
    const QuantizerSpec& quantizer() const { return quantizer_; }

private:
    ExperimentConfig config_;
    TruthData truth_;
    ParamVector free_space_;
    QuantizerSpec quantizer_;
    double log_prior_ = 0.0;
    mutable std::unique_ptr<MomentVector> real_moments_;
    mutable std::unique_ptr<WeightMatrix> weights_;
};

struct MethodResult {
    std::string name;       // e.g. "msm/pso" or "bayes"
    std::string criterion;  // "msm" | "gsl_div" | "mic" | "kde"
    std::string optimizer;  // "pso" | "cors" | "mh"
    std::string status = "ok";
    std::string error;
    ParamVector estimate_free;
    ParamVector estimate_full;
    double objective_value = 0.0;
    double loss = 0.0;
    std::size_t evaluations = 0;
    double wall_time_s = 0.0;

    // Bayesian extras
    std::vector<double> acceptance_rates;
    std::size_t retained_draws = 0;
    double kde_bandwidth_last = 0.0;
    std::vector<double> ks_panel_p;
    std::shared_ptr<PosteriorSample> posterior;
};

struct SurfaceGrid {
    std::string criterion;
    std::vector<std::string> axes;
    std::vector<std::vector<double>> points;  // coordinates per grid node
    std::vector<double> values;               // NaN marks a failed evaluation
};

struct ExperimentReport {
    ExperimentConfig config;
    TruthData truth;
    std::vector<MethodResult> methods;
    std::vector<SurfaceGrid> surfaces;

    const MethodResult* find_method(const std::string& name) const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

SurfaceGrid grid_surface(const CriterionContext& ctx, const std::string& criterion,
                         const std::vector<std::string>& axes, int resolution);

}  // namespace calbench
