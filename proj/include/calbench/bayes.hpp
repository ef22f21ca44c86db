#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "calbench/params.hpp"
#include "calbench/series.hpp"

namespace calbench {

enum class KdeMode {
    Fast,       // cell-clustered expansion of the 6-bandwidth window, error < 1e-9
    Truncated,  // direct sum over the sorted pool within 6 bandwidths
    Exact       // direct sum over the whole pool
};

KdeMode kde_mode_from_string(const std::string& s);
std::string kde_mode_name(KdeMode m);

/// Gaussian KDE over a pooled sample, queried at many points.
class KernelDensity {
public:
    /// bandwidth: explicit value, or nullopt for Silverman's rule
    /// 0.9 min(sd, IQR/1.34) n^(-1/5).
    KernelDensity(std::span<const double> pool, std::optional<double> bandwidth,
                  KdeMode mode = KdeMode::Fast);

    double bandwidth() const { return h_; }
    std::size_t pool_size() const { return n_; }

    double density(double x) const;

    /// Sum of log densities over the series. Densities below 1e-300 are
    /// floored at log(1e-300) and counted in underflows.
    double log_likelihood(std::span<const double> series, std::size_t* underflows = nullptr) const;

private:
    double density_fast(double x) const;
    double density_truncated(double x) const;
    double density_exact(double x) const;

    KdeMode mode_;
    std::size_t n_ = 0;
    double h_ = 0.0;
    double inv_norm_ = 0.0;  // 1 / (n h sqrt(2 pi))
    std::vector<double> sorted_pool_;        // Truncated / Exact modes
    // Fast mode: cells of width h/2 over the occupied range; per cell the
    // scaled moments S_k / k! of the offsets from the cell center.
    double cell_origin_ = 0.0;
    double cell_width_ = 0.0;
    std::vector<std::int64_t> cell_index_;
    std::vector<std::array<double, 13>> cell_moments_;
};

double silverman_bandwidth(std::span<const double> pool);

/// Log likelihood of `real` under a Gaussian KDE of the pooled ensemble
/// observations.
double kde_log_likelihood(std::span<const double> real, const SeriesEnsemble& ensemble,
                          std::optional<double> bandwidth, KdeMode mode = KdeMode::Fast);

struct PosteriorSample {
    ParamVector space;                              // names/bounds of the sampled coordinates
    std::vector<std::vector<std::vector<double>>> chains;  // chain -> step -> coordinates
    int burn_in = 0;
    std::vector<double> acceptance_rates;
    std::vector<bool> failed;  // all-rejected chains

    std::size_t retained_count() const;
    /// Applies fn to every retained draw.
    void for_each_retained(const std::function<void(std::span<const double>)>& fn) const;
};

struct MhSettings {
    int chains = 4;
    int draws_per_chain = 5000;
    int burn_in = 1500;
    /// Per-dimension proposal standard deviations; empty means 2.5% of each
    /// coordinate's range.
    std::vector<double> proposal_scale;
    double proposal_frac = 0.025;
    bool parallel = true;
};

/// Random-walk Metropolis-Hastings over the box defined by `space`, with
/// LHS-dispersed starts. `log_target` must return -inf outside the box.
PosteriorSample mh_sample(const std::function<double(std::span<const double>)>& log_target,
                          const ParamVector& space, const MhSettings& settings,
                          std::uint64_t seed);

/// Coordinate-wise mean over all retained draws of all chains.
ParamVector posterior_mean(const PosteriorSample& sample);

}  // namespace calbench
