#pragma once

#include <array>
#include <optional>
#include <string>

#include "calbench/rng.hpp"
#include "calbench/series.hpp"

namespace calbench {

/// AR(1): x_{t+1} = a1 x_t + eps_{t+1}, x_0 = first innovation.
SimOutput simulate_ar1(const ParamVector& params, int t_len, NoiseSource noise);

/// ARMA(2,2) with ARCH(2) errors:
///   x_{t+1}      = a0 + a1 x_t + a2 x_{t-1} + b1 s_t e_t + b2 s_{t-1} e_{t-1} + s_{t+1} e_{t+1}
///   s_{t+1}^2    = c0 + c1 e_t^2 + c2 e_{t-1}^2
/// Lag states start at zero, s_0^2 = s_{-1}^2 = c0; the first 100 steps are
/// discarded (recorded as a drop-burn-in transform).
SimOutput simulate_arma_arch(const ParamVector& params, int t_len, NoiseSource noise);

/// Random walk with one structural break: x_{t+1} = x_t + d + sigma eps, where
/// (d, sigma) switches from (d1, s1) to (d2, s2) strictly after step round(tau).
/// x_0 = 0. tau is continuous and rounded at simulation time.
SimOutput simulate_rw_break(const ParamVector& params, int t_len, NoiseSource noise);

/// Brock-Hommes heterogeneous-beliefs model with H = 4 strategies:
///   x_{t+1}   = (1/R) sum_h n_{h,t+1} (g_h x_t + b_h) + eps_{t+1}
///   n_{h,t+1} = softmax_h(beta U_{h,t})
///   U_{h,t}   = (x_t - R x_{t-1}) (g_h x_{t-2} + b_h - R x_{t-1})
/// with R = 1 + r and eps ~ N(0, sigma_eps^2). Lag states start at zero and
/// the first 100 steps are discarded. `fractions_out`, when given, receives
/// n_{h,t} for every post-burn-in step.
SimOutput simulate_brock_hommes(const ParamVector& params, int t_len, NoiseSource noise,
                                double sigma_eps,
                                std::vector<std::array<double, 4>>* fractions_out = nullptr);

/// First differences: out_t = s_{t+1} - s_t; length shrinks by one and the
/// transform is recorded.
SimOutput first_difference(const SimOutput& s);

/// Benchmark generating parameters (with bounds) for the four model ids:
/// "ar1", "arma_arch", "rw_break", "brock_hommes".
ParamVector default_true_params(const std::string& model_id);

/// Dispatch by model id. sigma_eps applies to brock_hommes only.
SimOutput simulate_model(const std::string& model_id, const ParamVector& params, int t_len,
                         std::int64_t seed, double sigma_eps = 0.01);

bool is_known_model(const std::string& model_id);

/// True when every calibration experiment first-differences this model's
/// output (the random walk).
bool model_uses_first_difference(const std::string& model_id);

}  // namespace calbench
