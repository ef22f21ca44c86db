#include "calbench/models.hpp"

#include <algorithm>
#include <cmath>

namespace calbench {
namespace {

constexpr int kBurnIn = 100;

void require_positive_length(int t_len) {
    if (t_len < 1) throw std::invalid_argument("series length must be >= 1");
}

double softmax_denominator(const std::array<double, 4>& u, double beta, double u_max) {
    double s = 0.0;
    for (double v : u) s += std::exp(beta * (v - u_max));
    return s;
}

}  // namespace

SimOutput simulate_ar1(const ParamVector& params, int t_len, NoiseSource noise) {
    require_positive_length(t_len);
    const double a1 = params.get("a1");

    Series x(static_cast<std::size_t>(t_len));
    x[0] = noise.next();
    for (int t = 1; t < t_len; ++t) x[t] = a1 * x[t - 1] + noise.next();

    return SimOutput{std::move(x), "ar1", params, 0, t_len, {}};
}

SimOutput simulate_arma_arch(const ParamVector& params, int t_len, NoiseSource noise) {
    require_positive_length(t_len);
    const double a0 = params.get("a0"), a1 = params.get("a1"), a2 = params.get("a2");
    const double b1 = params.get("b1"), b2 = params.get("b2");
    const double c0 = params.get("c0"), c1 = params.get("c1"), c2 = params.get("c2");

    const int total = t_len + kBurnIn;
    Series x(static_cast<std::size_t>(total) + 1);  // x[0] is the zero initial state
    x[0] = 0.0;
    double x_lag2 = 0.0;                  // x_{t-1} behind x[t]
    double e_prev = 0.0, e_prev2 = 0.0;   // eps_t, eps_{t-1}
    double s_prev = std::sqrt(c0);        // sigma_t
    double s_prev2 = std::sqrt(c0);       // sigma_{t-1}

    for (int t = 0; t < total; ++t) {
        const double var_next = c0 + c1 * e_prev * e_prev + c2 * e_prev2 * e_prev2;
        const double s_next = std::sqrt(var_next);
        const double e_next = noise.next();
        const double x_t = x[static_cast<std::size_t>(t)];
        const double x_next = a0 + a1 * x_t + a2 * x_lag2 + b1 * s_prev * e_prev +
                              b2 * s_prev2 * e_prev2 + s_next * e_next;
        x[static_cast<std::size_t>(t) + 1] = x_next;
        x_lag2 = x_t;
        e_prev2 = e_prev;
        e_prev = e_next;
        s_prev2 = s_prev;
        s_prev = s_next;
    }

    Series out(x.begin() + 1 + kBurnIn, x.end());
    return SimOutput{std::move(out), "arma_arch", params, 0, t_len,
                     {TransformTag{TransformKind::DropBurnIn, kBurnIn}}};
}

SimOutput simulate_rw_break(const ParamVector& params, int t_len, NoiseSource noise) {
    require_positive_length(t_len);
    const double tau = params.get("tau");
    const double s1 = params.get("sigma1"), s2 = params.get("sigma2");
    const double d1 = params.get("d1"), d2 = params.get("d2");
    const long break_step = std::lround(tau);

    Series x(static_cast<std::size_t>(t_len));
    x[0] = 0.0;
    for (int t = 1; t < t_len; ++t) {
        const bool pre = t <= break_step;
        const double d = pre ? d1 : d2;
        const double s = pre ? s1 : s2;
        x[t] = x[t - 1] + d + s * noise.next();
    }
    return SimOutput{std::move(x), "rw_break", params, 0, t_len, {}};
}

SimOutput simulate_brock_hommes(const ParamVector& params, int t_len, NoiseSource noise,
                                double sigma_eps,
                                std::vector<std::array<double, 4>>* fractions_out) {
    require_positive_length(t_len);
    if (!(sigma_eps > 0.0)) throw std::invalid_argument("sigma_eps must be positive");
    const std::array<double, 4> g = {params.get("g1"), params.get("g2"), params.get("g3"),
                                     params.get("g4")};
    const std::array<double, 4> b = {params.get("b1"), params.get("b2"), params.get("b3"),
                                     params.get("b4")};
    const double r = params.get("r");
    const double beta = params.get("beta");
    const double R = 1.0 + r;

    if (fractions_out) fractions_out->clear();

    const int total = t_len + kBurnIn;
    Series x(static_cast<std::size_t>(total));
    // Three zero lag states; the recursion produces x[3], x[4], ...
    x[0] = x[1] = x[2] = 0.0;
    for (int t = 2; t + 1 < total; ++t) {
        std::array<double, 4> u;
        const double momentum = x[t] - R * x[t - 1];
        for (int h = 0; h < 4; ++h) u[h] = momentum * (g[h] * x[t - 2] + b[h] - R * x[t - 1]);
        // Subtract the max fitness before exponentiating to keep exp() finite.
        const double u_max = *std::max_element(u.begin(), u.end());
        const double denom = softmax_denominator(u, beta, u_max);

        double mean_forecast = 0.0;
        std::array<double, 4> n;
        for (int h = 0; h < 4; ++h) {
            n[h] = std::exp(beta * (u[h] - u_max)) / denom;
            mean_forecast += n[h] * (g[h] * x[t] + b[h]);
        }
        x[t + 1] = mean_forecast / R + sigma_eps * noise.next();
        if (fractions_out && t + 1 >= kBurnIn) fractions_out->push_back(n);
    }

    Series out(x.begin() + kBurnIn, x.end());
    return SimOutput{std::move(out), "brock_hommes", params, 0, t_len,
                     {TransformTag{TransformKind::DropBurnIn, kBurnIn}}};
}

SimOutput first_difference(const SimOutput& s) {
    if (s.values.size() < 2)
        throw std::invalid_argument("first_difference: series shorter than 2");
    Series out(s.values.size() - 1);
    for (std::size_t t = 0; t + 1 < s.values.size(); ++t) out[t] = s.values[t + 1] - s.values[t];
    SimOutput d = s;
    d.values = std::move(out);
    d.transforms.push_back({TransformKind::FirstDifference, 0});
    return d;
}

ParamVector default_true_params(const std::string& model_id) {
    ParamVector p;
    if (model_id == "ar1") {
        p.add("a1", 0.7, 0.0, 1.0);
    } else if (model_id == "arma_arch") {
        p.add("a0", 0.0, 0.0, 1.0);
        p.add("a1", 0.7, 0.0, 0.8);  // a1 > 0.8 can make the model non-stationary
        p.add("a2", 0.1, 0.0, 1.0);
        p.add("b1", 0.2, 0.0, 1.0);
        p.add("b2", 0.2, 0.0, 1.0);
        p.add("c0", 0.25, 0.0, 1.0);
        p.add("c1", 0.5, 0.0, 1.0);
        p.add("c2", 0.3, 0.0, 1.0);
    } else if (model_id == "rw_break") {
        p.add("tau", 700.0, 0.0, 1000.0);
        p.add("sigma1", 0.1, 0.0, 1.0);
        p.add("sigma2", 0.2, 0.0, 1.0);
        p.add("d1", 1.0, 0.0, 5.0);
        p.add("d2", 2.0, 0.0, 5.0);
    } else if (model_id == "brock_hommes") {
        p.add("g1", 0.0, 0.0, 1.0);
        p.add("b1", 0.0, -1.0, 1.0);
        p.add("g2", 0.9, 0.0, 1.0);
        p.add("b2", 0.2, 0.0, 1.0);
        p.add("g3", 0.9, 0.0, 1.0);
        p.add("b3", -0.2, -1.0, 0.0);
        p.add("g4", 1.01, 0.0, 1.1);
        p.add("b4", 0.0, -1.0, 1.0);
        p.add("r", 0.01, 0.0, 0.1);
        p.add("beta", 1.0, 0.0, 10.0);
    } else {
        throw std::invalid_argument("unknown model id: " + model_id);
    }
    return p;
}

bool is_known_model(const std::string& model_id) {
    return model_id == "ar1" || model_id == "arma_arch" || model_id == "rw_break" ||
           model_id == "brock_hommes";
}

bool model_uses_first_difference(const std::string& model_id) { return model_id == "rw_break"; }

SimOutput simulate_model(const std::string& model_id, const ParamVector& params, int t_len,
                         std::int64_t seed, double sigma_eps) {
    auto noise = NoiseSource::gaussian(static_cast<std::uint64_t>(seed));
    SimOutput out;
    if (model_id == "ar1") {
        out = simulate_ar1(params, t_len, std::move(noise));
    } else if (model_id == "arma_arch") {
        out = simulate_arma_arch(params, t_len, std::move(noise));
    } else if (model_id == "rw_break") {
        out = simulate_rw_break(params, t_len, std::move(noise));
    } else if (model_id == "brock_hommes") {
        out = simulate_brock_hommes(params, t_len, std::move(noise), sigma_eps);
    } else {
        throw std::invalid_argument("unknown model id: " + model_id);
    }
    out.seed = seed;
    return out;
}

}  // namespace calbench
