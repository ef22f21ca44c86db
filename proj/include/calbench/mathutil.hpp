#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace calbench {

/// P(Z > z) for standard normal Z.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// Survival function of the asymptotic Kolmogorov distribution, P(K > t).
/// Uses the theta-function form for small t and the alternating series
/// otherwise (the series alternate too slowly near zero).
inline double kolmogorov_sf(double t) {
    if (t <= 1e-8) return 1.0;
    if (t < 1.18) {
        const double v = M_PI * M_PI / (8.0 * t * t);
        double cdf = 0.0;
        for (int k = 1; k <= 7; k += 2) cdf += std::exp(-static_cast<double>(k) * k * v);
        cdf *= std::sqrt(2.0 * M_PI) / t;
        double p = 1.0 - cdf;
        return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
    }
    double s = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        s += sign * term;
        sign = -sign;
        if (term < 1e-14) break;
    }
    double p = 2.0 * s;
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

/// Regularized lower incomplete gamma P(a, x), series/continued-fraction split.
inline double lower_regularized_gamma(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("lower_regularized_gamma: bad args");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // series expansion
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double frac = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        frac *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * frac;
    return 1.0 - q;
}

/// P(X > x) for chi-square with k degrees of freedom.
inline double chi_square_sf(double x, double k) {
    if (x <= 0.0) return 1.0;
    double p = 1.0 - lower_regularized_gamma(k / 2.0, x / 2.0);
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

/// Binary entropy in bits.
inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace calbench
