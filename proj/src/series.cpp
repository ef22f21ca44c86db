#include "calbench/series.hpp"

#include <cmath>

namespace calbench {

std::string transform_name(const TransformTag& t) {
    switch (t.kind) {
        case TransformKind::FirstDifference: return "first-difference";
        case TransformKind::DropBurnIn: return "drop-burn-in(" + std::to_string(t.n) + ")";
    }
    return "unknown";
}

double series_mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of empty series");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double series_variance(std::span<const double> x) {
    const double m = series_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_finite(std::span<const double> x, const std::string& context) {
    if (!all_finite(x)) throw DegenerateSeriesError(context + ": non-finite values in series");
}

}  // namespace calbench
