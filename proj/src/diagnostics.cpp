#include "calbench/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "calbench/mathutil.hpp"

namespace calbench {

TestResult stationarity_runs_test(std::span<const double> series, int n_windows) {
    if (n_windows < 2) throw std::invalid_argument("runs test needs at least 2 windows");
    if (series.size() < 2 * static_cast<std::size_t>(n_windows))
        throw std::invalid_argument("series too short for " + std::to_string(n_windows) +
                                    " windows");
    require_finite(series, "stationarity_runs_test");

    const std::size_t win = series.size() / static_cast<std::size_t>(n_windows);
    std::vector<double> means(static_cast<std::size_t>(n_windows));
    for (int w = 0; w < n_windows; ++w) {
        double s = 0.0;
        for (std::size_t i = 0; i < win; ++i) s += series[static_cast<std::size_t>(w) * win + i];
        means[static_cast<std::size_t>(w)] = s / static_cast<double>(win);
    }

    std::vector<double> sorted(means);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double median = (m % 2 == 1) ? sorted[m / 2]
                                       : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

    std::vector<bool> above(means.size());
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < means.size(); ++i) {
        above[i] = means[i] > median;
        if (above[i]) ++n1;
    }
    const std::size_t n0 = means.size() - n1;
    if (n0 == 0 || n1 == 0)
        throw DegenerateSeriesError("runs test: all window means on one side of the median");

    std::size_t runs = 1;
    for (std::size_t i = 1; i < above.size(); ++i)
        if (above[i] != above[i - 1]) ++runs;

    const double dn0 = static_cast<double>(n0), dn1 = static_cast<double>(n1);
    const double n = dn0 + dn1;
    const double mu = 2.0 * dn0 * dn1 / n + 1.0;
    const double var = 2.0 * dn0 * dn1 * (2.0 * dn0 * dn1 - n) / (n * n * (n - 1.0));
    const double z = (static_cast<double>(runs) - mu) / std::sqrt(var);
    const double p = 2.0 * normal_sf(std::fabs(z));

    return {"stationarity_runs", z, std::min(p, 1.0), {series.size()}};
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    require_finite(a, "ks_two_sample");
    require_finite(b, "ks_two_sample");

    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < sa.size() && ib < sb.size()) {
        const double v = std::min(sa[ia], sb[ib]);
        while (ia < sa.size() && sa[ia] <= v) ++ia;
        while (ib < sb.size() && sb[ib] <= v) ++ib;
        d = std::max(d, std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }

    const double n_eff = na * nb / (na + nb);
    const double p = kolmogorov_sf(std::sqrt(n_eff) * d);
    return {"ks_two_sample", d, p, {sa.size(), sb.size()}};
}

}  // namespace calbench
