#include "calbench/msm.hpp"

#include <cmath>

#include "calbench/rng.hpp"

namespace calbench {
namespace {

}  // namespace

const std::array<const char*, 7>& MomentVector::names() {
    static const std::array<const char*, 7> n = {
        "variance",    "kurtosis",     "ac_raw_lag1", "ac_abs_lag1",
        "ac_sq_lag1",  "ac_abs_lag5",  "ac_sq_lag5"};
    return n;
}

Eigen::Matrix<double, 7, 1> MomentVector::as_eigen() const {
    Eigen::Matrix<double, 7, 1> v;
    for (int i = 0; i < 7; ++i) v(i) = m[static_cast<std::size_t>(i)];
    return v;
}

MomentVector compute_moments(std::span<const double> series) {
    if (series.size() < 7) throw std::invalid_argument("compute_moments: series shorter than 7");
    require_finite(series, "compute_moments");
    const std::size_t n = series.size();
    const double dn = static_cast<double>(n);

    double mean_x = 0.0, mean_a = 0.0, mean_s = 0.0;
    for (double v : series) {
        mean_x += v;
        mean_a += std::fabs(v);
        mean_s += v * v;
    }
    mean_x /= dn;
    mean_a /= dn;
    mean_s /= dn;

    // centered sums for the raw, absolute and squared series, plus the lag-1
    // and lag-5 cross products, in one sweep
    double m2 = 0.0, m4 = 0.0, var_a = 0.0, var_s = 0.0;
    double n1x = 0.0, n1a = 0.0, n1s = 0.0, n5x = 0.0, n5a = 0.0, n5s = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double x = series[t];
        const double dx = x - mean_x;
        const double da = std::fabs(x) - mean_a;
        const double ds = x * x - mean_s;
        m2 += dx * dx;
        m4 += dx * dx * dx * dx;
        var_a += da * da;
        var_s += ds * ds;
        if (t + 1 < n) {
            const double y = series[t + 1];
            n1x += dx * (y - mean_x);
            n1a += da * (std::fabs(y) - mean_a);
            n1s += ds * (y * y - mean_s);
        }
        if (t + 5 < n) {
            const double y = series[t + 5];
            n5x += dx * (y - mean_x);
            n5a += da * (std::fabs(y) - mean_a);
            n5s += ds * (y * y - mean_s);
        }
    }
    if (m2 <= 0.0) throw DegenerateSeriesError("compute_moments: constant series");

    // a zero-variance transform carries no linear signal; report 0 for it
    auto ratio = [](double num, double denom) { return denom > 0.0 ? num / denom : 0.0; };
    MomentVector out;
    out.m[0] = m2 / dn;
    out.m[1] = (m4 / dn) / (out.m[0] * out.m[0]);
    out.m[2] = ratio(n1x, m2);
    out.m[3] = ratio(n1a, var_a);
    out.m[4] = ratio(n1s, var_s);
    out.m[5] = ratio(n5a, var_a);
    out.m[6] = ratio(n5s, var_s);
    return out;
}

WeightMatrix estimate_weight_matrix(std::span<const double> real_series, int block_len,
                                    int b_samples, std::uint64_t seed) {
    if (block_len < 1 || static_cast<std::size_t>(block_len) >= real_series.size())
        throw std::invalid_argument("estimate_weight_matrix: block length out of range");
    if (b_samples < 2) throw std::invalid_argument("estimate_weight_matrix: need B >= 2");

    const std::size_t n = real_series.size();
    const std::size_t n_starts = n - static_cast<std::size_t>(block_len) + 1;
    const std::size_t blocks_needed =
        (n + static_cast<std::size_t>(block_len) - 1) / static_cast<std::size_t>(block_len);

    CounterRng rng(seed);
    std::vector<double> resample(n);
    Eigen::MatrixXd boot(b_samples, 7);
    for (int b = 0; b < b_samples; ++b) {
        std::size_t pos = 0;
        for (std::size_t k = 0; k < blocks_needed && pos < n; ++k) {
            const std::size_t start = rng.next_below(n_starts);
            for (int j = 0; j < block_len && pos < n; ++j) resample[pos++] = real_series[start + j];
        }
        const auto mv = compute_moments(resample);
        for (int i = 0; i < 7; ++i) boot(b, i) = mv.m[static_cast<std::size_t>(i)];
    }

    const Eigen::RowVectorXd mean = boot.colwise().mean();
    const Eigen::MatrixXd centered = boot.rowwise() - mean;
    Eigen::Matrix<double, 7, 7> cov =
        (centered.transpose() * centered) / static_cast<double>(b_samples - 1);

    // Ridge ladder: smallest lambda making Cov + lambda I invertible with
    // condition number below 1e12.
    double lambda = 0.0;
    for (;;) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> eig(
            cov + lambda * Eigen::Matrix<double, 7, 7>::Identity());
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (lo > 0.0 && hi / lo < 1e12) {
            Eigen::Matrix<double, 7, 1> inv_vals = eig.eigenvalues().cwiseInverse();
            WeightMatrix out;
            out.w = eig.eigenvectors() * inv_vals.asDiagonal() * eig.eigenvectors().transpose();
            out.ridge = lambda;
            return out;
        }
        lambda = (lambda == 0.0) ? 1e-8 : lambda * 100.0;
        if (lambda > 1e12)
            throw DegenerateSeriesError("estimate_weight_matrix: covariance not regularizable");
    }
}

double msm_objective(const MomentVector& real_moments, const SeriesEnsemble& ensemble,
                     const WeightMatrix& w) {
    if (ensemble.empty()) throw std::invalid_argument("msm_objective: empty ensemble");
    Eigen::Matrix<double, 7, 1> mean = Eigen::Matrix<double, 7, 1>::Zero();
    for (const auto& member : ensemble.members)
        mean += compute_moments(member.values).as_eigen();
    mean /= static_cast<double>(ensemble.size());
    const Eigen::Matrix<double, 7, 1> gap = mean - real_moments.as_eigen();
    return gap.dot(w.w * gap);
}

}  // namespace calbench
