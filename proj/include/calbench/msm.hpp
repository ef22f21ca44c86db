#pragma once

#include <array>
#include <span>

#include <Eigen/Dense>

#include "calbench/series.hpp"

namespace calbench {

/// Fixed moment set: variance, kurtosis, and sample autocorrelations of the
/// raw, absolute and squared series at lag 1, plus absolute and squared at
/// lag 5.
struct MomentVector {
    std::array<double, 7> m{};

    static constexpr std::size_t kCount = 7;
    static const std::array<const char*, 7>& names();

    double operator[](std::size_t i) const { return m[i]; }
    Eigen::Matrix<double, 7, 1> as_eigen() const;
};

/// Inverse bootstrap covariance of the moment vector, with the ridge used to
/// make the covariance invertible.
struct WeightMatrix {
    Eigen::Matrix<double, 7, 7> w;
    double ridge = 0.0;
};

/// Population-style moment estimators (divide by n, kurtosis = m4/m2^2).
/// Autocorrelations of a degenerate transform (e.g. |x| of an alternating
/// series) are reported as 0. A degenerate raw series throws.
MomentVector compute_moments(std::span<const double> series);

/// Overlapping-block bootstrap weight matrix: B resamples of the empirical
/// length, covariance of their moment vectors, and W = (Cov + ridge I)^-1
/// using the smallest ridge from {0, 1e-8, 1e-6, ...} giving condition
/// number < 1e12.
WeightMatrix estimate_weight_matrix(std::span<const double> real_series, int block_len, int b_samples,
                                    std::uint64_t seed);

/// Quadratic distance (mean simulated moments - real moments)' W (...).
double msm_objective(const MomentVector& real_moments, const SeriesEnsemble& ensemble,
                     const WeightMatrix& w);

}  // namespace calbench
