#pragma once

#include <span>
#include <string>
#include <vector>

#include "calbench/series.hpp"

namespace calbench {

struct TestResult {
    std::string test_id;
    double statistic = 0.0;
    double p_value = 1.0;
    std::vector<std::size_t> input_lengths;
};

/// Runs-based stationarity test: split the series into n_windows contiguous
/// windows, mark each window mean as above/below the median of window means
/// (ties count as below), and apply the Wald-Wolfowitz runs test with the
/// normal approximation. Two-sided p-value.
TestResult stationarity_runs_test(std::span<const double> series, int n_windows = 20);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value at
/// effective sample size na*nb/(na+nb).
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace calbench
