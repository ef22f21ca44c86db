#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "calbench/diagnostics.hpp"
#include "calbench/mathutil.hpp"
#include "calbench/rng.hpp"

using namespace calbench;

TEST_CASE("alternating window means give an extreme positive z") {
    // 20 windows of 50: window means strictly alternate above/below
    std::vector<double> series;
    for (int w = 0; w < 20; ++w)
        for (int i = 0; i < 50; ++i) series.push_back(w % 2 == 0 ? 1.0 : -1.0);
    const auto r = stationarity_runs_test(series, 20);
    CHECK(r.statistic > 2.0);
    CHECK(r.p_value < 0.05);
}

TEST_CASE("monotone trend collapses to two runs") {
    std::vector<double> series;
    for (int i = 0; i < 1000; ++i) series.push_back(static_cast<double>(i));
    const auto r = stationarity_runs_test(series, 20);
    CHECK(r.statistic < -2.0);
    CHECK(r.p_value < 0.01);
}

TEST_CASE("runs test null calibration") {
    const int n_seeds = 200;
    int rejects = 0;
    for (int s = 0; s < n_seeds; ++s) {
        CounterRng rng(400 + s);
        std::vector<double> x(1000);
        for (auto& v : x) v = rng.next_gaussian();
        if (stationarity_runs_test(x, 20).p_value < 0.05) ++rejects;
    }
    const double rate = static_cast<double>(rejects) / n_seeds;
    CHECK(rate > 0.01);
    CHECK(rate < 0.10);
}

TEST_CASE("runs test input validation") {
    std::vector<double> tiny(10, 0.0);
    CHECK_THROWS_AS(stationarity_runs_test(tiny, 20), std::invalid_argument);
    std::vector<double> flat(100, 1.0);
    CHECK_THROWS_AS(stationarity_runs_test(flat, 20), DegenerateSeriesError);
}

TEST_CASE("ks: identical samples give D = 0, p = 1") {
    CounterRng rng(9);
    std::vector<double> x(500);
    for (auto& v : x) v = rng.next_gaussian();
    const auto r = ks_two_sample(x, x);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("ks: disjoint supports give D = 1") {
    std::vector<double> a = {1, 2, 3, 4, 5};
    std::vector<double> b = {10, 11, 12};
    const auto r = ks_two_sample(a, b);
    CHECK(r.statistic == doctest::Approx(1.0));
    CHECK(r.p_value < 0.05);
}

TEST_CASE("ks statistic is invariant under common monotone transforms") {
    CounterRng rng(13);
    std::vector<double> a(400), b(300);
    for (auto& v : a) v = rng.next_gaussian();
    for (auto& v : b) v = 0.8 * rng.next_gaussian() + 0.3;
    const double d0 = ks_two_sample(a, b).statistic;
    auto mono = [](double v) { return std::exp(0.5 * v) + v * v * v * 0.001; };
    std::vector<double> ta(a), tb(b);
    std::transform(ta.begin(), ta.end(), ta.begin(), mono);
    std::transform(tb.begin(), tb.end(), tb.begin(), mono);
    CHECK(ks_two_sample(ta, tb).statistic == doctest::Approx(d0).epsilon(1e-12));
}

TEST_CASE("ks null calibration: p values are close to uniform") {
    const int pairs = 500;
    std::vector<int> deciles(10, 0);
    for (int s = 0; s < pairs; ++s) {
        CounterRng rng(10000 + s);
        std::vector<double> a(1000), b(1000);
        for (auto& v : a) v = rng.next_gaussian();
        for (auto& v : b) v = rng.next_gaussian();
        const double p = ks_two_sample(a, b).p_value;
        int bin = static_cast<int>(p * 10.0);
        bin = std::min(bin, 9);
        ++deciles[static_cast<std::size_t>(bin)];
    }
    double chi2 = 0.0;
    const double expected = pairs / 10.0;
    for (int c : deciles) chi2 += (c - expected) * (c - expected) / expected;
    const double p = chi_square_sf(chi2, 9);
    INFO("decile chi-square = " << chi2 << ", p = " << p);
    CHECK(p > 0.01);
}

TEST_CASE("tests are deterministic functions of their inputs") {
    CounterRng rng(77);
    std::vector<double> a(800), b(600);
    for (auto& v : a) v = rng.next_gaussian();
    for (auto& v : b) v = rng.next_gaussian() * 1.1;
    const auto k1 = ks_two_sample(a, b);
    const auto k2 = ks_two_sample(a, b);
    CHECK(k1.statistic == k2.statistic);
    CHECK(k1.p_value == k2.p_value);
    const auto s1 = stationarity_runs_test(a, 20);
    const auto s2 = stationarity_runs_test(a, 20);
    CHECK(s1.statistic == s2.statistic);
    CHECK(s1.p_value == s2.p_value);
}

TEST_CASE("kolmogorov survival function sanity") {
    CHECK(kolmogorov_sf(0.0) == doctest::Approx(1.0));
    CHECK(kolmogorov_sf(5.0) < 1e-10);
    // continuity across the series switch at t = 1.18
    CHECK(kolmogorov_sf(1.18 - 1e-9) == doctest::Approx(kolmogorov_sf(1.18 + 1e-9)).epsilon(1e-7));
    // known value: Q(1.3581) ~= 0.05
    CHECK(kolmogorov_sf(1.3581) == doctest::Approx(0.05).epsilon(0.01));
}
