#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "calbench/diagnostics.hpp"
#include "calbench/models.hpp"

using namespace calbench;

namespace {

NoiseSource zero_noise(std::size_t n) { return NoiseSource::injected(std::vector<double>(n, 0.0)); }

ParamVector ar1_params(double a1) {
    ParamVector p;
    p.add("a1", a1, 0.0, 1.0);
    return p;
}

}  // namespace

TEST_CASE("ar1 zero-noise recurrence") {
    auto out = simulate_ar1(ar1_params(0.7), 4, NoiseSource::injected({1, 0, 0, 0}));
    REQUIRE(out.values.size() == 4);
    CHECK(out.values[0] == doctest::Approx(1.0));
    CHECK(out.values[1] == doctest::Approx(0.7));
    CHECK(out.values[2] == doctest::Approx(0.49));
    CHECK(out.values[3] == doctest::Approx(0.343));
}

TEST_CASE("ar1 with a1 = 0 returns the raw noise stream") {
    auto noise = NoiseSource::gaussian(5);
    std::vector<double> draws;
    for (int i = 0; i < 50; ++i) draws.push_back(noise.next());
    auto out = simulate_ar1(ar1_params(0.0), 50, NoiseSource::gaussian(5));
    for (int i = 0; i < 50; ++i) CHECK(out.values[static_cast<std::size_t>(i)] == draws[static_cast<std::size_t>(i)]);
}

TEST_CASE("ar1 determinism across repeated calls") {
    auto a = simulate_ar1(ar1_params(0.7), 1000, NoiseSource::gaussian(123));
    auto b = simulate_ar1(ar1_params(0.7), 1000, NoiseSource::gaussian(123));
    CHECK(a.values == b.values);  // bitwise
}

TEST_CASE("ar1 bound violation rejected") {
    CHECK_THROWS_AS(ar1_params(1.5), std::invalid_argument);
}

TEST_CASE("injected noise errors on exhaustion") {
    CHECK_THROWS_AS(simulate_ar1(ar1_params(0.5), 10, NoiseSource::injected({1.0, 2.0})),
                    std::runtime_error);
}

TEST_CASE("arma-arch fixed point at a0 = 1") {
    auto p = default_true_params("arma_arch");
    std::vector<double> vals = {1, 0, 0, 0, 0, 0, 0, 0};
    const char* names[] = {"a0", "a1", "a2", "b1", "b2", "c0", "c1", "c2"};
    for (int i = 0; i < 8; ++i) p.set(names[i], vals[static_cast<std::size_t>(i)]);
    auto out = simulate_arma_arch(p, 50, zero_noise(200));
    REQUIRE(out.values.size() == 50);
    for (double v : out.values) CHECK(v == doctest::Approx(1.0));
    REQUIRE(out.transforms.size() == 1);
    CHECK(out.transforms[0].kind == TransformKind::DropBurnIn);
    CHECK(out.transforms[0].n == 100);
}

TEST_CASE("arma-arch reduces to scaled white noise when only c0 is set") {
    auto p = default_true_params("arma_arch");
    const char* names[] = {"a0", "a1", "a2", "b1", "b2", "c1", "c2"};
    for (const char* n : names) p.set(n, 0.0);
    p.set("c0", 0.25);
    // sample variance over 10^6 draws approx c0, tolerance 1%
    auto out = simulate_arma_arch(p, 1000000, NoiseSource::gaussian(99));
    double mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) /
                  static_cast<double>(out.values.size());
    double var = 0.0;
    for (double v : out.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(out.values.size());
    CHECK(var == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("arma-arch benchmark vector is accepted and deterministic") {
    auto p = default_true_params("arma_arch");
    CHECK(p.get("a1") == 0.7);
    CHECK(p.get("c0") == 0.25);
    auto a = simulate_arma_arch(p, 1000, NoiseSource::gaussian(7));
    auto b = simulate_arma_arch(p, 1000, NoiseSource::gaussian(7));
    CHECK(a.values == b.values);
    CHECK(a.values.size() == 1000);
}

TEST_CASE("random walk pure drift") {
    auto p = default_true_params("rw_break");
    p.set("d2", 1.0);
    p.set("sigma1", 0.0);
    p.set("sigma2", 0.0);
    auto out = simulate_rw_break(p, 5, zero_noise(10));
    const std::vector<double> expect = {0, 1, 2, 3, 4};
    CHECK(out.values == expect);
}

TEST_CASE("random walk slope change at the break") {
    auto p = default_true_params("rw_break");
    p.set("tau", 2.0);
    p.set("sigma1", 0.0);
    p.set("sigma2", 0.0);
    auto out = simulate_rw_break(p, 5, zero_noise(10));
    const std::vector<double> expect = {0, 1, 2, 4, 6};
    CHECK(out.values == expect);
}

TEST_CASE("random walk benchmark values") {
    auto p = default_true_params("rw_break");
    CHECK(p.get("tau") == 700.0);
    CHECK(p.get("sigma1") == 0.1);
    CHECK(p.get("sigma2") == 0.2);
    CHECK(p.get("d1") == 1.0);
    CHECK(p.get("d2") == 2.0);
}

TEST_CASE("brock-hommes uniform fractions at beta = 0") {
    auto p = default_true_params("brock_hommes");
    p.set("beta", 0.0);
    std::vector<std::array<double, 4>> fractions;
    simulate_brock_hommes(p, 50, NoiseSource::gaussian(3), 0.01, &fractions);
    REQUIRE(!fractions.empty());
    for (const auto& n : fractions)
        for (double f : n) CHECK(f == doctest::Approx(0.25));
}

TEST_CASE("brock-hommes zero strategies and zero noise stays at zero") {
    auto p = default_true_params("brock_hommes");
    for (const char* n : {"g1", "g2", "g3", "g4", "b1", "b2", "b3", "b4"}) p.set(n, 0.0);
    auto out = simulate_brock_hommes(p, 20, zero_noise(200), 0.01);
    for (double v : out.values) CHECK(v == 0.0);
}

TEST_CASE("brock-hommes fractions form a distribution at every step") {
    auto p = default_true_params("brock_hommes");
    std::vector<std::array<double, 4>> fractions;
    simulate_brock_hommes(p, 1000, NoiseSource::gaussian(17), 0.01, &fractions);
    REQUIRE(fractions.size() == 1000);
    for (const auto& n : fractions) {
        double sum = 0.0;
        for (double f : n) {
            CHECK(f >= 0.0);
            sum += f;
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("brock-hommes benchmark vector") {
    auto p = default_true_params("brock_hommes");
    CHECK(p.get("g2") == 0.9);
    CHECK(p.get("b2") == 0.2);
    CHECK(p.get("g3") == 0.9);
    CHECK(p.get("b3") == -0.2);
    CHECK(p.get("g4") == 1.01);
    CHECK(p.get("r") == 0.01);
    CHECK(p.get("beta") == 1.0);
}

TEST_CASE("first difference basics") {
    SimOutput s;
    s.values = {0, 1, 2, 4, 6};
    s.model = "rw_break";
    auto d = first_difference(s);
    const std::vector<double> expect = {1, 1, 2, 2};
    CHECK(d.values == expect);
    REQUIRE(d.transforms.size() == 1);
    CHECK(d.transforms[0].kind == TransformKind::FirstDifference);

    SimOutput konst;
    konst.values = {3, 3, 3, 3};
    auto dk = first_difference(konst);
    for (double v : dk.values) CHECK(v == 0.0);

    SimOutput tiny;
    tiny.values = {1.0};
    CHECK_THROWS_AS(first_difference(tiny), std::invalid_argument);
}

TEST_CASE("first difference inverts cumulative sum") {
    std::vector<double> y = {0.3, -1.2, 2.2, 0.0, 5.5};
    SimOutput cum;
    cum.values = {0.0};
    for (double v : y) cum.values.push_back(cum.values.back() + v);
    auto d = first_difference(cum);
    REQUIRE(d.values.size() == y.size());
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(d.values[i] == doctest::Approx(y[i]));
}

TEST_CASE("simulators are deterministic across the dispatch path") {
    for (const auto& id : {"ar1", "arma_arch", "rw_break", "brock_hommes"}) {
        auto p = default_true_params(id);
        auto a = simulate_model(id, p, 500, 11);
        auto b = simulate_model(id, p, 500, 11);
        CHECK(a.values == b.values);
        CHECK(a.seed == 11);
    }
}

// Null calibration of the benchmark generators: the runs test at the 1% level
// should rarely reject on stationary outputs. The differenced random walk is
// excluded here: with unequal drifts its mean shifts at the break, which the
// test correctly flags (see test_harness for the truth-data warning path).
TEST_CASE("stationarity rejection rates for stationary benchmark outputs") {
    const int n_seeds = 200;
    for (const auto& id : {"ar1", "arma_arch", "brock_hommes"}) {
        auto p = default_true_params(id);
        int rejects = 0;
        for (int s = 0; s < n_seeds; ++s) {
            auto out = simulate_model(id, p, 1000, 50000 + s);
            if (stationarity_runs_test(out.values, 20).p_value < 0.01) ++rejects;
        }
        INFO(id << " rejected " << rejects << "/" << n_seeds);
        CHECK(rejects <= n_seeds / 20);
    }
}

TEST_CASE("differenced random walk without a break passes the null check") {
    auto p = default_true_params("rw_break");
    p.set("d2", 1.0);
    p.set("sigma2", 0.1);
    int rejects = 0;
    const int n_seeds = 200;
    for (int s = 0; s < n_seeds; ++s) {
        auto out = first_difference(simulate_model("rw_break", p, 1000, 90000 + s));
        if (stationarity_runs_test(out.values, 20).p_value < 0.01) ++rejects;
    }
    CHECK(rejects <= n_seeds / 20);
}

TEST_CASE("differenced random walk with the benchmark break rejects more often") {
    // The drift change leaves a genuine mean shift in the differences. With
    // the break at 700 the median splits inside the pre-break cluster, so the
    // test only partially detects it: the rejection rate sits well above the
    // 1% null level but far below certainty.
    auto p = default_true_params("rw_break");
    int rejects = 0;
    const int n_seeds = 200;
    for (int s = 0; s < n_seeds; ++s) {
        auto out = first_difference(simulate_model("rw_break", p, 1000, 70000 + s));
        if (stationarity_runs_test(out.values, 20).p_value < 0.01) ++rejects;
    }
    CHECK(rejects >= 10);
    CHECK(rejects <= 80);
}
