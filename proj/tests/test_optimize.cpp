#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "calbench/optimize.hpp"

using namespace calbench;

namespace {

ParamVector box2(double lo = -5.0, double hi = 5.0) {
    ParamVector p;
    p.add("x", 0.0, lo, hi);
    p.add("y", 0.0, lo, hi);
    return p;
}

double sphere(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

}  // namespace

TEST_CASE("pso solves the sphere within budget") {
    ObjectiveHandle f(box2(), sphere);
    PsoSettings st;
    st.budget = 3000;
    const auto res = pso_minimize(f, st, 1);
    CHECK(res.value < 1e-4);
    CHECK(res.evaluations <= 3000);
}

TEST_CASE("pso with budget equal to the swarm returns the best initial particle") {
    ObjectiveHandle f(box2(), sphere);
    PsoSettings st;
    st.swarm = 10;
    st.budget = 10;
    const auto res = pso_minimize(f, st, 2);
    CHECK(f.evaluation_count() == 10);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : f.evaluations()) best = std::min(best, e.value);
    CHECK(res.value == best);
}

TEST_CASE("pso is deterministic for a fixed seed") {
    ObjectiveHandle f1(box2(), sphere), f2(box2(), sphere);
    PsoSettings st;
    st.budget = 600;
    st.parallel = false;
    const auto r1 = pso_minimize(f1, st, 42);
    const auto r2 = pso_minimize(f2, st, 42);
    CHECK(r1.value == r2.value);
    CHECK(r1.best.values() == r2.best.values());
    REQUIRE(f1.evaluation_count() == f2.evaluation_count());
    for (std::size_t i = 0; i < f1.evaluation_count(); ++i)
        CHECK(f1.evaluations()[i].x == f2.evaluations()[i].x);
}

TEST_CASE("pso respects bounds and budget; result matches the log minimum") {
    ParamVector space;
    space.add("a", 0.0, -1.0, 2.0);
    space.add("b", 0.6, 0.5, 0.75);
    ObjectiveHandle f(space, [](std::span<const double> x) {
        return std::sin(5 * x[0]) + (x[1] - 0.6) * (x[1] - 0.6);
    });
    PsoSettings st;
    st.budget = 500;
    const auto res = pso_minimize(f, st, 7);
    CHECK(f.evaluation_count() <= 500);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : f.evaluations()) {
        CHECK(e.x[0] >= -1.0);
        CHECK(e.x[0] <= 2.0);
        CHECK(e.x[1] >= 0.5);
        CHECK(e.x[1] <= 0.75);
        best = std::min(best, e.value);
    }
    CHECK(res.value == best);
}

TEST_CASE("lhs occupies every stratum once") {
    ParamVector space;
    space.add("u", 0.5, 0.0, 1.0);
    const auto pts = lhs_sample(space, 4, 3);
    REQUIRE(pts.size() == 4);
    std::set<int> strata;
    for (const auto& p : pts) {
        const double v = p.get("u");
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        strata.insert(static_cast<int>(v * 4.0));
    }
    CHECK(strata.size() == 4);
}

TEST_CASE("lhs stratification holds per dimension in higher dimensions") {
    ParamVector space;
    space.add("a", 0.0, -2.0, 2.0);
    space.add("b", 15.0, 10.0, 20.0);
    space.add("c", 0.0, 0.0, 1.0);
    const int n = 16;
    const auto pts = lhs_sample(space, n, 9);
    for (std::size_t dim = 0; dim < 3; ++dim) {
        std::set<int> strata;
        for (const auto& p : pts) {
            const auto& e = p[dim];
            const double unit = (e.value - e.lower) / (e.upper - e.lower);
            strata.insert(std::min(n - 1, static_cast<int>(unit * n)));
        }
        CHECK(strata.size() == static_cast<std::size_t>(n));
    }
}

TEST_CASE("lhs is deterministic for a fixed seed") {
    ParamVector space = box2();
    const auto a = lhs_sample(space, 7, 123);
    const auto b = lhs_sample(space, 7, 123);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values() == b[i].values());
}

TEST_CASE("surrogate interpolates its centers") {
    std::vector<std::vector<double>> pts;
    std::vector<double> vals;
    for (int i = 0; i < 15; ++i) {
        const double x = -5.0 + 10.0 * i / 14.0;
        const double y = 5.0 - 10.0 * i / 14.0 + 0.3 * i;
        pts.push_back({x, y});
        vals.push_back(std::sin(x) + y * y * 0.1);
    }
    Surrogate s(pts, vals);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(std::fabs(s(pts[i]) - vals[i]) < 1e-8);
}

TEST_CASE("surrogate survives duplicate centers via jitter") {
    std::vector<std::vector<double>> pts = {{0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}, {0.5, 0.2}};
    std::vector<double> vals = {1.0, 1.0, 2.0, 1.5};
    Surrogate s(pts, vals);
    CHECK(std::isfinite(s(std::vector<double>{0.25, 0.25})));
}

TEST_CASE("cors solves the sphere with a 100-evaluation budget") {
    ObjectiveHandle f(box2(), sphere);
    CorsSettings st;
    st.budget = 100;
    const auto res = cors_minimize(f, st, 5);
    CHECK(f.evaluation_count() == 100);
    CHECK(res.value < 1e-2);
}

TEST_CASE("cors incumbent is the minimum of the evaluation log and stays in bounds") {
    ObjectiveHandle f(box2(), sphere);
    CorsSettings st;
    st.budget = 60;
    const auto res = cors_minimize(f, st, 8);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : f.evaluations()) {
        for (double v : e.x) {
            CHECK(v >= -5.0);
            CHECK(v <= 5.0);
        }
        best = std::min(best, e.value);
    }
    CHECK(res.value == best);
}

TEST_CASE("cors is deterministic for a fixed seed") {
    ObjectiveHandle f1(box2(), sphere), f2(box2(), sphere);
    CorsSettings st;
    st.budget = 50;
    const auto r1 = cors_minimize(f1, st, 77);
    const auto r2 = cors_minimize(f2, st, 77);
    CHECK(r1.value == r2.value);
    CHECK(r1.best.values() == r2.best.values());
}

TEST_CASE("objective rejects out-of-bounds evaluations") {
    ObjectiveHandle f(box2(), sphere);
    CHECK_THROWS_AS(f.evaluate(std::vector<double>{0.0, 5.5}), std::invalid_argument);
    CHECK_THROWS_AS(f.evaluate(std::vector<double>{1.0}), std::invalid_argument);
}
