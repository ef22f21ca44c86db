#include "calbench/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "calbench/parallel.hpp"
#include "calbench/rng.hpp"

namespace calbench {
namespace {

constexpr double kBoundSlack = 1e-9;

double reflect_into(double x, double lo, double hi, double& v) {
    if (x < lo) {
        x = lo + (lo - x);
        v = -v;
    } else if (x > hi) {
        x = hi - (x - hi);
        v = -v;
    }
    // a huge overshoot can still be outside after one reflection
    if (x < lo) x = lo;
    if (x > hi) x = hi;
    return x;
}

}  // namespace

ObjectiveHandle::ObjectiveHandle(ParamVector space, Evaluator fn)
    : space_(std::move(space)), fn_(std::move(fn)) {
    if (space_.empty()) throw std::invalid_argument("objective needs at least one coordinate");
}

double ObjectiveHandle::evaluate(std::span<const double> x) {
    if (x.size() != space_.size()) throw std::invalid_argument("objective: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double span = space_[i].upper - space_[i].lower;
        if (x[i] < space_[i].lower - kBoundSlack * span || x[i] > space_[i].upper + kBoundSlack * span)
            throw std::invalid_argument("objective: coordinate " + space_[i].name +
                                        " outside bounds");
    }
    const double value = fn_(x);
    std::lock_guard<std::mutex> lock(mutex_);
    log_.push_back({std::vector<double>(x.begin(), x.end()), value});
    return value;
}

OptimizeResult pso_minimize(ObjectiveHandle& f, const PsoSettings& settings, std::uint64_t seed) {
    const std::size_t d = f.dimension();
    const int swarm = settings.swarm;
    if (swarm < 1) throw std::invalid_argument("pso: swarm size must be >= 1");
    if (settings.budget < swarm) throw std::invalid_argument("pso: budget below swarm size");

    CounterRng rng(seed);
    std::vector<std::vector<double>> x(static_cast<std::size_t>(swarm), std::vector<double>(d));
    std::vector<std::vector<double>> v(static_cast<std::size_t>(swarm), std::vector<double>(d, 0.0));
    for (auto& particle : x)
        for (std::size_t i = 0; i < d; ++i) {
            const double lo = f.lower(i), hi = f.upper(i);
            particle[i] = lo + (hi - lo) * rng.next_uniform();
        }

    std::vector<double> fitness(static_cast<std::size_t>(swarm));
    std::vector<std::vector<double>> pbest = x;
    std::vector<double> pbest_val(static_cast<std::size_t>(swarm),
                                  std::numeric_limits<double>::infinity());

    int remaining = settings.budget;
    auto evaluate_batch = [&](int count) {
        parallel_for(static_cast<std::size_t>(count),
                     [&](std::size_t p) { fitness[p] = f.evaluate(x[p]); },
                     settings.parallel ? 0 : 1);
    };

    std::vector<double> gbest;
    double gbest_val = std::numeric_limits<double>::infinity();

    while (remaining > 0) {
        const int count = std::min(remaining, swarm);
        evaluate_batch(count);
        remaining -= count;
        for (int p = 0; p < count; ++p) {
            const auto idx = static_cast<std::size_t>(p);
            if (fitness[idx] < pbest_val[idx]) {
                pbest_val[idx] = fitness[idx];
                pbest[idx] = x[idx];
            }
            if (fitness[idx] < gbest_val) {
                gbest_val = fitness[idx];
                gbest = x[idx];
            }
        }
        if (remaining <= 0) break;

        for (int p = 0; p < swarm; ++p) {
            const auto idx = static_cast<std::size_t>(p);
            for (std::size_t i = 0; i < d; ++i) {
                const double r1 = rng.next_uniform();
                const double r2 = rng.next_uniform();
                v[idx][i] = settings.omega * v[idx][i] +
                            settings.c1 * r1 * (pbest[idx][i] - x[idx][i]) +
                            settings.c2 * r2 * (gbest[i] - x[idx][i]);
                x[idx][i] = reflect_into(x[idx][i] + v[idx][i], f.lower(i), f.upper(i), v[idx][i]);
            }
        }
    }

    return {f.space().with_values(gbest), gbest_val, f.evaluation_count()};
}

std::vector<ParamVector> lhs_sample(const ParamVector& space, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("lhs_sample: n must be >= 1");
    const std::size_t d = space.size();
    CounterRng rng(seed);

    std::vector<std::vector<double>> coords(d, std::vector<double>(static_cast<std::size_t>(n)));
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<std::size_t> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t k = perm.size(); k > 1; --k)
            std::swap(perm[k - 1], perm[rng.next_below(k)]);
        const double lo = space[i].lower, hi = space[i].upper;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            const double u = rng.next_uniform();
            coords[i][k] = lo + (hi - lo) * (static_cast<double>(perm[k]) + u) /
                                    static_cast<double>(n);
        }
    }

    std::vector<ParamVector> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        std::vector<double> point(d);
        for (std::size_t i = 0; i < d; ++i) point[i] = coords[i][static_cast<std::size_t>(k)];
        out.push_back(space.with_values(point));
    }
    return out;
}

Surrogate::Surrogate(const std::vector<std::vector<double>>& points,
                     const std::vector<double>& values)
    : points_(points) {
    const std::size_t n = points.size();
    if (n == 0 || values.size() != n) throw std::invalid_argument("surrogate: bad fit data");
    const std::size_t d = points[0].size();

    // Jitter exact duplicates so the interpolation system stays regular.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double dist = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double dd = points_[i][k] - points_[j][k];
                dist += dd * dd;
            }
            if (dist < 1e-24)
                for (std::size_t k = 0; k < d; ++k)
                    points_[j][k] += 1e-10 * (static_cast<double>(i + j + k) + 1.0);
        }

    const std::size_t m = n + d + 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double dist = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double dd = points_[i][k] - points_[j][k];
                dist += dd * dd;
            }
            a(i, j) = std::pow(dist, 1.5);  // ||.||^3
        }
        a(i, n) = 1.0;
        a(n, i) = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            a(i, n + 1 + k) = points_[i][k];
            a(n + 1 + k, i) = points_[i][k];
        }
        rhs(i) = values[i];
    }

    Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(rhs);
    rbf_weights_.resize(n);
    for (std::size_t i = 0; i < n; ++i) rbf_weights_[i] = sol(i);
    tail_.resize(d + 1);
    for (std::size_t k = 0; k <= d; ++k) tail_[k] = sol(n + k);
}

double Surrogate::operator()(std::span<const double> x) const {
    const std::size_t d = x.size();
    double out = tail_[0];
    for (std::size_t k = 0; k < d; ++k) out += tail_[k + 1] * x[k];
    for (std::size_t i = 0; i < points_.size(); ++i) {
        double dist = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double dd = x[k] - points_[i][k];
            dist += dd * dd;
        }
        out += rbf_weights_[i] * std::pow(dist, 1.5);
    }
    return out;
}

namespace {

// CORS search state works in normalized [0,1]^d coordinates.
struct UnitBox {
    std::vector<double> lo, span;

    std::vector<double> to_unit(std::span<const double> x) const {
        std::vector<double> u(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            u[i] = span[i] > 0.0 ? (x[i] - lo[i]) / span[i] : 0.5;
        return u;
    }
    std::vector<double> from_unit(std::span<const double> u) const {
        std::vector<double> x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) x[i] = lo[i] + span[i] * u[i];
        return x;
    }
};

double min_distance(const std::vector<std::vector<double>>& pts, std::span<const double> u) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        double dist = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double dd = u[k] - p[k];
            dist += dd * dd;
        }
        best = std::min(best, dist);
    }
    return std::sqrt(best);
}

}  // namespace

OptimizeResult cors_minimize(ObjectiveHandle& f, const CorsSettings& settings,
                             std::uint64_t seed) {
    const std::size_t d = f.dimension();
    const int budget = settings.budget > 0 ? settings.budget : 50 * static_cast<int>(d);
    int n0 = settings.initial_design > 0 ? settings.initial_design : 10 * static_cast<int>(d);
    n0 = std::max(2, std::min(n0, budget - 1));
    if (budget <= n0) throw std::invalid_argument("cors: budget must exceed the initial design");

    UnitBox box;
    box.lo.resize(d);
    box.span.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        box.lo[i] = f.lower(i);
        box.span[i] = f.upper(i) - f.lower(i);
    }

    std::vector<std::vector<double>> unit_pts;
    std::vector<double> vals;
    auto eval_at_unit = [&](std::span<const double> u) {
        const auto x = box.from_unit(u);
        const double val = f.evaluate(x);
        unit_pts.emplace_back(u.begin(), u.end());
        vals.push_back(val);
        return val;
    };

    for (const auto& p : lhs_sample(f.space(), n0, seed)) {
        const auto values = p.values();
        eval_at_unit(box.to_unit(values));
    }

    static constexpr std::array<double, 7> kBetaCycle = {0.9, 0.75, 0.5, 0.25, 0.05, 0.005, 0.0};
    CounterRng rng(seed ^ 0x5b5bb5b5ull);

    std::size_t best_idx = static_cast<std::size_t>(
        std::min_element(vals.begin(), vals.end()) - vals.begin());

    int iteration = 0;
    while (static_cast<int>(vals.size()) < budget) {
        Surrogate surrogate(unit_pts, vals);
        const double beta = kBetaCycle[static_cast<std::size_t>(iteration) % kBetaCycle.size()];
        ++iteration;

        // candidate starts; the attainable maximin distance scales the
        // distance constraint so that at least one candidate is feasible
        std::vector<std::vector<double>> cands(static_cast<std::size_t>(settings.candidates),
                                               std::vector<double>(d));
        double d_max = 0.0;
        for (auto& c : cands) {
            for (std::size_t i = 0; i < d; ++i) c[i] = rng.next_uniform();
            d_max = std::max(d_max, min_distance(unit_pts, c));
        }
        const double min_dist = beta * d_max;

        double best_s = std::numeric_limits<double>::infinity();
        std::vector<double> best_c;
        for (auto& c : cands) {
            if (min_distance(unit_pts, c) < min_dist) continue;
            // local pattern search on the surrogate under the constraint
            double step = 0.1;
            double s_val = surrogate(c);
            for (int it = 0; it < settings.refine_steps; ++it) {
                bool improved = false;
                for (std::size_t i = 0; i < d; ++i) {
                    for (double dir : {1.0, -1.0}) {
                        auto trial = c;
                        trial[i] = std::clamp(trial[i] + dir * step, 0.0, 1.0);
                        if (min_distance(unit_pts, trial) < min_dist) continue;
                        const double t_val = surrogate(trial);
                        if (t_val < s_val) {
                            s_val = t_val;
                            c = trial;
                            improved = true;
                        }
                    }
                }
                if (!improved) step *= 0.5;
                if (step < 1e-4) break;
            }
            if (s_val < best_s) {
                best_s = s_val;
                best_c = c;
            }
        }
        if (best_c.empty()) {
            // no candidate met the constraint: take the most remote one
            double far = -1.0;
            for (const auto& c : cands) {
                const double dist = min_distance(unit_pts, c);
                if (dist > far) {
                    far = dist;
                    best_c = c;
                }
            }
        }

        eval_at_unit(best_c);
        if (vals.back() < vals[best_idx]) best_idx = vals.size() - 1;
    }

    const auto best_x = box.from_unit(unit_pts[best_idx]);
    return {f.space().with_values(best_x), vals[best_idx], f.evaluation_count()};
}

}  // namespace calbench
