#pragma once

#include <functional>
#include <mutex>
#include <span>
#include <vector>

#include "calbench/params.hpp"

namespace calbench {

/// Bounded black-box objective with an append-only evaluation log. Thread
/// safe: evaluations may run concurrently.
class ObjectiveHandle {
public:
    using Evaluator = std::function<double(std::span<const double>)>;

    /// `space` supplies the coordinate names and bounds; values are ignored.
    ObjectiveHandle(ParamVector space, Evaluator fn);

    /// Evaluates f(x); throws std::invalid_argument when x leaves the bounds.
    double evaluate(std::span<const double> x);

    std::size_t dimension() const { return space_.size(); }
    const ParamVector& space() const { return space_; }
    double lower(std::size_t i) const { return space_[i].lower; }
    double upper(std::size_t i) const { return space_[i].upper; }

    struct LogEntry {
        std::vector<double> x;
        double value;
    };
    const std::vector<LogEntry>& evaluations() const { return log_; }
    std::size_t evaluation_count() const { return log_.size(); }

private:
    ParamVector space_;
    Evaluator fn_;
    std::vector<LogEntry> log_;
    std::mutex mutex_;
};

struct OptimizeResult {
    ParamVector best;
    double value = 0.0;
    std::size_t evaluations = 0;
};

struct PsoSettings {
    int swarm = 30;
    double omega = 0.729;      // Clerc-Kennedy constriction
    double c1 = 1.49445;
    double c2 = 1.49445;
    int budget = 3000;
    bool parallel = true;      // evaluate particles of one iteration concurrently
};

/// Particle swarm with reflective bounds. Best value is non-increasing over
/// iterations; the reported optimum equals the minimum of the evaluation log.
OptimizeResult pso_minimize(ObjectiveHandle& f, const PsoSettings& settings, std::uint64_t seed);

/// Latin hypercube design: per dimension exactly one point per stratum of n
/// equal strata.
std::vector<ParamVector> lhs_sample(const ParamVector& space, int n, std::uint64_t seed);

/// Cubic radial basis surrogate with a linear tail over normalized [0,1]^d
/// coordinates. Interpolates the fitted values at every center.
class Surrogate {
public:
    /// Fits to (points, values); near-duplicate points are jittered by 1e-10
    /// of the range before the solve when the system would be singular.
    Surrogate(const std::vector<std::vector<double>>& points, const std::vector<double>& values);

    double operator()(std::span<const double> x) const;
    std::size_t centers() const { return points_.size(); }

private:
    std::vector<std::vector<double>> points_;
    std::vector<double> rbf_weights_;
    std::vector<double> tail_;  // constant + linear coefficients
};

struct CorsSettings {
    int budget = 0;          // 0 -> 50 * dimension
    int initial_design = 0;  // 0 -> 10 * dimension
    int candidates = 100;    // random starts for the surrogate search
    int refine_steps = 30;
    bool parallel_objective = false;  // parallelize inside the evaluator instead
};

/// CORS: LHS design, then repeatedly minimize the surrogate subject to a
/// minimum distance from evaluated points that cycles through
/// (0.9, 0.75, 0.5, 0.25, 0.05, 0.005, 0) times the attainable maximin
/// distance.
OptimizeResult cors_minimize(ObjectiveHandle& f, const CorsSettings& settings, std::uint64_t seed);

}  // namespace calbench
