#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "calbench/params.hpp"

namespace calbench {

using Series = std::vector<double>;

/// Raised when a computation needs non-degenerate data (constant series,
/// zero-variance pools, non-finite values).
class DegenerateSeriesError : public std::runtime_error {
public:
    explicit DegenerateSeriesError(const std::string& what) : std::runtime_error(what) {}
};

enum class TransformKind { FirstDifference, DropBurnIn };

struct TransformTag {
    TransformKind kind;
    int n = 0;  // burn-in length for DropBurnIn, unused otherwise

    bool operator==(const TransformTag&) const = default;
};

std::string transform_name(const TransformTag& t);

/// One simulated series with its provenance.
struct SimOutput {
    Series values;
    std::string model;
    ParamVector params;
    std::int64_t seed = 0;
    int t_requested = 0;
    std::vector<TransformTag> transforms;
};

/// R seeded replications sharing model, parameters and transform chain.
struct SeriesEnsemble {
    std::vector<SimOutput> members;

    std::size_t size() const { return members.size(); }
    bool empty() const { return members.empty(); }
};

double series_mean(std::span<const double> x);
/// Population variance (divide by n).
double series_variance(std::span<const double> x);

bool all_finite(std::span<const double> x);
void require_finite(std::span<const double> x, const std::string& context);

}  // namespace calbench
