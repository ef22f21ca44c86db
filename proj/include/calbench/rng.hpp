#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace calbench {

/// Counter-based pseudo-random generator: the k-th output is a fixed integer
/// hash of (seed, k), so streams are reproducible across platforms and can be
/// split or evaluated in parallel without shared state.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform draw in (0, 1].
    double next_uniform();

    /// Standard normal via the Marsaglia polar method (fixed algorithm so
    /// seeded streams are portable).
    double next_gaussian();

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n);

    /// Jump to an absolute position in the stream.
    void set_counter(std::uint64_t c) { counter_ = c; }

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

/// Innovation stream for the simulators: either seeded standard Gaussians or
/// an injected sequence replayed exactly (used to make tests deterministic).
class NoiseSource {
public:
    static NoiseSource gaussian(std::uint64_t seed);
    static NoiseSource injected(std::vector<double> values);

    /// Next innovation; throws std::runtime_error when an injected sequence
    /// is exhausted.
    double next();

    bool is_injected() const { return injected_; }

private:
    NoiseSource(std::uint64_t seed, std::vector<double> values, bool injected);
    CounterRng rng_;
    std::vector<double> values_;
    std::size_t pos_ = 0;
    bool injected_ = false;
};

}  // namespace calbench
