#include "calbench/rng.hpp"

#include <cmath>

namespace calbench {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed) : base_(mix64(seed + kGamma) + kGamma) {}

std::uint64_t CounterRng::next_u64() { return mix64(base_ + (counter_++) * kGamma); }

double CounterRng::next_uniform() {
    // 53 significant bits mapped to (0, 1]; never returns 0 so log() is safe.
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
    // Marsaglia polar form, one deviate per accepted pair. The rejection loop
    // consumes a deterministic number of counter steps for a given seed.
    for (;;) {
        const double u = 2.0 * next_uniform() - 1.0;
        const double v = 2.0 * next_uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

std::uint64_t CounterRng::next_below(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64.
    return next_u64() % n;
}

NoiseSource::NoiseSource(std::uint64_t seed, std::vector<double> values, bool injected)
    : rng_(seed), values_(std::move(values)), injected_(injected) {}

NoiseSource NoiseSource::gaussian(std::uint64_t seed) { return NoiseSource(seed, {}, false); }

NoiseSource NoiseSource::injected(std::vector<double> values) {
    return NoiseSource(0, std::move(values), true);
}

double NoiseSource::next() {
    if (!injected_) return rng_.next_gaussian();
    if (pos_ >= values_.size()) throw std::runtime_error("injected noise sequence exhausted");
    return values_[pos_++];
}

}  // namespace calbench
