#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "calbench/diagnostics.hpp"
#include "calbench/series.hpp"

namespace calbench {

/// Quantizer settings: clamp range, bits per observation, memory in
/// observations. The context tree depth is bits_per_obs * memory_obs.
struct QuantizerSpec {
    double lower_clamp = -5.0;
    double upper_clamp = 5.0;
    int bits_per_obs = 5;
    int memory_obs = 3;

    int depth() const { return bits_per_obs * memory_obs; }
    void validate() const;
};

/// Built-in quantizer settings keyed by model id.
QuantizerSpec default_quantizer(const std::string& model_id);

struct QuantizedSeries {
    std::vector<std::uint8_t> bits;   // bin indices, most-significant bit first
    std::vector<std::uint16_t> bins;  // one bin index per observation
    double clamp_fraction = 0.0;      // share of observations outside the clamp range
};

/// Clamp to [lower, upper], map linearly onto 2^r equal bins, emit r bits per
/// observation MSB-first. Clamping is total; the clamped share is reported.
QuantizedSeries quantize(std::span<const double> series, const QuantizerSpec& q);

/// Binary context tree with Krichevsky-Trofimov estimators and CTW mixing.
/// Training accumulates counts over whole streams (each stream contributes
/// from bit index `depth` onward, so context never bleeds across streams);
/// finalize() then computes the weighted probabilities bottom-up. The final
/// tree depends only on the accumulated counts, not on stream order.
class ContextTree {
public:
    explicit ContextTree(int depth);

    void add_stream(std::span<const std::uint8_t> bits);

    /// Computes KT and weighted log-probabilities; call after training.
    void finalize();

    bool finalized() const { return finalized_; }
    int depth() const { return depth_; }
    std::uint64_t trained_bits() const { return trained_bits_; }

    /// log2 root weighted probability of everything trained so far.
    double root_log2_weighted() const;

    /// log2 P(bit | context) on the frozen tree; `context` packs the most
    /// recent bit in bit 0. The prediction is the ratio of root weighted
    /// probabilities with the bit hypothetically appended.
    double log2_predictive(std::uint64_t context, std::uint8_t bit) const;

    /// Total score in bits: sum of -log2 P(bit_t | context_t) over the
    /// stream, scoring from bit index `depth` onward. Does not mutate.
    double score_bits(std::span<const std::uint8_t> bits) const;

    /// Zero/one counts at the node reached by following `context_path` from
    /// the root (most recent bit first). Exposed for verification.
    std::pair<std::uint32_t, std::uint32_t> node_counts(
        std::span<const std::uint8_t> context_path) const;

private:
    int depth_;
    std::uint64_t mask_;
    std::uint64_t trained_bits_ = 0;
    bool finalized_ = false;
    std::vector<std::uint32_t> counts_;  // 2 entries per heap slot
    std::vector<double> log_pw_;         // natural-log weighted probability per slot
};

/// Markov information criterion: quantize everything, train one tree on the
/// pooled ensemble, return the real series' score in bits per observation.
/// Lower is better.
double mic_objective(std::span<const double> real, const SeriesEnsemble& ensemble,
                     const QuantizerSpec& q);

/// Chi-square test of quantized-bin occupancy against the uniform law.
TestResult quantizer_uniformity_test(std::span<const double> series, const QuantizerSpec& q);

/// Lag-1 Pearson correlation between successive non-overlapping words
/// (memory_obs observations each), normal-approximation p-value.
TestResult quantizer_word_correlation_test(std::span<const double> series, const QuantizerSpec& q);

}  // namespace calbench
