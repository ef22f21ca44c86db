#pragma once

#include <cstdint>
#include <map>
#include <span>

#include "calbench/series.hpp"

namespace calbench {

/// Series discretized over its own support into b equal-width bins.
struct SymbolSequence {
    std::vector<std::uint8_t> symbols;
    int alphabet = 0;
    double support_min = 0.0;
    double support_max = 0.0;
};

/// Frequency estimate over length-l words (word code = sum sym_j * b^j).
struct WordDistribution {
    int word_len = 0;
    int alphabet = 0;
    std::map<std::uint64_t, double> probabilities;
};

/// Per-series support binning: the support is (min, max) of this series alone,
/// so adding a constant leaves the symbols unchanged. The maximum maps to
/// symbol b-1; a constant series throws.
SymbolSequence symbolize(std::span<const double> series, int alphabet);

/// Rolling stride-1 windows of length l with frequency-based probabilities.
WordDistribution word_distribution(const SymbolSequence& s, int word_len);

/// Shannon entropy in bits (0 log 0 = 0).
double shannon_entropy(const WordDistribution& d);

struct GslDivSettings {
    int alphabet = 10;
    int max_word_len = 6;
};

/// Subtracted L-divergence between word distributions of the real series and
/// the ensemble mean, summed over word lengths l = 1..L with additively
/// progressive weights w_l = 2l / (L(L+1)). Per-l contribution is
/// 2 S((f+r)/2) - S(f).
double gsl_div(std::span<const double> real, const SeriesEnsemble& ensemble,
               const GslDivSettings& settings = {});

}  // namespace calbench
