#include "calbench/gsl_div.hpp"

#include <cmath>
#include <unordered_map>

namespace calbench {
namespace {

void accumulate_word_counts(const SymbolSequence& s, int word_len,
                            std::unordered_map<std::uint64_t, std::uint32_t>& counts) {
    const std::size_t n = s.symbols.size();
    const std::size_t l = static_cast<std::size_t>(word_len);
    const std::uint64_t b = static_cast<std::uint64_t>(s.alphabet);
    std::uint64_t top = 1;
    for (int j = 1; j < word_len; ++j) top *= b;

    // rolling code: drop the oldest symbol, append the newest
    std::uint64_t code = 0;
    std::uint64_t place = 1;
    for (std::size_t j = 0; j < l; ++j) {
        code += static_cast<std::uint64_t>(s.symbols[j]) * place;
        place *= b;
    }
    counts[code]++;
    for (std::size_t t = 1; t + l <= n; ++t) {
        code = code / b + static_cast<std::uint64_t>(s.symbols[t + l - 1]) * top;
        counts[code]++;
    }
}

}  // namespace

SymbolSequence symbolize(std::span<const double> series, int alphabet) {
    if (alphabet < 2) throw std::invalid_argument("symbolize: alphabet must be >= 2");
    if (alphabet > 255) throw std::invalid_argument("symbolize: alphabet must be <= 255");
    if (series.empty()) throw std::invalid_argument("symbolize: empty series");
    require_finite(series, "symbolize");

    double lo = series[0], hi = series[0];
    for (double v : series) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(lo < hi)) throw DegenerateSeriesError("symbolize: constant series");

    SymbolSequence out;
    out.alphabet = alphabet;
    out.support_min = lo;
    out.support_max = hi;
    out.symbols.resize(series.size());
    const double scale = static_cast<double>(alphabet) / (hi - lo);
    for (std::size_t i = 0; i < series.size(); ++i) {
        int s = static_cast<int>((series[i] - lo) * scale);
        if (s >= alphabet) s = alphabet - 1;  // the maximum maps to the top bin
        if (s < 0) s = 0;
        out.symbols[i] = static_cast<std::uint8_t>(s);
    }
    return out;
}

WordDistribution word_distribution(const SymbolSequence& s, int word_len) {
    if (word_len < 1) throw std::invalid_argument("word_distribution: word length must be >= 1");
    if (s.symbols.size() < static_cast<std::size_t>(word_len))
        throw std::invalid_argument("word_distribution: series shorter than word length");

    std::unordered_map<std::uint64_t, std::uint32_t> counts;
    counts.reserve(s.symbols.size());
    accumulate_word_counts(s, word_len, counts);

    const double total = static_cast<double>(s.symbols.size() - static_cast<std::size_t>(word_len) + 1);
    WordDistribution out;
    out.word_len = word_len;
    out.alphabet = s.alphabet;
    for (const auto& [code, c] : counts) out.probabilities[code] = static_cast<double>(c) / total;
    return out;
}

double shannon_entropy(const WordDistribution& d) {
    double h = 0.0;
    for (const auto& [code, p] : d.probabilities)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

double gsl_div(std::span<const double> real, const SeriesEnsemble& ensemble,
               const GslDivSettings& settings) {
    if (ensemble.empty()) throw std::invalid_argument("gsl_div: empty ensemble");
    const int L = settings.max_word_len;
    if (L < 1) throw std::invalid_argument("gsl_div: max window must be >= 1");

    const auto real_symbols = symbolize(real, settings.alphabet);
    std::vector<SymbolSequence> sim_symbols;
    sim_symbols.reserve(ensemble.size());
    for (const auto& member : ensemble.members)
        sim_symbols.push_back(symbolize(member.values, settings.alphabet));

    // Members of one ensemble share a length, so the mean of their word
    // distributions equals pooled counts over R * (n - l + 1); integer
    // pooling is exact and order free. Unequal lengths take the direct
    // per-member average.
    bool equal_lengths = true;
    for (const auto& sym : sim_symbols)
        if (sym.symbols.size() != sim_symbols.front().symbols.size()) equal_lengths = false;

    const double r_count = static_cast<double>(ensemble.size());
    double total = 0.0;
    std::unordered_map<std::uint64_t, std::uint64_t> pooled;
    std::unordered_map<std::uint64_t, std::uint32_t> counts;
    std::vector<std::uint32_t> dense;
    for (int l = 1; l <= L; ++l) {
        const auto r_dist = word_distribution(real_symbols, l);

        std::vector<std::pair<std::uint64_t, double>> fv;
        std::uint64_t word_space = 1;
        for (int j = 0; j < l; ++j) word_space *= static_cast<std::uint64_t>(settings.alphabet);

        if (equal_lengths && word_space <= (1ull << 22)) {
            // dense pooled counting: direct indexing, no hashing
            dense.assign(word_space, 0);
            for (const auto& sym : sim_symbols) {
                const std::size_t n = sym.symbols.size();
                const std::uint64_t b = static_cast<std::uint64_t>(settings.alphabet);
                const std::uint64_t top = word_space / b;
                std::uint64_t code = 0;
                std::uint64_t place = 1;
                for (int j = 0; j < l; ++j) {
                    code += static_cast<std::uint64_t>(sym.symbols[static_cast<std::size_t>(j)]) *
                            place;
                    place *= b;
                }
                ++dense[code];
                for (std::size_t t = 1; t + static_cast<std::size_t>(l) <= n; ++t) {
                    code = code / b +
                           static_cast<std::uint64_t>(sym.symbols[t + static_cast<std::size_t>(l) - 1]) *
                               top;
                    ++dense[code];
                }
            }
            const double norm =
                r_count * static_cast<double>(sim_symbols.front().symbols.size() -
                                              static_cast<std::size_t>(l) + 1);
            for (std::uint64_t code = 0; code < word_space; ++code)
                if (dense[code] != 0) fv.emplace_back(code, static_cast<double>(dense[code]) / norm);
        } else if (equal_lengths) {
            pooled.clear();
            pooled.reserve(8192);
            for (const auto& sym : sim_symbols) {
                counts.clear();
                accumulate_word_counts(sym, l, counts);
                for (const auto& [code, c] : counts) pooled[code] += c;
            }
            const double norm =
                r_count * static_cast<double>(sim_symbols.front().symbols.size() -
                                              static_cast<std::size_t>(l) + 1);
            for (const auto& [code, c] : pooled)
                fv.emplace_back(code, static_cast<double>(c) / norm);
            std::sort(fv.begin(), fv.end());
        } else {
            std::unordered_map<std::uint64_t, double> f;
            f.reserve(4096);
            for (const auto& sym : sim_symbols) {
                counts.clear();
                accumulate_word_counts(sym, l, counts);
                const double norm =
                    r_count *
                    static_cast<double>(sym.symbols.size() - static_cast<std::size_t>(l) + 1);
                for (const auto& [code, c] : counts) f[code] += static_cast<double>(c) / norm;
            }
            fv.assign(f.begin(), f.end());
            std::sort(fv.begin(), fv.end());
        }

        double s_f = 0.0;
        for (const auto& [code, p] : fv)
            if (p > 0.0) s_f -= p * std::log2(p);

        // S(m) over the union support, m = (f + r) / 2
        double s_m = 0.0;
        auto it_f = fv.cbegin();
        auto it_r = r_dist.probabilities.cbegin();
        while (it_f != fv.cend() || it_r != r_dist.probabilities.cend()) {
            double pf = 0.0, pr = 0.0;
            if (it_r == r_dist.probabilities.cend() ||
                (it_f != fv.cend() && it_f->first < it_r->first)) {
                pf = (it_f++)->second;
            } else if (it_f == fv.cend() || it_r->first < it_f->first) {
                pr = (it_r++)->second;
            } else {
                pf = (it_f++)->second;
                pr = (it_r++)->second;
            }
            const double pm = 0.5 * (pf + pr);
            if (pm > 0.0) s_m -= pm * std::log2(pm);
        }

        const double weight = 2.0 * static_cast<double>(l) /
                              (static_cast<double>(L) * static_cast<double>(L + 1));
        total += weight * (2.0 * s_m - s_f);
    }
    return total;
}

}  // namespace calbench
