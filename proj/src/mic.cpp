#include "calbench/mic.hpp"

#include <array>
#include <cmath>

#include "calbench/mathutil.hpp"

namespace calbench {
namespace {

constexpr int kMaxDepth = 22;  // 2^(D+1) heap slots; 22 keeps the tree under 150 MB
const double kLogHalf = std::log(0.5);

// lgamma lookup for the KT estimator; counts above the table fall back to
// std::lgamma.
constexpr std::size_t kTab = 4096;

const std::array<double, kTab>& lgamma_half_table() {
    static const auto tab = [] {
        std::array<double, kTab> t{};
        for (std::size_t k = 0; k < kTab; ++k) t[k] = std::lgamma(static_cast<double>(k) + 0.5);
        return t;
    }();
    return tab;
}

const std::array<double, kTab>& lgamma_int_table() {
    static const auto tab = [] {
        std::array<double, kTab> t{};
        for (std::size_t k = 0; k < kTab; ++k) t[k] = std::lgamma(static_cast<double>(k) + 1.0);
        return t;
    }();
    return tab;
}

inline double lgamma_half(std::uint64_t k) {
    return k < kTab ? lgamma_half_table()[k] : std::lgamma(static_cast<double>(k) + 0.5);
}

inline double lgamma_int(std::uint64_t k) {
    return k < kTab ? lgamma_int_table()[k] : std::lgamma(static_cast<double>(k) + 1.0);
}

// ln P_KT for final counts (a, b); exchangeable, so order of updates is
// irrelevant: ln [Gamma(a+1/2)Gamma(b+1/2) / (Gamma(1/2)^2 (a+b)!)]
inline double log_kt(std::uint32_t a, std::uint32_t b) {
    static const double lg_half = std::lgamma(0.5);
    return lgamma_half(a) + lgamma_half(b) - lgamma_int(static_cast<std::uint64_t>(a) + b) -
           2.0 * lg_half;
}

// ln(1 + e^x) without overflow.
inline double log1p_exp(double x) { return x > 36.0 ? x : std::log1p(std::exp(x)); }

}  // namespace

void QuantizerSpec::validate() const {
    if (!(lower_clamp < upper_clamp))
        throw std::invalid_argument("quantizer: lower clamp must be below upper clamp");
    if (bits_per_obs < 1 || bits_per_obs > 14)
        throw std::invalid_argument("quantizer: bits per observation must be in [1, 14]");
    if (memory_obs < 1) throw std::invalid_argument("quantizer: memory must be >= 1");
    if (depth() > kMaxDepth)
        throw std::invalid_argument("quantizer: context depth " + std::to_string(depth()) +
                                    " exceeds supported maximum " + std::to_string(kMaxDepth));
}

QuantizerSpec default_quantizer(const std::string& model_id) {
    if (model_id == "ar1") return {-5.0, 5.0, 5, 3};
    if (model_id == "arma_arch") return {-30.0, 30.0, 7, 2};
    if (model_id == "rw_break") return {-15.0, 15.0, 6, 3};
    if (model_id == "brock_hommes") return {-1.0, 1.0, 8, 2};
    throw std::invalid_argument("no quantizer defaults for model: " + model_id);
}

QuantizedSeries quantize(std::span<const double> series, const QuantizerSpec& q) {
    q.validate();
    require_finite(series, "quantize");
    const int levels = 1 << q.bits_per_obs;
    const double scale = static_cast<double>(levels) / (q.upper_clamp - q.lower_clamp);

    QuantizedSeries out;
    out.bins.reserve(series.size());
    out.bits.reserve(series.size() * static_cast<std::size_t>(q.bits_per_obs));
    std::size_t clamped = 0;
    for (double v : series) {
        if (v < q.lower_clamp || v > q.upper_clamp) ++clamped;
        const double c = std::min(std::max(v, q.lower_clamp), q.upper_clamp);
        int bin = static_cast<int>((c - q.lower_clamp) * scale);
        if (bin >= levels) bin = levels - 1;
        out.bins.push_back(static_cast<std::uint16_t>(bin));
        for (int j = q.bits_per_obs - 1; j >= 0; --j)
            out.bits.push_back(static_cast<std::uint8_t>((bin >> j) & 1));
    }
    out.clamp_fraction =
        series.empty() ? 0.0 : static_cast<double>(clamped) / static_cast<double>(series.size());
    return out;
}

ContextTree::ContextTree(int depth) : depth_(depth) {
    if (depth < 1 || depth > kMaxDepth)
        throw std::invalid_argument("context tree depth must be in [1, " +
                                    std::to_string(kMaxDepth) + "]");
    mask_ = (depth >= 64) ? ~0ull : ((1ull << depth) - 1ull);
    const std::size_t slots = 1ull << (depth + 1);
    counts_.assign(2 * slots, 0);
    log_pw_.assign(slots, 0.0);
}

void ContextTree::add_stream(std::span<const std::uint8_t> bits) {
    if (bits.size() <= static_cast<std::size_t>(depth_))
        throw std::invalid_argument("context tree: stream shorter than context depth");
    finalized_ = false;

    std::uint64_t ctx = 0;
    for (int i = 0; i < depth_; ++i) ctx = ((ctx << 1) | bits[static_cast<std::size_t>(i)]) & mask_;

    for (std::size_t t = static_cast<std::size_t>(depth_); t < bits.size(); ++t) {
        const std::uint32_t b = bits[t];
        for (int j = 0; j <= depth_; ++j) {
            const std::uint64_t idx = (1ull << j) + (ctx & ((1ull << j) - 1ull));
            ++counts_[2 * idx + b];
        }
        ctx = ((ctx << 1) | b) & mask_;
        ++trained_bits_;
    }
}

void ContextTree::finalize() {
    for (int j = depth_; j >= 0; --j) {
        const std::uint64_t base = 1ull << j;
        for (std::uint64_t c = 0; c < base; ++c) {
            const std::uint64_t idx = base + c;
            const std::uint32_t n0 = counts_[2 * idx];
            const std::uint32_t n1 = counts_[2 * idx + 1];
            if (n0 + n1 == 0) {
                log_pw_[idx] = 0.0;  // never visited: probability 1 over nothing
                continue;
            }
            const double pe = log_kt(n0, n1);
            if (j == depth_) {
                log_pw_[idx] = pe;
            } else {
                const std::uint64_t child_base = 1ull << (j + 1);
                const double sum = log_pw_[child_base + c] + log_pw_[child_base + c + base];
                log_pw_[idx] = kLogHalf + pe + log1p_exp(sum - pe);
            }
        }
    }
    finalized_ = true;
}

double ContextTree::root_log2_weighted() const {
    if (!finalized_) throw std::logic_error("context tree not finalized");
    return log_pw_[1] / M_LN2;
}

double ContextTree::log2_predictive(std::uint64_t context, std::uint8_t bit) const {
    if (!finalized_) throw std::logic_error("context tree not finalized");
    const std::uint64_t ctx = context & mask_;

    // Hypothetically append `bit` along the context path and rebuild the
    // weighted probabilities of the path bottom-up, without mutating.
    double pw_up = 0.0;
    for (int j = depth_; j >= 0; --j) {
        const std::uint64_t prefix = ctx & ((1ull << j) - 1ull);
        const std::uint64_t idx = (1ull << j) + prefix;
        const std::uint32_t n0 = counts_[2 * idx];
        const std::uint32_t n1 = counts_[2 * idx + 1];
        const std::uint32_t nb = bit ? n1 : n0;
        const double pe_new = log_kt(n0, n1) + std::log((static_cast<double>(nb) + 0.5) /
                                                        (static_cast<double>(n0) + n1 + 1.0));
        if (j == depth_) {
            pw_up = pe_new;
        } else {
            const std::uint64_t child_base = 1ull << (j + 1);
            const std::uint64_t path_child = child_base + (ctx & ((1ull << (j + 1)) - 1ull));
            const std::uint64_t sibling = path_child ^ (1ull << j);
            const double sum = pw_up + log_pw_[sibling];
            pw_up = kLogHalf + pe_new + log1p_exp(sum - pe_new);
        }
    }
    return (pw_up - log_pw_[1]) / M_LN2;
}

double ContextTree::score_bits(std::span<const std::uint8_t> bits) const {
    if (bits.size() <= static_cast<std::size_t>(depth_))
        throw std::invalid_argument("context tree: stream shorter than context depth");
    std::uint64_t ctx = 0;
    for (int i = 0; i < depth_; ++i) ctx = ((ctx << 1) | bits[static_cast<std::size_t>(i)]) & mask_;
    double total = 0.0;
    for (std::size_t t = static_cast<std::size_t>(depth_); t < bits.size(); ++t) {
        total -= log2_predictive(ctx, bits[t]);
        ctx = ((ctx << 1) | bits[t]) & mask_;
    }
    return total;
}

std::pair<std::uint32_t, std::uint32_t> ContextTree::node_counts(
    std::span<const std::uint8_t> context_path) const {
    if (context_path.size() > static_cast<std::size_t>(depth_))
        throw std::invalid_argument("context path longer than tree depth");
    std::uint64_t prefix = 0;
    for (std::size_t j = 0; j < context_path.size(); ++j)
        prefix |= static_cast<std::uint64_t>(context_path[j] & 1) << j;
    const std::uint64_t idx = (1ull << context_path.size()) + prefix;
    return {counts_[2 * idx], counts_[2 * idx + 1]};
}

double mic_objective(std::span<const double> real, const SeriesEnsemble& ensemble,
                     const QuantizerSpec& q) {
    if (ensemble.empty()) throw std::invalid_argument("mic_objective: empty ensemble");
    q.validate();

    ContextTree tree(q.depth());
    for (const auto& member : ensemble.members) {
        const auto qb = quantize(member.values, q);
        tree.add_stream(qb.bits);
    }
    tree.finalize();

    const auto real_bits = quantize(real, q);
    if (real_bits.bits.size() <= static_cast<std::size_t>(q.depth()))
        throw std::invalid_argument("mic_objective: real series shorter than tree memory");
    const double lambda = tree.score_bits(real_bits.bits);
    const double scored_obs =
        static_cast<double>(real_bits.bits.size() - static_cast<std::size_t>(q.depth())) /
        static_cast<double>(q.bits_per_obs);
    return lambda / scored_obs;
}

TestResult quantizer_uniformity_test(std::span<const double> series, const QuantizerSpec& q) {
    const auto qs = quantize(series, q);
    const int levels = 1 << q.bits_per_obs;
    std::vector<std::size_t> occ(static_cast<std::size_t>(levels), 0);
    for (auto b : qs.bins) ++occ[b];
    const double expected = static_cast<double>(qs.bins.size()) / static_cast<double>(levels);
    if (expected <= 0.0) throw std::invalid_argument("uniformity test: empty series");
    double chi2 = 0.0;
    for (auto c : occ) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    return {"quantizer_uniformity", chi2, chi_square_sf(chi2, static_cast<double>(levels - 1)),
            {series.size()}};
}

TestResult quantizer_word_correlation_test(std::span<const double> series,
                                           const QuantizerSpec& q) {
    const auto qs = quantize(series, q);
    const std::size_t l = static_cast<std::size_t>(q.memory_obs);
    const std::size_t words = qs.bins.size() / l;
    if (words < 3) throw std::invalid_argument("word correlation test: series too short");

    std::vector<double> codes(words);
    for (std::size_t w = 0; w < words; ++w) {
        double code = 0.0;
        for (std::size_t j = 0; j < l; ++j)
            code = code * static_cast<double>(1 << q.bits_per_obs) +
                   static_cast<double>(qs.bins[w * l + j]);
        codes[w] = code;
    }

    const std::size_t m = words - 1;
    const double mean = series_mean(codes);
    double denom = 0.0;
    for (double c : codes) denom += (c - mean) * (c - mean);
    double num = 0.0;
    for (std::size_t w = 0; w + 1 < words; ++w) num += (codes[w] - mean) * (codes[w + 1] - mean);
    const double rho = denom > 0.0 ? num / denom : 0.0;
    const double z = rho * std::sqrt(static_cast<double>(m));
    return {"quantizer_word_correlation", rho, 2.0 * normal_sf(std::fabs(z)), {series.size()}};
}

}  // namespace calbench
