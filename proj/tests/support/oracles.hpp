#pragma once
// Independent oracles used by the unit and acceptance suites.
//
// Everything in this header is computed by a different route than the
// library under test: direct textbook formulas, exhaustive enumeration,
// and brute-force counting. Keep this file free of explaineval includes
// so the oracles cannot accidentally share code with the implementation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------------
// Correlation oracles
// ---------------------------------------------------------------------------

// Textbook product-moment formula using raw sums:
//   r = (n*Sxy - Sx*Sy) / sqrt((n*Sxx - Sx^2) * (n*Syy - Sy^2))
inline std::optional<double> pearson(const std::vector<double>& x,
                                     const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    const double dn = static_cast<double>(n);
    const double vx = dn * sxx - sx * sx;
    const double vy = dn * syy - sy * sy;
    if (vx <= 0.0 || vy <= 0.0) return std::nullopt;  // constant series
    return (dn * sxy - sx * sy) / std::sqrt(vx * vy);
}

// Average ranks computed by value grouping (ties share the mean of the
// positions they occupy, 1-based).
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline std::optional<double> spearman(const std::vector<double>& x,
                                      const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    return pearson(average_ranks(x), average_ranks(y));
}

// Tau-b via explicit tie-group counting: ties are tallied per distinct value,
// concordance by full pair enumeration with sign comparison.
inline std::optional<double> kendall_tau_b(const std::vector<double>& x,
                                           const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) return std::nullopt;
    long long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            const double s = dx * dy;
            if (s > 0) ++concordant;
            else if (s < 0) ++discordant;
        }
    }
    std::map<double, long long> gx, gy;
    for (double v : x) ++gx[v];
    for (double v : y) ++gy[v];
    const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
    long long n1 = 0, n2 = 0;
    for (auto& [v, t] : gx) n1 += t * (t - 1) / 2;
    for (auto& [v, t] : gy) n2 += t * (t - 1) / 2;
    if (n0 == n1 || n0 == n2) return std::nullopt;  // constant series
    return static_cast<double>(concordant - discordant) /
           std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
}

// ---------------------------------------------------------------------------
// LCS oracle: enumerate every subsequence of `cand` by bitmask and keep the
// longest one that is also a subsequence of `ref`. Exponential on purpose.
// ---------------------------------------------------------------------------

inline bool is_subsequence(const std::vector<int>& needle, const std::vector<int>& hay) {
    std::size_t i = 0;
    for (std::size_t j = 0; j < hay.size() && i < needle.size(); ++j)
        if (hay[j] == needle[i]) ++i;
    return i == needle.size();
}

inline int lcs_exhaustive(const std::vector<int>& cand, const std::vector<int>& ref) {
    if (cand.size() > 20) throw std::invalid_argument("lcs_exhaustive: candidate too long");
    int best = 0;
    const std::uint32_t limit = 1u << cand.size();
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        const int bits = __builtin_popcount(mask);
        if (bits <= best) continue;
        std::vector<int> sub;
        sub.reserve(bits);
        for (std::size_t k = 0; k < cand.size(); ++k)
            if (mask & (1u << k)) sub.push_back(cand[k]);
        if (is_subsequence(sub, ref)) best = bits;
    }
    return best;
}

inline double rouge_l_f_from_lcs(int lcs, std::size_t cand_len, std::size_t ref_len) {
    if (cand_len == 0 || lcs == 0) return 0.0;
    const double p = static_cast<double>(lcs) / static_cast<double>(cand_len);
    const double r = static_cast<double>(lcs) / static_cast<double>(ref_len);
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

// ---------------------------------------------------------------------------
// Brute-force n-gram counting (for BLEU / ROUGE spot checks)
// ---------------------------------------------------------------------------

inline std::map<std::vector<std::string>, long long>
ngram_counts(const std::vector<std::string>& toks, std::size_t n) {
    std::map<std::vector<std::string>, long long> out;
    if (toks.size() < n) return out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i)
        ++out[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
    return out;
}

struct ClippedPrecision {
    long long matched = 0;
    long long total = 0;
};

inline ClippedPrecision clipped_ngram_precision(const std::vector<std::string>& cand,
                                                const std::vector<std::string>& ref,
                                                std::size_t n) {
    ClippedPrecision cp;
    auto cn = ngram_counts(cand, n);
    auto rn = ngram_counts(ref, n);
    for (auto& [g, c] : cn) {
        cp.total += c;
        auto it = rn.find(g);
        if (it != rn.end()) cp.matched += std::min(c, it->second);
    }
    return cp;
}

}  // namespace oracles
