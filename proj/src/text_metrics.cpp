#include "explaineval/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "explaineval/unicode.hpp"

namespace explaineval {

namespace {

constexpr double kEpsilon = 1e-9;

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
    NgramCounts counts;
    if (n == 0 || tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::vector<std::string> gram(tokens.begin() + i, tokens.begin() + i + n);
        ++counts[std::move(gram)];
    }
    return counts;
}

// Clipped overlap: each candidate n-gram counts at most as often as it
// appears in the reference.
std::size_t clipped_matches(const NgramCounts& cand, const NgramCounts& ref) {
    std::size_t matched = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) matched += std::min(count, it->second);
    }
    return matched;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    // Two-row DP keeps memory linear in |b|.
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double f1(double precision, double recall) {
    double denom = precision + recall;
    return denom == 0.0 ? 0.0 : 2.0 * precision * recall / denom;
}

}  // namespace

TokenSequence tokenize(std::string_view text, TokenizerMode mode) {
    TokenSequence seq;
    seq.mode = mode;
    std::string run;
    auto flush = [&] {
        if (!run.empty()) {
            seq.tokens.push_back(run);
            run.clear();
        }
    };
    for (char32_t cp : decode_utf8(text)) {
        if (mode == TokenizerMode::Whitespace) {
            if (is_space(cp)) {
                flush();
            } else {
                append_utf8(run, cp);
            }
            continue;
        }
        // CjkChar: each CJK codepoint is one token; alphanumeric runs group;
        // everything else separates.
        if (is_cjk(cp)) {
            flush();
            std::string one;
            append_utf8(one, cp);
            seq.tokens.push_back(std::move(one));
        } else if (is_word_char(cp)) {
            append_utf8(run, cp);
        } else {
            flush();
        }
    }
    flush();
    return seq;
}

MetricScore bleu_n(const TokenSequence& candidate, const TokenSequence& reference, std::size_t n,
                   BleuSmoothing smoothing) {
    if (n == 0) throw ConfigError("bleu order must be >= 1");
    if (reference.empty()) throw DataError("bleu undefined: empty reference");
    MetricScore score;
    score.metric_id = "bleu-" + std::to_string(n);
    if (candidate.empty()) return score;

    double log_sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        NgramCounts cand = ngram_counts(candidate.tokens, k);
        NgramCounts ref = ngram_counts(reference.tokens, k);
        std::size_t total = candidate.size() >= k ? candidate.size() - k + 1 : 0;
        std::size_t matched = clipped_matches(cand, ref);
        double p;
        if (smoothing == BleuSmoothing::AddEpsilon) {
            p = (static_cast<double>(matched) + kEpsilon) / (static_cast<double>(total) + kEpsilon);
        } else {
            if (matched == 0 || total == 0) return score;  // value stays 0
            p = static_cast<double>(matched) / static_cast<double>(total);
        }
        log_sum += std::log(p);
    }
    double geo_mean = std::exp(log_sum / static_cast<double>(n));

    double c = static_cast<double>(candidate.size());
    double r = static_cast<double>(reference.size());
    double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    score.value = bp * geo_mean;
    return score;
}

MetricScore rouge_n_f(const TokenSequence& candidate, const TokenSequence& reference,
                      std::size_t n) {
    if (n == 0) throw ConfigError("rouge order must be >= 1");
    if (reference.size() < n) throw DataError("rouge undefined: reference has no n-grams");
    MetricScore score;
    score.metric_id = "rouge-" + std::to_string(n) + "-f";
    if (candidate.size() < n) return score;

    NgramCounts cand = ngram_counts(candidate.tokens, n);
    NgramCounts ref = ngram_counts(reference.tokens, n);
    std::size_t matched = clipped_matches(cand, ref);
    double p = static_cast<double>(matched) / static_cast<double>(candidate.size() - n + 1);
    double r = static_cast<double>(matched) / static_cast<double>(reference.size() - n + 1);
    score.value = f1(p, r);
    return score;
}

MetricScore rouge_l_f(const TokenSequence& candidate, const TokenSequence& reference) {
    if (reference.empty()) throw DataError("rouge-l undefined: empty reference");
    MetricScore score;
    score.metric_id = "rouge-l-f";
    if (candidate.empty()) return score;

    double lcs = static_cast<double>(lcs_length(candidate.tokens, reference.tokens));
    double p = lcs / static_cast<double>(candidate.size());
    double r = lcs / static_cast<double>(reference.size());
    score.value = f1(p, r);
    return score;
}

bool is_reference_metric_id(const std::string& metric_id) {
    return metric_id == "bleu-1" || metric_id == "bleu-4" || metric_id == "rouge-1-f" ||
           metric_id == "rouge-l-f";
}

ScoreColumn score_dataset_reference(const Dataset& dataset, const std::string& metric_id,
                                    const MetricConfig& config, ReferenceScoreStats* stats) {
    if (!is_reference_metric_id(metric_id)) {
        throw ConfigError("unknown reference metric: " + metric_id);
    }
    ScoreColumn column = ScoreColumn::empty(dataset.size());
    ReferenceScoreStats local;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& rec = dataset.record(i);
        if (!rec.reference_text.has_value()) {
            ++local.skipped_no_reference;
            continue;
        }
        TokenSequence cand = tokenize(rec.explanation_text, config.tokenizer);
        TokenSequence ref = tokenize(*rec.reference_text, config.tokenizer);
        double value;
        try {
            if (metric_id == "bleu-1") {
                value = bleu_n(cand, ref, 1, config.bleu_smoothing).value;
            } else if (metric_id == "bleu-4") {
                value = bleu_n(cand, ref, 4, config.bleu_smoothing).value;
            } else if (metric_id == "rouge-1-f") {
                value = rouge_n_f(cand, ref, 1).value;
            } else {
                value = rouge_l_f(cand, ref).value;
            }
        } catch (const DataError&) {
            ++local.failed;  // e.g. reference tokenizes to nothing
            continue;
        }
        for (std::size_t a = 0; a < kAspectCount; ++a) column.cells[i][a] = value;
        ++local.scored;
    }
    if (stats) *stats = local;
    return column;
}

}  // namespace explaineval
