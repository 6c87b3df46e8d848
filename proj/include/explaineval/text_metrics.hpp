#pragma once
// Reference-based text similarity metrics: BLEU-n, ROUGE-n-F and ROUGE-L-F.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "explaineval/dataset.hpp"
#include "explaineval/table.hpp"

namespace explaineval {

enum class TokenizerMode {
    CjkChar,     // each CJK codepoint is a token; other alphanumeric runs group
    Whitespace,  // split on whitespace only
};

enum class BleuSmoothing {
    None,        // any zero n-gram order zeroes the score
    AddEpsilon,  // epsilon added to numerator and denominator of each order
};

struct TokenSequence {
    std::vector<std::string> tokens;
    TokenizerMode mode = TokenizerMode::CjkChar;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

// Text must already be NFC-normalized (dataset ingest guarantees this).
// CjkChar mode: each CJK codepoint is its own token, contiguous non-CJK
// alphanumeric runs become single tokens, punctuation is dropped.
TokenSequence tokenize(std::string_view text, TokenizerMode mode);

struct MetricScore {
    double value = 0.0;  // in [0,1]
    std::string metric_id;
};

// Standard BLEU with uniform weights over orders 1..n and brevity penalty.
// Empty reference raises DataError (the metric is undefined).
MetricScore bleu_n(const TokenSequence& candidate, const TokenSequence& reference, std::size_t n,
                   BleuSmoothing smoothing = BleuSmoothing::None);

// F1 of clipped n-gram overlap precision/recall.
MetricScore rouge_n_f(const TokenSequence& candidate, const TokenSequence& reference,
                      std::size_t n);

// F1 from longest-common-subsequence length: P=LCS/|cand|, R=LCS/|ref|.
MetricScore rouge_l_f(const TokenSequence& candidate, const TokenSequence& reference);

struct MetricConfig {
    TokenizerMode tokenizer = TokenizerMode::CjkChar;
    BleuSmoothing bleu_smoothing = BleuSmoothing::None;
};

// "bleu-1", "bleu-4", "rouge-1-f", "rouge-l-f".
bool is_reference_metric_id(const std::string& metric_id);

struct ReferenceScoreStats {
    std::size_t scored = 0;
    std::size_t skipped_no_reference = 0;
    std::size_t failed = 0;  // metric undefined on a record; cell left null
};

// Scores every record's explanation against its reference text. The scalar
// is replicated across all four aspects: a reference metric is
// aspect-agnostic and meta-evaluation compares it to each aspect's ground
// truth separately. Records without a reference are skipped and counted.
ScoreColumn score_dataset_reference(const Dataset& dataset, const std::string& metric_id,
                                    const MetricConfig& config,
                                    ReferenceScoreStats* stats = nullptr);

}  // namespace explaineval
