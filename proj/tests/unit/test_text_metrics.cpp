#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "explaineval/errors.hpp"
#include "explaineval/rng.hpp"
#include "explaineval/text_metrics.hpp"
#include "support/frozen_cases.hpp"
#include "support/oracles.hpp"

using namespace explaineval;

namespace {

TokenSequence seq(std::vector<std::string> tokens) {
    TokenSequence s;
    s.tokens = std::move(tokens);
    return s;
}

std::vector<std::string> tokens_of(std::string_view text, TokenizerMode mode) {
    return tokenize(text, mode).tokens;
}

}  // namespace

TEST_SUITE("text-metrics") {

TEST_CASE("cjk_char tokenizer splits cjk per codepoint and groups word runs") {
    // "我喜欢 Titanic"
    CHECK(tokens_of("\xe6\x88\x91\xe5\x96\x9c\xe6\xac\xa2 Titanic", TokenizerMode::CjkChar) ==
          std::vector<std::string>{"\xe6\x88\x91", "\xe5\x96\x9c", "\xe6\xac\xa2", "Titanic"});
    // Word run adjacent to CJK with no space still separates.
    CHECK(tokens_of("abc\xe7\x94\xb5\xe5\xbd\xb1xy7", TokenizerMode::CjkChar) ==
          std::vector<std::string>{"abc", "\xe7\x94\xb5", "\xe5\xbd\xb1", "xy7"});
    // Punctuation is dropped, including fullwidth punctuation.
    CHECK(tokens_of("\xe7\x94\xb5\xe5\xbd\xb1\xef\xbc\x81 (good)", TokenizerMode::CjkChar) ==
          std::vector<std::string>{"\xe7\x94\xb5", "\xe5\xbd\xb1", "good"});
    CHECK(tokens_of("", TokenizerMode::CjkChar).empty());
    CHECK(tokens_of("  \t ", TokenizerMode::CjkChar).empty());
}

TEST_CASE("whitespace tokenizer splits on whitespace only") {
    CHECK(tokens_of("a b  c", TokenizerMode::Whitespace) ==
          std::vector<std::string>{"a", "b", "c"});
    CHECK(tokens_of(" lead trail ", TokenizerMode::Whitespace) ==
          std::vector<std::string>{"lead", "trail"});
    // Punctuation stays attached in whitespace mode.
    CHECK(tokens_of("a, b.", TokenizerMode::Whitespace) ==
          std::vector<std::string>{"a,", "b."});
    CHECK(tokens_of("", TokenizerMode::Whitespace).empty());
}

TEST_CASE("bleu matches the pre-registered hand-expanded table") {
    for (const auto& c : frozen::bleu_cases()) {
        CAPTURE(c.name);
        double b1 = bleu_n(seq(c.cand), seq(c.ref), 1).value;
        double b4 = bleu_n(seq(c.cand), seq(c.ref), 4).value;
        CHECK(std::abs(b1 - c.bleu1) < 1e-9);
        CHECK(std::abs(b4 - c.bleu4) < 1e-9);
    }
}

TEST_CASE("bleu epsilon smoothing matches the pinned expansion") {
    double v = bleu_n(seq({"a", "b", "c", "d"}), seq({"b", "c", "d", "e"}), 4,
                      BleuSmoothing::AddEpsilon)
                   .value;
    CHECK(std::abs(v - frozen::kShiftByOneBleu4Epsilon) < 1e-9);
}

TEST_CASE("bleu edge cases") {
    CHECK_THROWS_AS(bleu_n(seq({"a"}), seq({}), 1), DataError);
    CHECK(bleu_n(seq({}), seq({"a"}), 1).value == 0.0);
    CHECK_THROWS_AS(bleu_n(seq({"a"}), seq({"a"}), 0), ConfigError);
    CHECK(bleu_n(seq({"a"}), seq({"a"}), 1).metric_id == "bleu-1");
}

TEST_CASE("bleu agrees with the brute-force clipped-precision oracle") {
    Rng rng(2024);
    std::vector<std::string> alphabet = {"x", "y", "z"};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::string> cand, ref;
        std::size_t cl = 1 + rng.uniform_index(8);
        std::size_t rl = 1 + rng.uniform_index(8);
        for (std::size_t i = 0; i < cl; ++i) cand.push_back(alphabet[rng.uniform_index(3)]);
        for (std::size_t i = 0; i < rl; ++i) ref.push_back(alphabet[rng.uniform_index(3)]);

        auto cp = oracles::clipped_ngram_precision(cand, ref, 1);
        double expected = cp.total == 0 ? 0.0
                                        : static_cast<double>(cp.matched) /
                                              static_cast<double>(cp.total);
        if (expected > 0.0 && cand.size() < ref.size()) {
            expected *= std::exp(1.0 - static_cast<double>(ref.size()) /
                                           static_cast<double>(cand.size()));
        }
        CAPTURE(trial);
        CHECK(std::abs(bleu_n(seq(cand), seq(ref), 1).value - expected) < 1e-12);
    }
}

TEST_CASE("rouge-n matches hand-computed overlap") {
    CHECK(rouge_n_f(seq({"a", "b"}), seq({"a", "b"}), 1).value == doctest::Approx(1.0));
    CHECK(rouge_n_f(seq({"a", "b"}), seq({"c", "d"}), 1).value == doctest::Approx(0.0));
    // P = 1/2, R = 1/2 -> F = 0.5.
    CHECK(rouge_n_f(seq({"a", "b"}), seq({"a", "c"}), 1).value == doctest::Approx(0.5));
    // Bigrams: cand {ab,bc}, ref {ab,bd}: P=1/2, R=1/2.
    CHECK(rouge_n_f(seq({"a", "b", "c"}), seq({"a", "b", "d"}), 2).value ==
          doctest::Approx(0.5));
}

TEST_CASE("rouge-n precision is clipped under token repetition") {
    // cand repeats "a" five times; ref has it twice. Clipped match = 2.
    // P = 2/5, R = 2/2 -> F = 2*0.4*1/1.4.
    double v = rouge_n_f(seq({"a", "a", "a", "a", "a"}), seq({"a", "a"}), 1).value;
    CHECK(v == doctest::Approx(2.0 * 0.4 * 1.0 / 1.4));
    CHECK(v <= 1.0);
}

TEST_CASE("rouge-n edge cases") {
    CHECK_THROWS_AS(rouge_n_f(seq({"a"}), seq({}), 1), DataError);
    // Reference too short to have any bigram: undefined.
    CHECK_THROWS_AS(rouge_n_f(seq({"a", "b"}), seq({"a"}), 2), DataError);
    // Candidate too short: defined, scores 0.
    CHECK(rouge_n_f(seq({"a"}), seq({"a", "b"}), 2).value == 0.0);
}

TEST_CASE("rouge-l matches the lcs definition") {
    CHECK(rouge_l_f(seq({"a", "b", "c"}), seq({"a", "b", "c"})).value == doctest::Approx(1.0));
    // LCS("abcd","acbd") = 3 -> P = R = 3/4.
    CHECK(rouge_l_f(seq({"a", "b", "c", "d"}), seq({"a", "c", "b", "d"})).value ==
          doctest::Approx(0.75));
    CHECK(rouge_l_f(seq({"a", "b"}), seq({"c", "d"})).value == doctest::Approx(0.0));
    CHECK_THROWS_AS(rouge_l_f(seq({"a"}), seq({})), DataError);
    CHECK(rouge_l_f(seq({}), seq({"a"})).value == 0.0);
}

TEST_CASE("rouge-l agrees with the exhaustive subsequence oracle on random pairs") {
    Rng rng(77);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<int> cand_ids, ref_ids;
        std::vector<std::string> cand, ref;
        std::size_t cl = 1 + rng.uniform_index(8);
        std::size_t rl = 1 + rng.uniform_index(8);
        for (std::size_t i = 0; i < cl; ++i) {
            int s = static_cast<int>(rng.uniform_index(3));
            cand_ids.push_back(s);
            cand.push_back(std::string(1, static_cast<char>('a' + s)));
        }
        for (std::size_t i = 0; i < rl; ++i) {
            int s = static_cast<int>(rng.uniform_index(3));
            ref_ids.push_back(s);
            ref.push_back(std::string(1, static_cast<char>('a' + s)));
        }
        int lcs = oracles::lcs_exhaustive(cand_ids, ref_ids);
        double expected = oracles::rouge_l_f_from_lcs(lcs, cand.size(), ref.size());
        CAPTURE(trial);
        CHECK(rouge_l_f(seq(cand), seq(ref)).value == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("metric identity on non-empty sequences") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> toks;
        std::size_t len = 4 + rng.uniform_index(6);
        for (std::size_t i = 0; i < len; ++i) {
            toks.push_back(std::string(1, static_cast<char>('a' + rng.uniform_index(4))));
        }
        CHECK(bleu_n(seq(toks), seq(toks), 1).value == doctest::Approx(1.0));
        CHECK(bleu_n(seq(toks), seq(toks), 4).value == doctest::Approx(1.0));
        CHECK(rouge_n_f(seq(toks), seq(toks), 1).value == doctest::Approx(1.0));
        CHECK(rouge_l_f(seq(toks), seq(toks)).value == doctest::Approx(1.0));
    }
}

TEST_CASE("dataset reference scoring replicates the scalar across aspects") {
    std::vector<ExplanationRecord> records(3);
    for (std::size_t i = 0; i < 3; ++i) {
        records[i].user_id = "u1";
        records[i].item_id = "m" + std::to_string(i + 1);
        records[i].item_title = "T";
        records[i].generator_id = "g1";
    }
    records[0].explanation_text = "a b c";
    records[0].reference_text = "a b c";  // perfect match
    records[1].explanation_text = "a b c";
    records[1].reference_text = "a b d";
    records[2].explanation_text = "x y";  // no reference: skipped
    Dataset dataset(std::move(records));

    MetricConfig config;
    config.tokenizer = TokenizerMode::Whitespace;
    ReferenceScoreStats stats;
    ScoreColumn col = score_dataset_reference(dataset, "bleu-1", config, &stats);

    CHECK(stats.scored == 2);
    CHECK(stats.skipped_no_reference == 1);
    CHECK(stats.failed == 0);

    for (std::size_t a = 0; a < kAspectCount; ++a) {
        CHECK(col.cells[0][a] == doctest::Approx(1.0));
        CHECK(col.cells[1][a] == doctest::Approx(2.0 / 3.0));
        CHECK(!col.cells[2][a].has_value());
    }

    // Column values must match per-record single calls.
    auto direct = bleu_n(tokenize("a b c", TokenizerMode::Whitespace),
                         tokenize("a b d", TokenizerMode::Whitespace), 1);
    CHECK(col.cells[1][0] == doctest::Approx(direct.value));
}

TEST_CASE("dataset reference scoring marks undefined records failed") {
    std::vector<ExplanationRecord> records(1);
    records[0].user_id = "u1";
    records[0].item_id = "m1";
    records[0].item_title = "T";
    records[0].generator_id = "g1";
    records[0].explanation_text = "a b";
    records[0].reference_text = "!!!";  // tokenizes to nothing -> metric undefined
    Dataset dataset(std::move(records));

    ReferenceScoreStats stats;
    ScoreColumn col = score_dataset_reference(dataset, "rouge-l-f", MetricConfig{}, &stats);
    CHECK(stats.failed == 1);
    CHECK(!col.cells[0][0].has_value());
}

TEST_CASE("unknown metric ids are rejected") {
    Dataset dataset;
    CHECK_THROWS_AS(score_dataset_reference(dataset, "meteor", MetricConfig{}), ConfigError);
    CHECK(is_reference_metric_id("bleu-1"));
    CHECK(is_reference_metric_id("bleu-4"));
    CHECK(is_reference_metric_id("rouge-1-f"));
    CHECK(is_reference_metric_id("rouge-l-f"));
    CHECK(!is_reference_metric_id("bleu-2"));
}

}  // TEST_SUITE
