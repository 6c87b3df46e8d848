#include "explaineval/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "explaineval/rng.hpp"
#include "explaineval/unicode.hpp"

namespace explaineval {

namespace {

// CJK codepoint pools for synthesized texts. Reference tokens come from the
// first pool, off-reference noise from the second; the pools are disjoint so
// token overlap measures exactly the intended shared fraction.
constexpr char32_t kSharedPoolStart = 0x4E00;
constexpr char32_t kNoisePoolStart = 0x5500;
constexpr std::size_t kPoolSize = 256;
constexpr std::size_t kReferenceLength = 16;

std::string render_chars(const std::vector<char32_t>& cps) {
    std::string out;
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

int clamp_round_likert(double x) {
    int v = static_cast<int>(std::llround(x));
    return std::clamp(v, 1, 5);
}

std::string padded(int value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticConfig& config) {
    if (config.n_users < 1 || config.items_per_user < 1 || config.n_generators < 1) {
        throw ConfigError("synthetic counts must be >= 1");
    }
    if (config.quality_signal_sd < 0 || config.user_bias_sd < 0 ||
        config.evaluator_noise_sd < 0) {
        throw ConfigError("synthetic standard deviations must be >= 0");
    }

    SyntheticCorpus corpus;
    std::vector<ExplanationRecord> records;
    const std::size_t total = static_cast<std::size_t>(config.n_users) *
                              static_cast<std::size_t>(config.items_per_user) *
                              static_cast<std::size_t>(config.n_generators);
    records.reserve(total);
    corpus.quality.reserve(total);
    corpus.user_offset.reserve(total);
    corpus.ground_truth = ScoreColumn::empty(total);

    Rng quality_rng(derive_seed(config.seed, "quality"));
    Rng bias_rng(derive_seed(config.seed, "user-bias"));
    Rng text_rng(derive_seed(config.seed, "text"));

    std::size_t row = 0;
    for (int u = 0; u < config.n_users; ++u) {
        const std::string user_id = "u" + padded(u + 1, 3);
        const double b_u = bias_rng.normal(0.0, config.user_bias_sd);
        for (int i = 0; i < config.items_per_user; ++i) {
            const int item_number = u * config.items_per_user + i + 1;
            const std::string item_id = "m" + padded(item_number, 4);
            const std::string item_title = "Movie " + std::to_string(item_number);

            // One self-explanation per (user, item), shared as the reference
            // by every generator's record for that pair.
            std::vector<char32_t> ref_cps;
            ref_cps.reserve(kReferenceLength);
            for (std::size_t t = 0; t < kReferenceLength; ++t) {
                ref_cps.push_back(kSharedPoolStart +
                                  static_cast<char32_t>(text_rng.uniform_index(kPoolSize)));
            }
            const std::string reference = render_chars(ref_cps);

            for (int g = 0; g < config.n_generators; ++g) {
                const double q = quality_rng.normal(0.0, config.quality_signal_sd);

                ExplanationRecord rec;
                rec.user_id = user_id;
                rec.item_id = item_id;
                rec.item_title = item_title;
                rec.generator_id = "gen" + padded(g + 1, 2);
                rec.reference_text = reference;

                // The explanation copies a quality-dependent share of the
                // reference tokens; the rest come from the disjoint noise
                // pool, so unigram overlap rises monotonically with q.
                double share = std::clamp(0.5 + 0.2 * q, 0.0, 1.0);
                std::size_t copied = static_cast<std::size_t>(
                    std::llround(share * static_cast<double>(kReferenceLength)));
                std::vector<char32_t> cand_cps;
                cand_cps.reserve(kReferenceLength);
                for (std::size_t t = 0; t < kReferenceLength; ++t) {
                    if (t < copied) {
                        cand_cps.push_back(ref_cps[t]);
                    } else {
                        cand_cps.push_back(
                            kNoisePoolStart +
                            static_cast<char32_t>(text_rng.uniform_index(kPoolSize)));
                    }
                }
                rec.explanation_text = render_chars(cand_cps);
                records.push_back(std::move(rec));

                corpus.quality.push_back(q);
                corpus.user_offset.push_back(b_u);
                double score = static_cast<double>(clamp_round_likert(3.0 + q + b_u));
                for (std::size_t a = 0; a < kAspectCount; ++a) {
                    corpus.ground_truth.cells[row][a] = score;
                }
                ++row;
            }
        }
    }
    corpus.dataset = Dataset(std::move(records));
    return corpus;
}

ScoreColumn quality_column(const SyntheticCorpus& corpus) {
    ScoreColumn column = ScoreColumn::empty(corpus.dataset.size());
    for (std::size_t i = 0; i < corpus.quality.size(); ++i) {
        for (std::size_t a = 0; a < kAspectCount; ++a) {
            column.cells[i][a] = corpus.quality[i];
        }
    }
    return column;
}

ScoreColumn user_shifted_column(const SyntheticCorpus& corpus, double offset_sd,
                                std::uint64_t seed) {
    ScoreColumn column = ScoreColumn::empty(corpus.dataset.size());
    // One offset per user, drawn from a stream independent of generation.
    std::vector<double> offsets;
    const auto& groups = corpus.dataset.user_groups();
    Rng rng(derive_seed(seed, "user-shift"));
    offsets.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        offsets.push_back(rng.normal(0.0, offset_sd));
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t idx : groups[g].second) {
            for (std::size_t a = 0; a < kAspectCount; ++a) {
                column.cells[idx][a] = *corpus.ground_truth.cells[idx][a] + offsets[g];
            }
        }
    }
    return column;
}

ScoreColumn noisy_column(const SyntheticCorpus& corpus, double noise_sd, std::uint64_t seed) {
    ScoreColumn column = ScoreColumn::empty(corpus.dataset.size());
    Rng rng(derive_seed(seed, "noisy"));
    for (std::size_t i = 0; i < corpus.dataset.size(); ++i) {
        for (std::size_t a = 0; a < kAspectCount; ++a) {
            column.cells[i][a] = *corpus.ground_truth.cells[i][a] + rng.normal(0.0, noise_sd);
        }
    }
    return column;
}

}  // namespace explaineval
