#pragma once
// Synthetic corpus generator with known latent quality, used to calibrate
// evaluators and to exercise the pipeline without live annotations.

#include <cstdint>
#include <string>
#include <vector>

#include "explaineval/dataset.hpp"
#include "explaineval/table.hpp"

namespace explaineval {

struct SyntheticConfig {
    int n_users = 30;
    int items_per_user = 8;
    int n_generators = 8;
    double quality_signal_sd = 1.0;  // sd of the latent per-record quality
    double user_bias_sd = 0.0;       // sd of the per-user rating offset
    double evaluator_noise_sd = 0.5; // sd used by the noisy stub column
    std::uint64_t seed = 0;
};

struct SyntheticCorpus {
    Dataset dataset;
    // Ground truth: clamp(round(3 + quality + user_offset)) to 1..5,
    // replicated across the four aspects.
    ScoreColumn ground_truth;
    // Latent quality, before user offsets and rounding; exposed for oracles.
    std::vector<double> quality;
    std::vector<double> user_offset;  // aligned with dataset records
};

SyntheticCorpus generate_synthetic(const SyntheticConfig& config);

// Stub columns derived from a corpus. All are deterministic in (corpus, seed).
//   quality:      the latent quality itself (real-valued, no user offsets)
//   user_shifted: ground truth plus a fresh per-user offset (constant within
//                 each user, so pair-level structure is preserved exactly)
//   noisy:        ground truth plus N(0, evaluator_noise_sd) per record-aspect
ScoreColumn quality_column(const SyntheticCorpus& corpus);
ScoreColumn user_shifted_column(const SyntheticCorpus& corpus, double offset_sd,
                                std::uint64_t seed);
ScoreColumn noisy_column(const SyntheticCorpus& corpus, double noise_sd, std::uint64_t seed);

}  // namespace explaineval
