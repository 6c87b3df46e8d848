#pragma once
// Evaluation prompt construction and one-shot example selection.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "explaineval/dataset.hpp"
#include "explaineval/scores.hpp"
#include "explaineval/table.hpp"

namespace explaineval {

enum class AspectMode { Single, Multiple };
enum class ShotMode { Zero, OnePersonalized, OneNonPersonalized };

std::string_view aspect_mode_name(AspectMode m);
std::string_view shot_mode_name(ShotMode m);
std::optional<AspectMode> aspect_mode_from_name(std::string_view name);
std::optional<ShotMode> shot_mode_from_name(std::string_view name);

struct PromptConfig {
    AspectMode aspect_mode = AspectMode::Multiple;
    ShotMode shot_mode = ShotMode::Zero;
    std::uint64_t seed = 0;
    std::string template_version = "v1";
};

// A worked example embedded in a one-shot prompt: another explanation with
// the ground-truth ratings it received. Scores are fully imputed before
// inclusion.
struct ShotExample {
    std::string user_id;
    std::string item_id;
    std::string item_title;
    std::string generator_id;
    std::string explanation_text;
    ScoreVector scores;
    bool leaks_target = false;  // example item equals the target item
};

// The exact agreement statement shown for an aspect; these strings define
// the rating task and the prompt audit counts their occurrences.
std::string_view aspect_statement(Aspect a);

// Pure function of its arguments: identical inputs produce byte-identical
// prompts. Single mode requires `aspect`; one-shot modes require `example`.
std::string build_prompt(const ExplanationRecord& record, const PromptConfig& config,
                         std::optional<Aspect> aspect = std::nullopt,
                         const ShotExample* example = nullptr);

// Run-scoped example selection. Anchors are drawn once at construction so
// every prompt in a run shares them: personalized selection fixes one anchor
// item per user (with a per-user alternate used when the anchor IS the
// target); non-personalized selection fixes a single (user, item) pair.
class ExampleSelector {
public:
    ExampleSelector(const Dataset& dataset, const EvaluationTable& table, std::uint64_t seed);

    // Example from the same user and generator, on another item whenever the
    // user has a second item with that generator. Falls back to the target's
    // own record (flagged leaks_target) only when no alternative exists.
    ShotExample personalized(const std::string& user_id, const std::string& generator_id,
                             const std::string& target_item_id) const;

    // Example from the run-wide anchor pair; its generator matches the
    // target's. When the anchor pair lacks that generator, a deterministic
    // re-draw picks among pairs that have it.
    ShotExample non_personalized(const std::string& generator_id) const;

    const std::pair<std::string, std::string>& anchor_pair() const { return anchor_pair_; }
    std::string anchor_item_of(const std::string& user_id) const;

private:
    ShotExample make_example(std::size_t record_index, bool leaks) const;

    const Dataset* dataset_;
    const EvaluationTable* table_;
    std::uint64_t seed_;
    // user_id -> (anchor item, alternate item or empty)
    std::unordered_map<std::string, std::pair<std::string, std::string>> user_anchor_;
    std::pair<std::string, std::string> anchor_pair_;
};

}  // namespace explaineval
