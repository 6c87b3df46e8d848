#include "explaineval/prompt.hpp"

#include <cmath>

#include "explaineval/rng.hpp"

namespace explaineval {

namespace {

// Canonical prompt template, selected by PromptConfig::template_version.
// Placeholders: {item_title}, {aspect_block}, {example_block}, {explanation},
// {format_block}. Any wording change must ship under a new version string so
// cached responses never mix templates.
constexpr std::string_view kTemplateV1 =
    "You are evaluating explanations on a movie recommendation platform. A user received a "
    "recommendation for the movie \"{item_title}\" along with a text explaining why it was "
    "recommended. Judge the explanation from that user's point of view.\n"
    "\n"
    "For each statement below, give an integer rating from 1 to 5, where 1 means the user would "
    "strongly disagree and 5 means the user would strongly agree.\n"
    "\n"
    "{aspect_block}"
    "\n"
    "{example_block}"
    "Now rate this explanation.\n"
    "Movie: \"{item_title}\"\n"
    "Explanation: {explanation}\n"
    "\n"
    "{format_block}";

std::string_view template_text(const std::string& version) {
    if (version == "v1") return kTemplateV1;
    throw ConfigError("unknown prompt template version: " + version);
}

void replace_all(std::string& text, std::string_view placeholder, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
        text.replace(pos, placeholder.size(), value);
        pos += value.size();
    }
}

std::string rating_line(Aspect a, const LikertScore& score) {
    std::string line(aspect_name(a));
    line += ": ";
    line += std::to_string(score.value());
    return line;
}

}  // namespace

std::string_view aspect_mode_name(AspectMode m) {
    return m == AspectMode::Single ? "single" : "multiple";
}

std::string_view shot_mode_name(ShotMode m) {
    switch (m) {
        case ShotMode::Zero: return "zero";
        case ShotMode::OnePersonalized: return "one_personalized";
        case ShotMode::OneNonPersonalized: return "one_nonpersonalized";
    }
    return "";
}

std::optional<AspectMode> aspect_mode_from_name(std::string_view name) {
    if (name == "single") return AspectMode::Single;
    if (name == "multiple") return AspectMode::Multiple;
    return std::nullopt;
}

std::optional<ShotMode> shot_mode_from_name(std::string_view name) {
    if (name == "zero") return ShotMode::Zero;
    if (name == "one_personalized") return ShotMode::OnePersonalized;
    if (name == "one_nonpersonalized") return ShotMode::OneNonPersonalized;
    return std::nullopt;
}

std::string_view aspect_statement(Aspect a) {
    switch (a) {
        case Aspect::Persuasiveness: return "This explanation is convincing to me";
        case Aspect::Transparency:
            return "Based on this explanation, I understand why this movie is recommended";
        case Aspect::Accuracy: return "This explanation is consistent with my interests";
        case Aspect::Satisfaction: return "I am satisfied with this explanation";
    }
    return "";
}

std::string build_prompt(const ExplanationRecord& record, const PromptConfig& config,
                         std::optional<Aspect> aspect, const ShotExample* example) {
    if (config.aspect_mode == AspectMode::Single && !aspect.has_value()) {
        throw ConfigError("single aspect mode requires a target aspect");
    }
    if (config.shot_mode != ShotMode::Zero && example == nullptr) {
        throw ConfigError("one-shot mode requires a worked example");
    }

    std::vector<Aspect> requested;
    if (config.aspect_mode == AspectMode::Single) {
        requested.push_back(*aspect);
    } else {
        requested.assign(kAllAspects.begin(), kAllAspects.end());
    }

    std::string aspect_block;
    for (Aspect a : requested) {
        aspect_block += "- ";
        aspect_block += aspect_name(a);
        aspect_block += ": \"";
        aspect_block += aspect_statement(a);
        aspect_block += "\"\n";
    }

    std::string example_block;
    if (config.shot_mode != ShotMode::Zero) {
        example_block += "Example of an explanation this rating scale was applied to:\n";
        example_block += "Movie: \"" + example->item_title + "\"\n";
        example_block += "Explanation: " + example->explanation_text + "\n";
        example_block += "Ratings:\n";
        for (Aspect a : requested) {
            example_block += rating_line(a, example->scores.at(a)) + "\n";
        }
        example_block += "\n";
    }

    std::string format_block;
    if (config.aspect_mode == AspectMode::Single) {
        format_block += "Answer with exactly one line in this format:\n";
    } else {
        format_block += "Answer with exactly four lines, in this order and format:\n";
    }
    for (Aspect a : requested) {
        format_block += std::string(aspect_name(a)) + ": <integer 1-5>\n";
    }

    std::string prompt(template_text(config.template_version));
    replace_all(prompt, "{item_title}", record.item_title);
    replace_all(prompt, "{aspect_block}", aspect_block);
    replace_all(prompt, "{example_block}", example_block);
    replace_all(prompt, "{explanation}", record.explanation_text);
    replace_all(prompt, "{format_block}", format_block);
    return prompt;
}

ExampleSelector::ExampleSelector(const Dataset& dataset, const EvaluationTable& table,
                                 std::uint64_t seed)
    : dataset_(&dataset), table_(&table), seed_(seed) {
    table.ground_truth_id();  // examples carry ground-truth scores; fail early
    if (dataset.empty()) throw DataError("example selection needs a non-empty dataset");

    // Per-user anchor item plus an alternate used when the anchor is the
    // target. Each user gets an independent derived stream, so one user's
    // draws never shift another's.
    for (const auto& [user_id, members] : dataset.user_groups()) {
        std::vector<std::string> items = dataset.items_of_user(user_id);
        Rng rng(derive_seed(seed, "example-anchor:" + user_id));
        std::string anchor = items[rng.uniform_index(items.size())];
        std::string alternate;
        if (items.size() >= 2) {
            std::uint64_t k = rng.uniform_index(items.size() - 1);
            for (const auto& item : items) {
                if (item == anchor) continue;
                if (k == 0) {
                    alternate = item;
                    break;
                }
                --k;
            }
        }
        user_anchor_.emplace(user_id, std::make_pair(std::move(anchor), std::move(alternate)));
    }

    Rng pair_rng(derive_seed(seed, "example-anchor-pair"));
    const auto& pairs = dataset.pair_groups();
    anchor_pair_ = pairs[pair_rng.uniform_index(pairs.size())].first;
}

ShotExample ExampleSelector::make_example(std::size_t record_index, bool leaks) const {
    const ExplanationRecord& r = dataset_->record(record_index);
    ShotExample ex;
    ex.user_id = r.user_id;
    ex.item_id = r.item_id;
    ex.item_title = r.item_title;
    ex.generator_id = r.generator_id;
    ex.explanation_text = r.explanation_text;
    ex.leaks_target = leaks;

    // Ground-truth ratings with nulls imputed to 3; examples always show a
    // complete score vector.
    const AspectValues& cell = table_->column(table_->ground_truth_id()).cells[record_index];
    for (Aspect a : kAllAspects) {
        const auto& v = cell[static_cast<std::size_t>(a)];
        if (!v.has_value()) {
            ex.scores.set(a, LikertScore(3));
            continue;
        }
        double d = *v;
        if (d != std::floor(d) || d < 1.0 || d > 5.0) {
            throw DataError("ground-truth score for example is not an integer in [1,5]");
        }
        ex.scores.set(a, LikertScore(static_cast<int>(d)));
    }
    return ex;
}

ShotExample ExampleSelector::personalized(const std::string& user_id,
                                          const std::string& generator_id,
                                          const std::string& target_item_id) const {
    auto anchor_it = user_anchor_.find(user_id);
    if (anchor_it == user_anchor_.end()) throw DataError("unknown user: " + user_id);
    const auto& [anchor, alternate] = anchor_it->second;

    // Items of this user that actually carry a record for this generator,
    // excluding the target so its own ground truth never leaks into a prompt.
    std::vector<std::string> eligible;
    std::optional<std::size_t> target_index;
    for (const auto& item : dataset_->items_of_user(user_id)) {
        auto idx = dataset_->index_of(make_record_key(user_id, item, generator_id));
        if (!idx) continue;
        if (item == target_item_id) {
            target_index = idx;
        } else {
            eligible.push_back(item);
        }
    }

    auto index_of_item = [&](const std::string& item) {
        return dataset_->index_of(make_record_key(user_id, item, generator_id));
    };

    if (eligible.empty()) {
        // Single-item fallback: reuse the target's own record, flagged so the
        // caller can log the leak.
        if (!target_index) {
            throw DataError("no example available for user '" + user_id + "' and generator '" +
                            generator_id + "'");
        }
        return make_example(*target_index, /*leaks=*/true);
    }

    for (const std::string& preferred : {anchor, alternate}) {
        if (preferred.empty() || preferred == target_item_id) continue;
        for (const auto& item : eligible) {
            if (item == preferred) return make_example(*index_of_item(item), /*leaks=*/false);
        }
    }

    // Anchor and alternate both unusable (records missing for this
    // generator): deterministic re-draw on a stream keyed by the lookup, so
    // call order never matters.
    Rng rng(derive_seed(seed_, "example-redraw:" + user_id + ":" + generator_id));
    const std::string& item = eligible[rng.uniform_index(eligible.size())];
    return make_example(*index_of_item(item), /*leaks=*/false);
}

ShotExample ExampleSelector::non_personalized(const std::string& generator_id) const {
    auto idx = dataset_->index_of(
        make_record_key(anchor_pair_.first, anchor_pair_.second, generator_id));
    if (idx) return make_example(*idx, /*leaks=*/false);

    // The run-wide anchor pair has no record for this generator; re-draw
    // among pairs that do.
    std::vector<std::size_t> candidates;
    for (const auto& [pair, members] : dataset_->pair_groups()) {
        auto i = dataset_->index_of(make_record_key(pair.first, pair.second, generator_id));
        if (i) candidates.push_back(*i);
    }
    if (candidates.empty()) {
        throw DataError("no (user, item) pair has a record for generator '" + generator_id + "'");
    }
    Rng rng(derive_seed(seed_, "example-pair-redraw:" + generator_id));
    return make_example(candidates[rng.uniform_index(candidates.size())], /*leaks=*/false);
}

std::string ExampleSelector::anchor_item_of(const std::string& user_id) const {
    auto it = user_anchor_.find(user_id);
    if (it == user_anchor_.end()) throw DataError("unknown user: " + user_id);
    return it->second.first;
}

}  // namespace explaineval
