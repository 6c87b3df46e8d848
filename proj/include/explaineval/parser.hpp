#pragma once
// Extraction of integer aspect ratings from model reply text.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "explaineval/scores.hpp"

namespace explaineval {

enum class ParseFailure { Missing, OutOfRange, NonInteger, Ambiguous };

std::string_view parse_failure_name(ParseFailure f);

struct ParseOutcome {
    ScoreVector scores;  // null for every aspect that failed
    std::vector<std::pair<Aspect, ParseFailure>> failures;

    bool ok() const { return failures.empty(); }
    std::optional<ParseFailure> failure_for(Aspect a) const;
};

// Parses a reply. Multiple mode (aspect==nullopt) expects all four aspects;
// single mode expects one. Cascade: labelled "Aspect: value" lines, then the
// JSON objects embedded in the text, then (single mode) a lone integer on the
// final line. Values outside 1..5 are failures, never clamped; fractional
// values are failures; the same aspect scored twice with different values is
// ambiguous.
ParseOutcome parse_scores(std::string_view text, std::optional<Aspect> aspect = std::nullopt);

}  // namespace explaineval
