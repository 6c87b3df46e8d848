#pragma once
// Aspect enumeration and the Likert score vectors every evaluator produces.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "explaineval/errors.hpp"

namespace explaineval {

// The four user-perception aspects, in their canonical (serialization) order.
enum class Aspect : std::uint8_t {
    Persuasiveness = 0,
    Transparency = 1,
    Accuracy = 2,
    Satisfaction = 3,
};

inline constexpr std::size_t kAspectCount = 4;

inline constexpr std::array<Aspect, kAspectCount> kAllAspects = {
    Aspect::Persuasiveness, Aspect::Transparency, Aspect::Accuracy, Aspect::Satisfaction};

std::string_view aspect_name(Aspect a);

// Parses an aspect name (case-insensitive). Returns nullopt for unknown names.
std::optional<Aspect> aspect_from_name(std::string_view name);

// A single 5-point Likert rating. Absence is a first-class state.
class LikertScore {
public:
    LikertScore() = default;  // null
    explicit LikertScore(int value) : value_(check(value)) {}

    static LikertScore null() { return LikertScore(); }

    bool is_null() const { return !value_.has_value(); }
    bool has_value() const { return value_.has_value(); }
    int value() const { return value_.value(); }

    bool operator==(const LikertScore&) const = default;

private:
    static int check(int v) {
        if (v < 1 || v > 5) {
            throw DataError("likert score out of range [1,5]: " + std::to_string(v));
        }
        return v;
    }
    std::optional<int> value_;
};

// One LikertScore per aspect, indexed by Aspect.
class ScoreVector {
public:
    ScoreVector() = default;  // all null
    explicit ScoreVector(std::array<LikertScore, kAspectCount> scores) : scores_(scores) {}

    const LikertScore& at(Aspect a) const { return scores_[static_cast<std::size_t>(a)]; }
    void set(Aspect a, LikertScore s) { scores_[static_cast<std::size_t>(a)] = s; }

    bool complete() const {
        for (const auto& s : scores_)
            if (s.is_null()) return false;
        return true;
    }
    bool all_null() const {
        for (const auto& s : scores_)
            if (!s.is_null()) return false;
        return true;
    }

    bool operator==(const ScoreVector&) const = default;

private:
    std::array<LikertScore, kAspectCount> scores_{};
};

// Real-valued per-aspect scores as stored in an evaluation table. Likert
// vectors embed losslessly; reference metrics and ensembles produce
// non-integer values.
using AspectValues = std::array<std::optional<double>, kAspectCount>;

AspectValues to_values(const ScoreVector& v);

// Ground-truth imputation: null -> 3 (unknown user attitude). Idempotent.
ScoreVector impute_ground_truth(const ScoreVector& v);

// Evaluator imputation: null -> 0, a deliberate out-of-scale penalty for
// parse failures. Present values pass through unchanged.
std::array<double, kAspectCount> impute_evaluator(const ScoreVector& v);
std::array<double, kAspectCount> impute_evaluator(const AspectValues& v);

}  // namespace explaineval
