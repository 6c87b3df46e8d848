#include "explaineval/scores.hpp"

#include <algorithm>
#include <cctype>

namespace explaineval {

std::string_view aspect_name(Aspect a) {
    switch (a) {
        case Aspect::Persuasiveness: return "Persuasiveness";
        case Aspect::Transparency: return "Transparency";
        case Aspect::Accuracy: return "Accuracy";
        case Aspect::Satisfaction: return "Satisfaction";
    }
    return "";
}

std::optional<Aspect> aspect_from_name(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Aspect a : kAllAspects) {
        std::string canon(aspect_name(a));
        std::transform(canon.begin(), canon.end(), canon.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (lower == canon) return a;
    }
    return std::nullopt;
}

AspectValues to_values(const ScoreVector& v) {
    AspectValues out{};
    for (Aspect a : kAllAspects) {
        const auto& s = v.at(a);
        out[static_cast<std::size_t>(a)] =
            s.is_null() ? std::nullopt : std::optional<double>(static_cast<double>(s.value()));
    }
    return out;
}

ScoreVector impute_ground_truth(const ScoreVector& v) {
    ScoreVector out = v;
    for (Aspect a : kAllAspects) {
        if (out.at(a).is_null()) out.set(a, LikertScore(3));
    }
    return out;
}

std::array<double, kAspectCount> impute_evaluator(const ScoreVector& v) {
    std::array<double, kAspectCount> out{};
    for (Aspect a : kAllAspects) {
        const auto& s = v.at(a);
        out[static_cast<std::size_t>(a)] = s.is_null() ? 0.0 : static_cast<double>(s.value());
    }
    return out;
}

std::array<double, kAspectCount> impute_evaluator(const AspectValues& v) {
    std::array<double, kAspectCount> out{};
    for (std::size_t i = 0; i < kAspectCount; ++i) {
        out[i] = v[i].has_value() ? *v[i] : 0.0;
    }
    return out;
}

}  // namespace explaineval
