#include "explaineval/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

namespace explaineval {

namespace {

using json = nlohmann::json;

// A finding is one observed rating token for one aspect; the token keeps the
// raw text ("4", "6", "3.5") so conflicting observations can be compared
// before any range policy is applied.
struct Finding {
    Aspect aspect;
    std::string token;
};

bool is_decor(char c) { return c == '*' || c == '_' || c == '`' || c == '#'; }

bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Reads a number token (optional sign, digits, optional fraction) starting at
// `pos`. Returns the token text or empty if there is no digit there.
std::string read_number(std::string_view line, std::size_t pos) {
    std::size_t i = pos;
    std::string token;
    if (i < line.size() && (line[i] == '-' || line[i] == '+')) {
        token.push_back(line[i]);
        ++i;
    }
    std::size_t digits_start = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == digits_start) return "";
    token.append(line.substr(digits_start, i - digits_start));
    if (i + 1 < line.size() && line[i] == '.' &&
        std::isdigit(static_cast<unsigned char>(line[i + 1]))) {
        std::size_t frac_start = i + 1;
        std::size_t j = frac_start;
        while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
        token.push_back('.');
        token.append(line.substr(frac_start, j - frac_start));
    }
    return token;
}

// Labelled-line scan: every unquoted "AspectName [decor]* : [decor]* number"
// occurrence in the line, markdown decoration tolerated. Quoted names are
// left for the JSON stage.
void scan_labelled_line(std::string_view line, std::vector<Finding>& findings) {
    std::string lower = lowercase(line);
    for (Aspect a : kAllAspects) {
        std::string name = lowercase(aspect_name(a));
        std::size_t from = 0;
        while (true) {
            std::size_t pos = lower.find(name, from);
            if (pos == std::string::npos) break;
            from = pos + 1;
            // Word boundaries, and no quote immediately before the name.
            if (pos > 0 && (is_word(line[pos - 1]) || line[pos - 1] == '"' || line[pos - 1] == '\''))
                continue;
            std::size_t i = pos + name.size();
            if (i < line.size() && is_word(line[i])) continue;
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || is_decor(line[i]))) ++i;
            if (i >= line.size() || line[i] != ':') continue;
            ++i;
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || is_decor(line[i]))) ++i;
            std::string token = read_number(line, i);
            if (token.empty()) continue;  // prose like "Satisfaction: strongly agree"
            findings.push_back({a, std::move(token)});
        }
    }
}

// Extracts every balanced {...} substring that parses as a JSON object and
// harvests its aspect-named members.
void scan_json_objects(std::string_view text, std::vector<Finding>& findings) {
    std::size_t pos = 0;
    while ((pos = text.find('{', pos)) != std::string::npos) {
        // Find the matching brace, honoring strings and escapes.
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        std::size_t end = std::string::npos;
        for (std::size_t i = pos; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) {
                    end = i;
                    break;
                }
            }
        }
        if (end == std::string::npos) break;  // unbalanced; nothing further can close

        json obj = json::parse(text.substr(pos, end - pos + 1), nullptr, false);
        if (obj.is_object()) {
            for (auto it = obj.begin(); it != obj.end(); ++it) {
                auto aspect = aspect_from_name(it.key());
                if (!aspect) continue;
                const json& v = it.value();
                std::string token;
                if (v.is_number_integer()) {
                    token = std::to_string(v.get<std::int64_t>());
                } else if (v.is_number_float()) {
                    token = v.dump();
                } else if (v.is_string()) {
                    std::string s = v.get<std::string>();
                    std::size_t start = s.find_first_not_of(" \t");
                    if (start == std::string::npos) continue;
                    token = read_number(s, start);
                    if (token.empty()) continue;
                } else {
                    continue;
                }
                findings.push_back({*aspect, std::move(token)});
            }
            pos = end + 1;
        } else {
            ++pos;
        }
    }
}

// Removes every occurrence of `needle` (case-insensitive) from `line`.
void strip_idiom(std::string& line, std::string_view needle) {
    std::string lower = lowercase(line);
    std::string needle_lower = lowercase(needle);
    std::size_t pos;
    while ((pos = lower.find(needle_lower)) != std::string::npos) {
        line.erase(pos, needle.size());
        lower.erase(pos, needle.size());
    }
}

// Final-line fallback for single-aspect replies: after stripping "/5" and
// "out of 5" idioms, a final line containing exactly one number is read as
// the answer.
void scan_final_line(std::string_view text, Aspect aspect, std::vector<Finding>& findings) {
    // Last non-blank line.
    std::size_t end = text.size();
    while (end > 0) {
        std::size_t start = text.find_last_of('\n', end - 1);
        std::size_t line_start = (start == std::string::npos) ? 0 : start + 1;
        std::string line(text.substr(line_start, end - line_start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = line.find_first_not_of(" \t") == std::string::npos;
        if (!blank) {
            strip_idiom(line, "out of 5");
            strip_idiom(line, "/5");
            std::vector<std::string> numbers;
            for (std::size_t i = 0; i < line.size();) {
                if (std::isdigit(static_cast<unsigned char>(line[i])) ||
                    ((line[i] == '-' || line[i] == '+') && i + 1 < line.size() &&
                     std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
                    std::string token = read_number(line, i);
                    i += token.size();
                    numbers.push_back(std::move(token));
                } else {
                    ++i;
                }
            }
            if (numbers.size() == 1) findings.push_back({aspect, numbers[0]});
            return;
        }
        if (start == std::string::npos) return;
        end = start;
    }
}

// Canonical form ("04" == "4", "4." == "4") so agreement is on value.
std::string canonical_token(const std::string& token) {
    bool negative = false;
    std::size_t i = 0;
    if (i < token.size() && (token[i] == '-' || token[i] == '+')) {
        negative = token[i] == '-';
        ++i;
    }
    std::string digits;
    while (i < token.size() && token[i] != '.') digits.push_back(token[i++]);
    std::string frac;
    if (i < token.size() && token[i] == '.') {
        frac = token.substr(i + 1);
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
    }
    std::size_t nz = digits.find_first_not_of('0');
    digits = (nz == std::string::npos) ? "0" : digits.substr(nz);
    std::string out = negative && (digits != "0" || !frac.empty()) ? "-" : "";
    out += digits;
    if (!frac.empty()) out += "." + frac;
    return out;
}

}  // namespace

std::string_view parse_failure_name(ParseFailure f) {
    switch (f) {
        case ParseFailure::Missing: return "missing";
        case ParseFailure::OutOfRange: return "out_of_range";
        case ParseFailure::NonInteger: return "non_integer";
        case ParseFailure::Ambiguous: return "ambiguous";
    }
    return "";
}

std::optional<ParseFailure> ParseOutcome::failure_for(Aspect a) const {
    for (const auto& [aspect, failure] : failures) {
        if (aspect == a) return failure;
    }
    return std::nullopt;
}

ParseOutcome parse_scores(std::string_view text, std::optional<Aspect> aspect) {
    std::vector<Finding> findings;

    // Stage 1: labelled lines.
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t nl = text.find('\n', line_start);
        std::size_t line_end = (nl == std::string::npos) ? text.size() : nl;
        scan_labelled_line(text.substr(line_start, line_end - line_start), findings);
        if (nl == std::string::npos) break;
        line_start = nl + 1;
    }

    // Stage 2: embedded JSON objects, only when no labelled line matched.
    if (findings.empty()) scan_json_objects(text, findings);

    // Stage 3: lone number on the final line, single-aspect mode only.
    if (findings.empty() && aspect.has_value()) scan_final_line(text, *aspect, findings);

    std::vector<Aspect> requested;
    if (aspect.has_value()) {
        requested.push_back(*aspect);
    } else {
        requested.assign(kAllAspects.begin(), kAllAspects.end());
    }

    ParseOutcome outcome;
    for (Aspect a : requested) {
        std::set<std::string> tokens;
        for (const auto& f : findings) {
            if (f.aspect == a) tokens.insert(canonical_token(f.token));
        }
        if (tokens.empty()) {
            outcome.failures.emplace_back(a, ParseFailure::Missing);
            continue;
        }
        if (tokens.size() > 1) {
            outcome.failures.emplace_back(a, ParseFailure::Ambiguous);
            continue;
        }
        const std::string& token = *tokens.begin();
        if (token.find('.') != std::string::npos) {
            outcome.failures.emplace_back(a, ParseFailure::NonInteger);
            continue;
        }
        if (token.size() > 10) {  // longer than any plausible rating; avoid stol overflow
            outcome.failures.emplace_back(a, ParseFailure::OutOfRange);
            continue;
        }
        long value = std::stol(token);
        if (value < 1 || value > 5) {
            outcome.failures.emplace_back(a, ParseFailure::OutOfRange);
            continue;
        }
        outcome.scores.set(a, LikertScore(static_cast<int>(value)));
    }
    return outcome;
}

}  // namespace explaineval
