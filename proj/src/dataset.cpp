#include "explaineval/dataset.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "explaineval/unicode.hpp"

namespace explaineval {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void line_error(const std::filesystem::path& path, std::size_t line_no,
                             const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

std::string require_string(const json& obj, const char* field, const std::filesystem::path& path,
                           std::size_t line_no) {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string()) {
        line_error(path, line_no, std::string("missing or non-string field '") + field + "'");
    }
    return it->get<std::string>();
}

void check_id(const std::string& id, const char* field, const std::filesystem::path& path,
              std::size_t line_no) {
    if (id.empty()) line_error(path, line_no, std::string("empty ") + field);
    if (id.find(kKeySeparator) != std::string::npos) {
        line_error(path, line_no, std::string(field) + " contains the reserved separator byte");
    }
}

}  // namespace

RecordKey make_record_key(const std::string& user_id, const std::string& item_id,
                          const std::string& generator_id) {
    RecordKey key;
    key.reserve(user_id.size() + item_id.size() + generator_id.size() + 2);
    key += user_id;
    key += kKeySeparator;
    key += item_id;
    key += kKeySeparator;
    key += generator_id;
    return key;
}

Dataset::Dataset(std::vector<ExplanationRecord> records) : records_(std::move(records)) {
    by_key_.reserve(records_.size());
    std::map<std::string, std::vector<std::size_t>> users;
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> pairs;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& r = records_[i];
        auto [it, inserted] = by_key_.emplace(r.key(), i);
        if (!inserted) {
            throw DataError("duplicate record key for user '" + r.user_id + "', item '" +
                            r.item_id + "', generator '" + r.generator_id + "'");
        }
        users[r.user_id].push_back(i);
        pairs[{r.user_id, r.item_id}].push_back(i);
    }
    user_groups_.assign(users.begin(), users.end());
    pair_groups_.assign(pairs.begin(), pairs.end());
}

std::optional<std::size_t> Dataset::index_of(const RecordKey& key) const {
    auto it = by_key_.find(key);
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> Dataset::items_of_user(const std::string& user_id) const {
    std::vector<std::string> items;
    std::set<std::string> seen;
    for (const auto& r : records_) {
        if (r.user_id != user_id) continue;
        if (seen.insert(r.item_id).second) items.push_back(r.item_id);
    }
    return items;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path.string());

    std::vector<ExplanationRecord> records;
    std::set<RecordKey> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            line_error(path, line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) line_error(path, line_no, "line is not a JSON object");

        ExplanationRecord r;
        r.user_id = nfc_normalize(require_string(obj, "user_id", path, line_no));
        r.item_id = nfc_normalize(require_string(obj, "item_id", path, line_no));
        r.item_title = nfc_normalize(require_string(obj, "item_title", path, line_no));
        r.generator_id = nfc_normalize(require_string(obj, "generator_id", path, line_no));
        r.explanation_text = nfc_normalize(require_string(obj, "explanation_text", path, line_no));
        check_id(r.user_id, "user_id", path, line_no);
        check_id(r.item_id, "item_id", path, line_no);
        check_id(r.generator_id, "generator_id", path, line_no);
        if (r.explanation_text.empty()) line_error(path, line_no, "empty explanation_text");

        if (auto it = obj.find("reference_text"); it != obj.end() && !it->is_null()) {
            if (!it->is_string()) line_error(path, line_no, "reference_text must be a string");
            r.reference_text = nfc_normalize(it->get<std::string>());
        }

        if (!seen.insert(r.key()).second) {
            line_error(path, line_no, "duplicate (user_id, item_id, generator_id) key");
        }
        records.push_back(std::move(r));
    }
    return Dataset(std::move(records));
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write dataset file: " + path.string());
    for (const auto& r : dataset.records()) {
        ordered_json obj;
        obj["user_id"] = r.user_id;
        obj["item_id"] = r.item_id;
        obj["item_title"] = r.item_title;
        obj["generator_id"] = r.generator_id;
        obj["explanation_text"] = r.explanation_text;
        if (r.reference_text) obj["reference_text"] = *r.reference_text;
        out << obj.dump() << '\n';
    }
}

}  // namespace explaineval
