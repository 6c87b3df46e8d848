#pragma once
// Explanation records, datasets and their grouping indices.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "explaineval/errors.hpp"

namespace explaineval {

// Joins evaluator columns to records across files. Ids may not contain the
// separator character; load_dataset rejects offenders.
inline constexpr char kKeySeparator = '\x1f';

using RecordKey = std::string;

RecordKey make_record_key(const std::string& user_id, const std::string& item_id,
                          const std::string& generator_id);

// One generated explanation shown to one user for one item.
struct ExplanationRecord {
    std::string user_id;
    std::string item_id;
    std::string item_title;
    std::string generator_id;
    std::string explanation_text;
    std::optional<std::string> reference_text;  // the user's self-explanation

    RecordKey key() const { return make_record_key(user_id, item_id, generator_id); }
};

// An immutable collection of records with user and (user,item) group indices.
// Groups are stored sorted by key so downstream averaging has a fixed order.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<ExplanationRecord> records);

    const std::vector<ExplanationRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    const ExplanationRecord& record(std::size_t i) const { return records_[i]; }

    std::optional<std::size_t> index_of(const RecordKey& key) const;

    // Record indices grouped by user, sorted by user_id.
    const std::vector<std::pair<std::string, std::vector<std::size_t>>>& user_groups() const {
        return user_groups_;
    }
    // Record indices grouped by (user_id, item_id), sorted by that pair.
    const std::vector<std::pair<std::pair<std::string, std::string>, std::vector<std::size_t>>>&
    pair_groups() const {
        return pair_groups_;
    }

    // Items recommended to a user, in first-appearance order.
    std::vector<std::string> items_of_user(const std::string& user_id) const;

private:
    std::vector<ExplanationRecord> records_;
    std::unordered_map<RecordKey, std::size_t> by_key_;
    std::vector<std::pair<std::string, std::vector<std::size_t>>> user_groups_;
    std::vector<std::pair<std::pair<std::string, std::string>, std::vector<std::size_t>>>
        pair_groups_;
};

// Reads a JSON-lines dataset file. Text fields are NFC-normalized at ingest;
// malformed lines and duplicate (user,item,generator) keys raise DataError
// naming the offending line.
Dataset load_dataset(const std::filesystem::path& path);

// Writes a dataset back to JSON-lines in record order. load(save(d)) == d.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace explaineval
