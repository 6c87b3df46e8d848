#include "explaineval/table.hpp"

#include <cmath>
#include <fstream>
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

// Shared JSONL reader for annotation/score files; `likert` selects the strict
// integer-or-null domain, otherwise any finite number is accepted.
ScoreColumn import_column(const std::filesystem::path& path, const std::string& evaluator_id,
                          const Dataset& dataset, bool likert, ImportStats* stats) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open annotation file: " + path.string());

    ScoreColumn column = ScoreColumn::empty(dataset.size());
    std::vector<bool> covered(dataset.size(), false);
    std::vector<std::string> unknown;
    std::string line;
    std::size_t line_no = 0;
    std::size_t rows = 0;
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
        ++rows;

        auto get_str = [&](const char* field) -> std::string {
            auto it = obj.find(field);
            if (it == obj.end() || !it->is_string()) {
                line_error(path, line_no,
                           std::string("missing or non-string field '") + field + "'");
            }
            return nfc_normalize(it->get<std::string>());
        };
        std::string user_id = get_str("user_id");
        std::string item_id = get_str("item_id");
        std::string generator_id = get_str("generator_id");
        std::string row_evaluator = get_str("evaluator_id");
        if (row_evaluator != evaluator_id) {
            line_error(path, line_no, "evaluator_id '" + row_evaluator +
                                          "' does not match requested '" + evaluator_id + "'");
        }

        RecordKey key = make_record_key(user_id, item_id, generator_id);
        auto idx = dataset.index_of(key);
        if (!idx) {
            unknown.push_back("(" + user_id + ", " + item_id + ", " + generator_id + ") at line " +
                              std::to_string(line_no));
            continue;
        }
        if (covered[*idx]) {
            line_error(path, line_no, "duplicate scores for (" + user_id + ", " + item_id + ", " +
                                          generator_id + ")");
        }
        covered[*idx] = true;

        auto scores_it = obj.find("scores");
        if (scores_it == obj.end() || !scores_it->is_object()) {
            line_error(path, line_no, "missing or non-object field 'scores'");
        }
        AspectValues values{};
        for (auto it = scores_it->begin(); it != scores_it->end(); ++it) {
            auto aspect = aspect_from_name(it.key());
            if (!aspect) line_error(path, line_no, "unknown aspect '" + it.key() + "'");
            std::size_t ai = static_cast<std::size_t>(*aspect);
            if (values[ai].has_value()) {
                line_error(path, line_no, "aspect '" + it.key() + "' scored twice");
            }
            const json& v = it.value();
            if (v.is_null()) continue;
            if (likert) {
                if (!v.is_number_integer()) {
                    line_error(path, line_no, "aspect '" + it.key() + "' must be integer or null");
                }
                int n = v.get<int>();
                if (n < 1 || n > 5) {
                    line_error(path, line_no, "aspect '" + it.key() + "' out of range [1,5]: " +
                                                  std::to_string(n));
                }
                values[ai] = static_cast<double>(n);
            } else {
                if (!v.is_number()) {
                    line_error(path, line_no, "aspect '" + it.key() + "' must be a number or null");
                }
                double d = v.get<double>();
                if (!std::isfinite(d)) {
                    line_error(path, line_no, "aspect '" + it.key() + "' is not finite");
                }
                values[ai] = d;
            }
        }
        column.cells[*idx] = values;
    }

    if (!unknown.empty()) {
        std::ostringstream msg;
        msg << path.string() << ": " << unknown.size()
            << " row(s) refer to records absent from the dataset:";
        for (const auto& k : unknown) msg << "\n  " << k;
        throw DataError(msg.str());
    }

    if (stats) {
        stats->rows_read = rows;
        std::size_t matched = 0;
        for (bool c : covered)
            if (c) ++matched;
        stats->records_matched = matched;
        stats->records_uncovered = dataset.size() - matched;
    }
    return column;
}

}  // namespace

void EvaluationTable::add_column(const std::string& evaluator_id, ScoreColumn column) {
    if (evaluator_id.empty()) throw DataError("evaluator id must not be empty");
    if (has_column(evaluator_id)) {
        throw DataError("duplicate evaluator id: " + evaluator_id);
    }
    if (column.cells.size() != dataset_->size()) {
        throw DataError("column size " + std::to_string(column.cells.size()) +
                        " does not match dataset size " + std::to_string(dataset_->size()));
    }
    order_.push_back(evaluator_id);
    columns_.push_back(std::move(column));
}

bool EvaluationTable::has_column(const std::string& evaluator_id) const {
    for (const auto& id : order_)
        if (id == evaluator_id) return true;
    return false;
}

const ScoreColumn& EvaluationTable::column(const std::string& evaluator_id) const {
    for (std::size_t i = 0; i < order_.size(); ++i) {
        if (order_[i] == evaluator_id) return columns_[i];
    }
    throw DataError("no such evaluator column: " + evaluator_id);
}

void EvaluationTable::designate_ground_truth(const std::string& evaluator_id) {
    if (!has_column(evaluator_id)) {
        throw DataError("ground truth column not present: " + evaluator_id);
    }
    ground_truth_ = evaluator_id;
}

const std::string& EvaluationTable::ground_truth_id() const {
    if (ground_truth_.empty()) throw DataError("no ground truth designated");
    return ground_truth_;
}

std::vector<double> EvaluationTable::ground_truth_numeric(Aspect a) const {
    const ScoreColumn& col = column(ground_truth_id());
    std::vector<double> out;
    out.reserve(col.cells.size());
    std::size_t ai = static_cast<std::size_t>(a);
    for (const auto& cell : col.cells) {
        out.push_back(cell[ai].has_value() ? *cell[ai] : 3.0);
    }
    return out;
}

std::vector<double> EvaluationTable::evaluator_numeric(const std::string& evaluator_id,
                                                       Aspect a) const {
    const ScoreColumn& col = column(evaluator_id);
    std::vector<double> out;
    out.reserve(col.cells.size());
    std::size_t ai = static_cast<std::size_t>(a);
    for (const auto& cell : col.cells) {
        out.push_back(cell[ai].has_value() ? *cell[ai] : 0.0);
    }
    return out;
}

ScoreColumn import_annotations(const std::filesystem::path& path, const std::string& evaluator_id,
                               const Dataset& dataset, ImportStats* stats) {
    return import_column(path, evaluator_id, dataset, /*likert=*/true, stats);
}

ScoreColumn import_scores(const std::filesystem::path& path, const std::string& evaluator_id,
                          const Dataset& dataset, ImportStats* stats) {
    return import_column(path, evaluator_id, dataset, /*likert=*/false, stats);
}

void write_scores(const std::filesystem::path& path, const std::string& evaluator_id,
                  const Dataset& dataset, const ScoreColumn& column) {
    if (column.cells.size() != dataset.size()) {
        throw DataError("column size does not match dataset size");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write scores file: " + path.string());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const AspectValues& cell = column.cells[i];
        bool any = false;
        for (const auto& v : cell)
            if (v.has_value()) any = true;
        if (!any) continue;
        const auto& r = dataset.record(i);
        ordered_json obj;
        obj["user_id"] = r.user_id;
        obj["item_id"] = r.item_id;
        obj["generator_id"] = r.generator_id;
        obj["evaluator_id"] = evaluator_id;
        ordered_json scores;
        for (Aspect a : kAllAspects) {
            const auto& v = cell[static_cast<std::size_t>(a)];
            std::string name(aspect_name(a));
            if (!v.has_value()) {
                scores[name] = nullptr;
            } else if (*v == std::floor(*v) && *v >= -1e15 && *v <= 1e15) {
                scores[name] = static_cast<std::int64_t>(*v);
            } else {
                scores[name] = *v;
            }
        }
        obj["scores"] = scores;
        out << obj.dump() << '\n';
    }
}

}  // namespace explaineval
