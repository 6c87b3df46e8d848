#pragma once
// The evaluation table: per-evaluator score columns aligned to a dataset.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "explaineval/dataset.hpp"
#include "explaineval/scores.hpp"

namespace explaineval {

// A column of per-record aspect scores aligned to dataset record order.
// A record an evaluator never scored holds all-null AspectValues.
struct ScoreColumn {
    std::vector<AspectValues> cells;

    static ScoreColumn empty(std::size_t n_records) {
        ScoreColumn c;
        c.cells.assign(n_records, AspectValues{});
        return c;
    }
};

struct ImportStats {
    std::size_t rows_read = 0;
    std::size_t records_matched = 0;
    std::size_t records_uncovered = 0;  // dataset records the file never scored
};

// Scores indexed by (record, evaluator, aspect). One evaluator id is
// designated ground truth. Raw cells are never mutated by imputation;
// imputed copies are produced at meta-evaluation time.
class EvaluationTable {
public:
    explicit EvaluationTable(const Dataset& dataset) : dataset_(&dataset) {}

    const Dataset& dataset() const { return *dataset_; }

    void add_column(const std::string& evaluator_id, ScoreColumn column);
    bool has_column(const std::string& evaluator_id) const;
    const ScoreColumn& column(const std::string& evaluator_id) const;

    // Ids in insertion order.
    const std::vector<std::string>& evaluator_ids() const { return order_; }

    void designate_ground_truth(const std::string& evaluator_id);
    const std::string& ground_truth_id() const;
    bool has_ground_truth() const { return !ground_truth_.empty(); }

    // Ground-truth numbers for one aspect, nulls imputed to 3.
    std::vector<double> ground_truth_numeric(Aspect a) const;
    // Evaluator numbers for one aspect, nulls imputed to 0.
    std::vector<double> evaluator_numeric(const std::string& evaluator_id, Aspect a) const;

private:
    const Dataset* dataset_;
    std::vector<std::string> order_;
    std::vector<ScoreColumn> columns_;
    std::string ground_truth_;
};

// Reads a JSON-lines annotation file (integer-or-null scores keyed by aspect
// name) into a column for `evaluator_id`. Every line must carry that
// evaluator_id and refer to an existing record; unknown keys raise DataError
// listing the offenders. Records the file does not cover stay null.
ScoreColumn import_annotations(const std::filesystem::path& path, const std::string& evaluator_id,
                               const Dataset& dataset, ImportStats* stats = nullptr);

// Same schema with the value domain relaxed to arbitrary finite numbers;
// used for evaluator outputs such as reference metrics and ensembles.
ScoreColumn import_scores(const std::filesystem::path& path, const std::string& evaluator_id,
                          const Dataset& dataset, ImportStats* stats = nullptr);

// Writes a column in the scores schema, one line per covered record, in
// dataset record order. Likert-valued columns round-trip through
// import_annotations; real-valued ones through import_scores.
void write_scores(const std::filesystem::path& path, const std::string& evaluator_id,
                  const Dataset& dataset, const ScoreColumn& column);

}  // namespace explaineval
