#pragma once
// Correlation coefficients and the 3-level meta-evaluation.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "explaineval/dataset.hpp"
#include "explaineval/scores.hpp"
#include "explaineval/table.hpp"

namespace explaineval {

enum class CorrelationKind { Pearson, Spearman, KendallTauB };

std::string_view correlation_name(CorrelationKind k);
std::optional<CorrelationKind> correlation_from_name(std::string_view name);

// Sample Pearson product-moment coefficient. Throws DegenerateSeriesError on
// constant input or length < 2.
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson on average-ranked data (ties get the mean of their positions).
double spearman(std::span<const double> x, std::span<const double> y);

// Tau-b with tie corrections; Likert data is tie-heavy so the uncorrected
// variants are not offered.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

double correlate(CorrelationKind k, std::span<const double> x, std::span<const double> y);

// Non-throwing variant used for per-group computation: nullopt on a
// degenerate (constant or too-short) series.
std::optional<double> try_correlate(CorrelationKind k, std::span<const double> x,
                                    std::span<const double> y);

enum class MetaLevel { Dataset, User, Pair };

std::string_view level_name(MetaLevel level);
std::optional<MetaLevel> level_from_name(std::string_view name);

struct GroupDiagnostics {
    std::size_t groups_total = 0;
    std::size_t groups_used = 0;
    std::size_t skipped_degenerate = 0;  // constant ground truth or prediction
    std::size_t skipped_small = 0;       // fewer than 2 records
};

struct MetaEvalResult {
    double value = 0.0;  // in [-1,1]
    GroupDiagnostics diagnostics;
};

// gt and pred are aligned to dataset record order and already imputed
// (ground truth nulls -> 3, prediction nulls -> 0). Dataset level correlates
// all records; user/pair levels average per-group coefficients over
// non-degenerate groups with >= 2 records, unweighted. Zero usable groups
// raises UndefinedResultError: the result is undefined, never silently 0.
MetaEvalResult meta_eval(std::span<const double> gt, std::span<const double> pred,
                         const Dataset& dataset, MetaLevel level, CorrelationKind coeff);

// One (evaluator, aspect, level) cell. `value` is absent when the level was
// undefined for this evaluator; `error` then carries the reason.
struct ReportCell {
    std::optional<double> value;
    GroupDiagnostics diagnostics;
    std::string error;
};

struct EvaluatorReportRow {
    std::string evaluator_id;
    // [aspect][level] indexed per kAllAspects x kAllLevels.
    std::array<std::array<ReportCell, 3>, kAspectCount> cells;
    // Arithmetic mean of the four per-aspect values at each level; absent if
    // any aspect cell is undefined at that level.
    std::array<ReportCell, 3> average;
};

inline constexpr std::array<MetaLevel, 3> kAllLevels = {MetaLevel::Dataset, MetaLevel::User,
                                                        MetaLevel::Pair};

struct MetaEvalReport {
    CorrelationKind coeff = CorrelationKind::Pearson;
    std::vector<EvaluatorReportRow> rows;  // every evaluator except ground truth
};

// All (evaluator, aspect, level) cells against the designated ground truth.
// Degenerate diagnostics propagate per cell without aborting other cells.
MetaEvalReport full_report(const EvaluationTable& table, CorrelationKind coeff);

}  // namespace explaineval
