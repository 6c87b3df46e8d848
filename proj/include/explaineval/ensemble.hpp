#pragma once
// Evaluator ensembles: member averaging and subset-quality distributions.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "explaineval/correlation.hpp"
#include "explaineval/table.hpp"

namespace explaineval {

struct EnsembleSpec {
    std::vector<std::string> members;  // evaluator ids present in the table
};

// Per record and aspect: impute each member (null -> 0), then take the
// unweighted mean. The result column is real-valued and fully defined, and
// is invariant under member reordering.
ScoreColumn ensemble_scores(const EvaluationTable& table, const EnsembleSpec& spec);

// One evaluated subset: its meta-eval coefficient per aspect plus the
// four-aspect average.
struct SubsetPoint {
    std::vector<std::string> members;                 // sorted member ids
    std::array<double, kAspectCount> per_aspect{};    // indexed per kAllAspects
    double average = 0.0;
};

struct SubsetStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct SubsetDistribution {
    int subset_size = 0;
    MetaLevel level = MetaLevel::Dataset;
    CorrelationKind coeff = CorrelationKind::Pearson;
    std::vector<SubsetPoint> points;  // one per subset, lexicographic in pool order
    // Stats per aspect; the final entry summarizes the four-aspect average.
    std::array<SubsetStats, kAspectCount + 1> stats{};
};

struct SubsetOptions {
    MetaLevel level = MetaLevel::Dataset;
    CorrelationKind coeff = CorrelationKind::Pearson;
    std::size_t max_subsets = 10000;  // C(|pool|, size) above this is an error
};

// Evaluates every subset_size-member subset of `pool`: build the subset
// ensemble, meta-evaluate it against ground truth at every aspect, collect
// the distribution. Exceeding max_subsets raises ConfigError.
SubsetDistribution subset_distribution(const EvaluationTable& table,
                                       const std::vector<std::string>& pool, int subset_size,
                                       const SubsetOptions& options);

}  // namespace explaineval
