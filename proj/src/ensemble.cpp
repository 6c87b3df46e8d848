#include "explaineval/ensemble.hpp"

#include <algorithm>
#include <limits>

namespace explaineval {

ScoreColumn ensemble_scores(const EvaluationTable& table, const EnsembleSpec& spec) {
    if (spec.members.empty()) throw ConfigError("ensemble needs at least one member");
    std::vector<const ScoreColumn*> columns;
    columns.reserve(spec.members.size());
    for (const auto& id : spec.members) columns.push_back(&table.column(id));

    const std::size_t n = table.dataset().size();
    ScoreColumn out = ScoreColumn::empty(n);
    const double k = static_cast<double>(spec.members.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < kAspectCount; ++a) {
            double sum = 0.0;
            for (const ScoreColumn* col : columns) {
                const auto& v = col->cells[i][a];
                sum += v.has_value() ? *v : 0.0;  // evaluator imputation
            }
            out.cells[i][a] = sum / k;
        }
    }
    return out;
}

namespace {

// C(n, k) with saturation at `cap + 1` so huge pools cannot overflow.
std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        // result *= (n - k + i) / i, with overflow saturation.
        std::size_t numerator = n - k + i;
        if (result > (cap + 1) / numerator * i) return cap + 1;
        result = result * numerator / i;
        if (result > cap) return cap + 1;
    }
    return result;
}

}  // namespace

SubsetDistribution subset_distribution(const EvaluationTable& table,
                                       const std::vector<std::string>& pool, int subset_size,
                                       const SubsetOptions& options) {
    if (pool.empty()) throw ConfigError("subset pool must not be empty");
    if (subset_size < 1 || static_cast<std::size_t>(subset_size) > pool.size()) {
        throw ConfigError("subset size must be in [1, pool size]");
    }
    for (const auto& id : pool) table.column(id);  // validate members up front

    const std::size_t n = pool.size();
    const std::size_t k = static_cast<std::size_t>(subset_size);
    std::size_t count = binomial_capped(n, k, options.max_subsets);
    if (count > options.max_subsets) {
        throw ConfigError("subset count exceeds cap of " + std::to_string(options.max_subsets));
    }

    SubsetDistribution dist;
    dist.subset_size = subset_size;
    dist.level = options.level;
    dist.coeff = options.coeff;

    // Ground truth per aspect, shared by every subset evaluation.
    std::array<std::vector<double>, kAspectCount> gt;
    for (Aspect a : kAllAspects) gt[static_cast<std::size_t>(a)] = table.ground_truth_numeric(a);

    // Lexicographic combination walk over pool indices.
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        EnsembleSpec spec;
        for (std::size_t i : idx) spec.members.push_back(pool[i]);
        ScoreColumn column = ensemble_scores(table, spec);

        SubsetPoint point;
        point.members = spec.members;
        std::sort(point.members.begin(), point.members.end());
        double sum = 0.0;
        for (Aspect a : kAllAspects) {
            std::size_t ai = static_cast<std::size_t>(a);
            std::vector<double> pred;
            pred.reserve(column.cells.size());
            for (const auto& cell : column.cells) pred.push_back(*cell[ai]);
            MetaEvalResult r = meta_eval(gt[ai], pred, table.dataset(), options.level,
                                         options.coeff);
            point.per_aspect[ai] = r.value;
            sum += r.value;
        }
        point.average = sum / static_cast<double>(kAspectCount);
        dist.points.push_back(std::move(point));

        // Advance the combination.
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }

    for (std::size_t s = 0; s <= kAspectCount; ++s) {
        SubsetStats& st = dist.stats[s];
        st.min = std::numeric_limits<double>::infinity();
        st.max = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (const SubsetPoint& p : dist.points) {
            double v = s < kAspectCount ? p.per_aspect[s] : p.average;
            st.min = std::min(st.min, v);
            st.max = std::max(st.max, v);
            sum += v;
        }
        st.mean = sum / static_cast<double>(dist.points.size());
    }
    return dist;
}

}  // namespace explaineval
