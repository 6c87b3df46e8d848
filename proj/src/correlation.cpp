#include "explaineval/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace explaineval {

namespace {

void check_lengths(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DataError("series length mismatch: " + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()));
    }
    if (x.size() < 2) throw DegenerateSeriesError("series shorter than 2");
}

// Average (fractional) ranks, 1-based; ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

// Σ t(t-1)/2 over tie groups, the tau-b tie correction term.
double tie_term(std::span<const double> v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        total += t * (t - 1.0) / 2.0;
        i = j + 1;
    }
    return total;
}

}  // namespace

std::string_view correlation_name(CorrelationKind k) {
    switch (k) {
        case CorrelationKind::Pearson: return "pearson";
        case CorrelationKind::Spearman: return "spearman";
        case CorrelationKind::KendallTauB: return "kendall";
    }
    return "";
}

std::optional<CorrelationKind> correlation_from_name(std::string_view name) {
    if (name == "pearson") return CorrelationKind::Pearson;
    if (name == "spearman") return CorrelationKind::Spearman;
    if (name == "kendall" || name == "kendall-tau-b") return CorrelationKind::KendallTauB;
    return std::nullopt;
}

std::string_view level_name(MetaLevel level) {
    switch (level) {
        case MetaLevel::Dataset: return "dataset";
        case MetaLevel::User: return "user";
        case MetaLevel::Pair: return "pair";
    }
    return "";
}

std::optional<MetaLevel> level_from_name(std::string_view name) {
    if (name == "dataset") return MetaLevel::Dataset;
    if (name == "user") return MetaLevel::User;
    if (name == "pair") return MetaLevel::Pair;
    return std::nullopt;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y);
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateSeriesError("constant series");
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y);
    std::vector<double> rx = average_ranks(x);
    std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    check_lengths(x, y);
    const std::size_t n = x.size();
    long long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dx = x[i] - x[j];
            double dy = y[i] - y[j];
            double prod = dx * dy;
            if (prod > 0.0) {
                ++concordant;
            } else if (prod < 0.0) {
                ++discordant;
            }
            // Ties in either series contribute to neither count.
        }
    }
    double n0 = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    double n1 = tie_term(x);
    double n2 = tie_term(y);
    if (n0 == n1 || n0 == n2) throw DegenerateSeriesError("constant series");
    double tau = (static_cast<double>(concordant) - static_cast<double>(discordant)) /
                 std::sqrt((n0 - n1) * (n0 - n2));
    return std::clamp(tau, -1.0, 1.0);
}

double correlate(CorrelationKind k, std::span<const double> x, std::span<const double> y) {
    switch (k) {
        case CorrelationKind::Pearson: return pearson(x, y);
        case CorrelationKind::Spearman: return spearman(x, y);
        case CorrelationKind::KendallTauB: return kendall_tau_b(x, y);
    }
    throw ConfigError("unknown correlation kind");
}

std::optional<double> try_correlate(CorrelationKind k, std::span<const double> x,
                                    std::span<const double> y) {
    try {
        return correlate(k, x, y);
    } catch (const DegenerateSeriesError&) {
        return std::nullopt;
    }
}

MetaEvalResult meta_eval(std::span<const double> gt, std::span<const double> pred,
                         const Dataset& dataset, MetaLevel level, CorrelationKind coeff) {
    if (gt.size() != dataset.size() || pred.size() != dataset.size()) {
        throw DataError("meta_eval inputs must align with dataset record order");
    }
    MetaEvalResult result;

    if (level == MetaLevel::Dataset) {
        result.diagnostics.groups_total = 1;
        auto value = try_correlate(coeff, gt, pred);
        if (!value) {
            ++result.diagnostics.skipped_degenerate;
            throw UndefinedResultError("dataset-level correlation undefined: constant series");
        }
        result.diagnostics.groups_used = 1;
        result.value = *value;
        return result;
    }

    // Per-group coefficients averaged unweighted; the group lists are sorted
    // by key so the summation order is fixed.
    double sum = 0.0;
    auto accumulate_group = [&](const std::vector<std::size_t>& members) {
        ++result.diagnostics.groups_total;
        if (members.size() < 2) {
            ++result.diagnostics.skipped_small;
            return;
        }
        std::vector<double> gx, gy;
        gx.reserve(members.size());
        gy.reserve(members.size());
        for (std::size_t idx : members) {
            gx.push_back(gt[idx]);
            gy.push_back(pred[idx]);
        }
        auto value = try_correlate(coeff, gx, gy);
        if (!value) {
            ++result.diagnostics.skipped_degenerate;
            return;
        }
        ++result.diagnostics.groups_used;
        sum += *value;
    };

    if (level == MetaLevel::User) {
        for (const auto& [user, members] : dataset.user_groups()) accumulate_group(members);
    } else {
        for (const auto& [pair, members] : dataset.pair_groups()) accumulate_group(members);
    }

    if (result.diagnostics.groups_used == 0) {
        throw UndefinedResultError(std::string(level_name(level)) +
                                   "-level correlation undefined: no usable groups");
    }
    result.value = sum / static_cast<double>(result.diagnostics.groups_used);
    return result;
}

MetaEvalReport full_report(const EvaluationTable& table, CorrelationKind coeff) {
    MetaEvalReport report;
    report.coeff = coeff;
    const std::string& gt_id = table.ground_truth_id();

    for (const auto& id : table.evaluator_ids()) {
        if (id == gt_id) continue;
        EvaluatorReportRow row;
        row.evaluator_id = id;
        for (Aspect a : kAllAspects) {
            std::vector<double> gt = table.ground_truth_numeric(a);
            std::vector<double> pred = table.evaluator_numeric(id, a);
            for (std::size_t li = 0; li < kAllLevels.size(); ++li) {
                ReportCell& cell = row.cells[static_cast<std::size_t>(a)][li];
                try {
                    MetaEvalResult r = meta_eval(gt, pred, table.dataset(), kAllLevels[li], coeff);
                    cell.value = r.value;
                    cell.diagnostics = r.diagnostics;
                } catch (const UndefinedResultError& e) {
                    cell.error = e.what();
                } catch (const DegenerateSeriesError& e) {
                    cell.error = e.what();
                }
            }
        }
        for (std::size_t li = 0; li < kAllLevels.size(); ++li) {
            ReportCell& avg = row.average[li];
            double sum = 0.0;
            bool all_defined = true;
            for (std::size_t ai = 0; ai < kAspectCount; ++ai) {
                const ReportCell& cell = row.cells[ai][li];
                if (!cell.value) {
                    all_defined = false;
                    break;
                }
                sum += *cell.value;
            }
            if (all_defined) {
                avg.value = sum / static_cast<double>(kAspectCount);
            } else {
                avg.error = "undefined for at least one aspect";
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace explaineval
