#pragma once
// End-to-end run orchestration: config, manifest, report emission.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "explaineval/correlation.hpp"
#include "explaineval/dataset.hpp"
#include "explaineval/evaluator.hpp"
#include "explaineval/prompt.hpp"
#include "explaineval/synthetic.hpp"
#include "explaineval/table.hpp"
#include "explaineval/text_metrics.hpp"

namespace explaineval {

// One evaluator requested by a run. `kind` selects the source:
//   "model":       live or cached LLM scoring via `endpoint`
//   "metric":      reference metric over the dataset (`metric_id`)
//   "stub":        deterministic stub (`stub_kind`: "random", "constant";
//                  with a synthetic dataset also "oracle", "quality",
//                  "user_shifted", "noisy")
//   "annotations": Likert annotation file at `path`
//   "scores":      real-valued score file at `path`
//   "ensemble":    mean of `members`, which must precede it in the list
struct EvaluatorSpec {
    std::string id;
    std::string kind;
    ModelEndpoint endpoint;
    std::string metric_id;
    std::string stub_kind = "random";
    int stub_value = 3;      // constant stub output
    double stub_sd = 0.0;    // user_shifted / noisy spread
    std::uint64_t stub_seed = 0;
    std::string path;
    std::vector<std::string> members;
};

struct RunConfig {
    std::string dataset_path;  // exactly one of dataset_path / synthetic
    std::optional<SyntheticConfig> synthetic;
    std::string ground_truth_path;  // annotation JSONL; empty with synthetic
    std::string ground_truth_id = "ground_truth";
    std::vector<EvaluatorSpec> evaluators;
    PromptConfig prompt;
    MetricConfig metrics;
    std::vector<CorrelationKind> coeffs = {CorrelationKind::Pearson, CorrelationKind::Spearman,
                                           CorrelationKind::KendallTauB};
    std::string out_dir = "out";
    std::string cache_dir;
    bool offline = false;
    int concurrency = 4;
    std::uint64_t seed = 0;
};

RunConfig load_run_config(const std::string& path);

// Same parse/validate pass on in-memory JSON text; load_run_config is this
// applied to the file's bytes.
RunConfig parse_run_config(const std::string& json_text);

// Canonical JSON for a resolved config; the manifest embeds it and the digest
// covers it, so it uses sorted keys and fixed-form numbers throughout.
std::string run_config_to_json(const RunConfig& config);

// Everything that determined a run's outputs, written next to them. The
// digest covers the manifest with its own field and the wall-clock fields
// blanked, so identical inputs give identical digests across reruns.
struct RunManifest {
    std::string tool_version;
    std::string template_version;
    std::string config_json;      // canonical resolved config
    std::string dataset_digest;   // sha256 of the dataset file bytes
    std::map<std::string, UsageTotals> usage;    // per model evaluator
    std::map<std::string, std::string> errors;   // evaluators that failed wholesale
    std::string started_at;       // excluded from digest
    std::string finished_at;      // excluded from digest
    std::string digest;           // sha256 of the canonical manifest
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& json_text);
std::string manifest_digest(const RunManifest& manifest);

struct RunResult {
    Dataset dataset;
    EvaluationTable table;
    std::vector<MetaEvalReport> reports;  // one per requested coeff, config order
    RunManifest manifest;

    RunResult(Dataset d) : dataset(std::move(d)), table(dataset) {}
};

// Everything an evaluator spec needs to produce its column outside a full
// run. `corpus` enables the synthetic-only stubs, `examples` is required by
// one-shot prompt modes, and model usage is reported through `usage`.
struct ScoreContext {
    const SyntheticCorpus* corpus = nullptr;
    const ExampleSelector* examples = nullptr;
    const ResponseCache* cache = nullptr;
    PromptConfig prompt;
    MetricConfig metrics;
    int concurrency = 4;
    bool offline = false;
};

// Scores one evaluator spec against the dataset. ConfigError propagates —
// configuration bugs abort a run — while transport or data failures also
// propagate so the caller can record them as wholesale evaluator failures.
ScoreColumn score_evaluator(const EvaluatorSpec& spec, const Dataset& dataset,
                            const EvaluationTable& table, const ScoreContext& context,
                            UsageTotals* usage = nullptr);

// Executes a run: load or synthesize the dataset, score every evaluator,
// meta-evaluate against ground truth, and write report.csv / report.md /
// manifest.json (plus per-evaluator score files) under out_dir. A model
// evaluator failing wholesale leaves an all-null column and a manifest error
// entry; the rest of the report still completes. Rerunning offline with a
// warm cache yields byte-identical CSV and manifest-digest bytes.
RunResult run(const RunConfig& config);

// Report emission, exposed for tests. The CSV starts with a
// "# manifest_digest=<hex>" comment line; all numbers are fixed-format so
// the bytes never depend on locale or platform.
std::string report_to_csv(const MetaEvalReport& report, const std::string& manifest_digest_hex);
std::string report_to_markdown(const MetaEvalReport& report);

// Percent with two decimals, the display convention for coefficients.
std::string format_percent(double value);

// Current wall clock as "YYYY-MM-DDTHH:MM:SSZ"; manifests store timestamps
// in this form (and exclude them from the digest).
std::string iso_utc_now();

// Maps an evaluator id to the filename-safe stem its score file is stored
// under ([A-Za-z0-9._-]; everything else becomes '_').
std::string sanitize_filename(const std::string& id);

// Checks out_dir/report.csv against out_dir/manifest.json: the embedded
// digest must equal the manifest's stored and recomputed digests. Returns
// false (with a reason in *message) on any mismatch.
bool verify_report_dir(const std::string& out_dir, std::string* message = nullptr);

}  // namespace explaineval
