// Python bindings for the explanation-evaluation core. The module mirrors
// the main operations: tokenization and reference metrics, correlation
// coefficients, the 3-level meta-evaluation, reply parsing, prompt assembly,
// synthetic data generation, and full config-driven runs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "explaineval/correlation.hpp"
#include "explaineval/digest.hpp"
#include "explaineval/parser.hpp"
#include "explaineval/prompt.hpp"
#include "explaineval/runner.hpp"
#include "explaineval/synthetic.hpp"
#include "explaineval/text_metrics.hpp"
#include "explaineval/unicode.hpp"
#include "explaineval/version.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace explaineval;

namespace {

TokenizerMode tokenizer_from(const std::string& name) {
    if (name == "cjk_char") return TokenizerMode::CjkChar;
    if (name == "whitespace") return TokenizerMode::Whitespace;
    throw std::invalid_argument("unknown tokenizer: " + name);
}

BleuSmoothing smoothing_from(const std::string& name) {
    if (name == "none") return BleuSmoothing::None;
    if (name == "add_epsilon") return BleuSmoothing::AddEpsilon;
    throw std::invalid_argument("unknown smoothing: " + name);
}

CorrelationKind coeff_from(const std::string& name) {
    if (auto k = correlation_from_name(name)) return *k;
    throw std::invalid_argument("unknown coefficient: " + name);
}

MetaLevel level_from(const std::string& name) {
    if (auto l = level_from_name(name)) return *l;
    throw std::invalid_argument("unknown level: " + name);
}

Aspect aspect_from(const std::string& name) {
    if (auto a = aspect_from_name(name)) return *a;
    throw std::invalid_argument("unknown aspect: " + name);
}

TokenSequence tokens_of(const std::string& text, TokenizerMode mode) {
    return tokenize(nfc_normalize(text), mode);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "native core of the explanation-evaluation pipeline";
    m.attr("__version__") = std::string(kVersion);

    m.def(
        "aspects",
        [] {
            std::vector<std::string> names;
            for (Aspect a : kAllAspects) names.emplace_back(aspect_name(a));
            return names;
        },
        "Canonical aspect names in index order");

    m.def(
        "tokenize",
        [](const std::string& text, const std::string& tokenizer) {
            return tokens_of(text, tokenizer_from(tokenizer)).tokens;
        },
        "Tokenize text (NFC-normalized first)", py::arg("text"),
        py::arg("tokenizer") = "cjk_char");

    m.def(
        "bleu",
        [](const std::string& candidate, const std::string& reference, std::size_t n,
           const std::string& smoothing, const std::string& tokenizer) {
            TokenizerMode mode = tokenizer_from(tokenizer);
            return bleu_n(tokens_of(candidate, mode), tokens_of(reference, mode), n,
                          smoothing_from(smoothing))
                .value;
        },
        "BLEU-n of a candidate against a reference", py::arg("candidate"), py::arg("reference"),
        py::arg("n") = 4, py::arg("smoothing") = "none", py::arg("tokenizer") = "cjk_char");

    m.def(
        "rouge_n",
        [](const std::string& candidate, const std::string& reference, std::size_t n,
           const std::string& tokenizer) {
            TokenizerMode mode = tokenizer_from(tokenizer);
            return rouge_n_f(tokens_of(candidate, mode), tokens_of(reference, mode), n).value;
        },
        "ROUGE-n F1 of a candidate against a reference", py::arg("candidate"),
        py::arg("reference"), py::arg("n") = 1, py::arg("tokenizer") = "cjk_char");

    m.def(
        "rouge_l",
        [](const std::string& candidate, const std::string& reference,
           const std::string& tokenizer) {
            TokenizerMode mode = tokenizer_from(tokenizer);
            return rouge_l_f(tokens_of(candidate, mode), tokens_of(reference, mode)).value;
        },
        "ROUGE-L F1 of a candidate against a reference", py::arg("candidate"),
        py::arg("reference"), py::arg("tokenizer") = "cjk_char");

    m.def(
        "pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); },
        "Sample Pearson correlation", py::arg("x"), py::arg("y"));
    m.def(
        "spearman",
        [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); },
        "Spearman rank correlation (average ranks on ties)", py::arg("x"), py::arg("y"));
    m.def(
        "kendall_tau_b",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            return kendall_tau_b(x, y);
        },
        "Kendall tau-b with tie corrections", py::arg("x"), py::arg("y"));

    m.def(
        "parse_scores",
        [](const std::string& text, const std::optional<std::string>& aspect) {
            std::optional<Aspect> requested;
            if (aspect) requested = aspect_from(*aspect);
            ParseOutcome outcome = parse_scores(text, requested);
            py::dict scores;
            for (Aspect a : kAllAspects) {
                if (requested && *requested != a) continue;
                const LikertScore& s = outcome.scores.at(a);
                py::str key{std::string(aspect_name(a))};
                if (s.has_value()) {
                    scores[key] = s.value();
                } else {
                    scores[key] = py::none();
                }
            }
            py::list failures;
            for (const auto& [a, f] : outcome.failures) {
                failures.append(py::make_tuple(std::string(aspect_name(a)),
                                               std::string(parse_failure_name(f))));
            }
            return py::make_tuple(scores, failures);
        },
        "Parse aspect ratings from reply text; returns (scores, failures). Scores map "
        "aspect name to int or None; failures are (aspect, reason) pairs.",
        py::arg("text"), py::arg("aspect") = py::none());

    m.def(
        "build_prompt",
        [](const std::string& user_id, const std::string& item_id, const std::string& item_title,
           const std::string& generator_id, const std::string& explanation_text,
           const std::string& aspect_mode, const std::optional<std::string>& aspect,
           const std::string& template_version) {
            ExplanationRecord record;
            record.user_id = user_id;
            record.item_id = item_id;
            record.item_title = item_title;
            record.generator_id = generator_id;
            record.explanation_text = explanation_text;
            PromptConfig config;
            if (auto mode = aspect_mode_from_name(aspect_mode)) {
                config.aspect_mode = *mode;
            } else {
                throw std::invalid_argument("unknown aspect_mode: " + aspect_mode);
            }
            config.template_version = template_version;
            std::optional<Aspect> requested;
            if (aspect) requested = aspect_from(*aspect);
            return build_prompt(record, config, requested);
        },
        "Assemble the zero-shot rating prompt for one explanation record",
        py::arg("user_id"), py::arg("item_id"), py::arg("item_title"), py::arg("generator_id"),
        py::arg("explanation_text"), py::arg("aspect_mode") = "multiple",
        py::arg("aspect") = py::none(), py::arg("template_version") = "v1");

    m.def(
        "generate_dataset",
        [](const std::string& out_dir, int users, int items_per_user, int generators,
           double quality_sd, double bias_sd, double noise_sd, std::uint64_t seed) {
            SyntheticConfig cfg;
            cfg.n_users = users;
            cfg.items_per_user = items_per_user;
            cfg.n_generators = generators;
            cfg.quality_signal_sd = quality_sd;
            cfg.user_bias_sd = bias_sd;
            cfg.evaluator_noise_sd = noise_sd;
            cfg.seed = seed;
            SyntheticCorpus corpus = generate_synthetic(cfg);
            fs::create_directories(out_dir);
            fs::path dataset_path = fs::path(out_dir) / "dataset.jsonl";
            fs::path gt_path = fs::path(out_dir) / "ground_truth.jsonl";
            save_dataset(corpus.dataset, dataset_path);
            write_scores(gt_path, "ground_truth", corpus.dataset, corpus.ground_truth);
            py::dict out;
            out["records"] = corpus.dataset.size();
            out["dataset"] = dataset_path.string();
            out["ground_truth"] = gt_path.string();
            return out;
        },
        "Synthesize a dataset with known ground truth; writes dataset.jsonl and "
        "ground_truth.jsonl under out_dir",
        py::arg("out_dir"), py::arg("users") = 30, py::arg("items_per_user") = 8,
        py::arg("generators") = 8, py::arg("quality_sd") = 1.0, py::arg("bias_sd") = 0.0,
        py::arg("noise_sd") = 0.5, py::arg("seed") = 0);

    m.def(
        "meta_eval_file",
        [](const std::string& dataset_path, const std::string& ground_truth_path,
           const std::string& scores_path, const std::string& aspect, const std::string& level,
           const std::string& coeff, const std::string& ground_truth_id) {
            Aspect requested = aspect_from(aspect);
            MetaLevel at_level = level_from(level);
            CorrelationKind kind = coeff_from(coeff);
            Dataset dataset = load_dataset(dataset_path);
            EvaluationTable table(dataset);
            table.add_column(ground_truth_id,
                             import_annotations(ground_truth_path, ground_truth_id, dataset));
            table.designate_ground_truth(ground_truth_id);
            std::string id = fs::path(scores_path).stem().string();
            table.add_column(id, import_scores(scores_path, id, dataset));
            std::vector<double> gt = table.ground_truth_numeric(requested);
            std::vector<double> pred = table.evaluator_numeric(id, requested);
            return meta_eval(gt, pred, dataset, at_level, kind).value;
        },
        "Correlate one score file against ground-truth annotations for one aspect",
        py::arg("dataset"), py::arg("ground_truth"), py::arg("scores"), py::arg("aspect"),
        py::arg("level") = "dataset", py::arg("coeff") = "pearson",
        py::arg("ground_truth_id") = "ground_truth");

    m.def(
        "load_run_config",
        [](const std::string& path) { return run_config_to_json(load_run_config(path)); },
        "Parse and validate a run config file; returns the canonical resolved JSON",
        py::arg("path"));

    m.def(
        "run",
        [](const std::string& config_path) {
            RunConfig config = load_run_config(config_path);
            RunResult result = [&] {
                py::gil_scoped_release release;
                return run(config);
            }();
            py::dict out;
            out["records"] = result.dataset.size();
            out["out_dir"] = config.out_dir;
            out["manifest_digest"] = result.manifest.digest;
            py::dict errors;
            for (const auto& [id, message] : result.manifest.errors) {
                errors[py::str(id)] = message;
            }
            out["errors"] = errors;
            return out;
        },
        "Execute a full pipeline run; writes reports and the manifest under the "
        "config's out_dir",
        py::arg("config"));

    m.def(
        "verify_report_dir",
        [](const std::string& out_dir) {
            std::string message;
            bool ok = verify_report_dir(out_dir, &message);
            return py::make_tuple(ok, message);
        },
        "Check report.csv against manifest.json; returns (ok, message)", py::arg("out_dir"));

    m.def(
        "sha256_hex", [](const std::string& data) { return sha256_hex(data); },
        "Hex-encoded SHA-256 of a byte string", py::arg("data"));
}
