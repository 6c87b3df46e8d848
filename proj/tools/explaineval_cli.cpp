// explaineval — command-line front end for the explanation-evaluation
// pipeline. Each subcommand covers one stage and speaks the shared file
// formats (JSONL datasets and score files, manifest.json, report.csv/md),
// so stages can run independently or be composed:
//
//   generate   synthesize a dataset with known ground truth
//   evaluate   score every configured evaluator, write score files + manifest
//   meta-eval  correlate score files against ground-truth annotations
//   ensemble   evaluate every fixed-size subset of a pool of score files
//   report     render or verify a finished output directory
//   cost       summarize model usage and spend from a manifest
//   run        the full pipeline in one step (generate/load through report)

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "explaineval/digest.hpp"
#include "explaineval/ensemble.hpp"
#include "explaineval/errors.hpp"
#include "explaineval/runner.hpp"
#include "explaineval/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace explaineval;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << content;
}

// --- report printing --------------------------------------------------------

std::size_t level_index(MetaLevel level) {
    for (std::size_t i = 0; i < kAllLevels.size(); ++i) {
        if (kAllLevels[i] == level) return i;
    }
    return 0;
}

std::string cell_text(const ReportCell& cell) {
    return cell.value ? format_percent(*cell.value) : std::string("n/a");
}

// One table restricted to a single level; the three-level view comes from
// report_to_markdown unchanged.
void print_single_level(std::ostream& os, const MetaEvalReport& report, MetaLevel level) {
    os << "coefficient: " << correlation_name(report.coeff) << ", level: " << level_name(level)
       << " (%)\n\n";
    os << "| evaluator |";
    for (Aspect a : kAllAspects) os << ' ' << aspect_name(a) << " |";
    os << " Average |\n|---|";
    for (std::size_t i = 0; i < kAspectCount + 1; ++i) os << "---|";
    os << '\n';
    std::size_t li = level_index(level);
    for (const auto& row : report.rows) {
        os << "| " << row.evaluator_id << " |";
        for (std::size_t ai = 0; ai < kAspectCount; ++ai) {
            os << ' ' << cell_text(row.cells[ai][li]) << " |";
        }
        os << ' ' << cell_text(row.average[li]) << " |\n";
    }
    os << '\n';
}

void print_report(std::ostream& os, const MetaEvalReport& report, const std::string& level_arg) {
    if (level_arg == "all") {
        os << report_to_markdown(report) << '\n';
        return;
    }
    print_single_level(os, report, *level_from_name(level_arg));
}

std::vector<CorrelationKind> parse_coeffs(const std::vector<std::string>& names) {
    std::vector<CorrelationKind> coeffs;
    for (const auto& name : names) coeffs.push_back(*correlation_from_name(name));
    return coeffs;
}

// --- shared config loading ---------------------------------------------------

struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> cache_dir;
    bool offline = false;
    std::vector<std::string> coeffs;
};

// Overrides are applied in JSON space before validation so everything that
// defaults from an overridden key (e.g. the prompt seed following the run
// seed) behaves exactly as if the config file carried the new value.
RunConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
    json obj = json::parse(read_text(path), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        throw ConfigError("config is not a JSON object: " + path);
    }
    if (overrides.seed) obj["seed"] = *overrides.seed;
    if (overrides.out_dir) obj["out_dir"] = *overrides.out_dir;
    if (overrides.cache_dir) obj["cache_dir"] = *overrides.cache_dir;
    if (overrides.offline) obj["offline"] = true;
    if (!overrides.coeffs.empty()) obj["coeffs"] = overrides.coeffs;
    return parse_run_config(obj.dump());
}

// --- subcommands --------------------------------------------------------------

int cmd_generate(const std::string& out_dir, const SyntheticConfig& cfg) {
    SyntheticCorpus corpus = generate_synthetic(cfg);
    fs::create_directories(out_dir);
    fs::path dataset_path = fs::path(out_dir) / "dataset.jsonl";
    fs::path gt_path = fs::path(out_dir) / "ground_truth.jsonl";
    save_dataset(corpus.dataset, dataset_path);
    write_scores(gt_path, "ground_truth", corpus.dataset, corpus.ground_truth);
    std::cout << "records: " << corpus.dataset.size() << " (" << cfg.n_users << " users x "
              << cfg.items_per_user << " items x " << cfg.n_generators << " generators)\n"
              << "dataset: " << dataset_path.string() << '\n'
              << "ground truth: " << gt_path.string() << '\n';
    return 0;
}

// Scores every configured evaluator and writes score files plus the manifest,
// without meta-evaluation; `meta-eval` consumes the outputs. Mirrors the full
// run's semantics: configuration errors abort, wholesale evaluator failures
// are recorded and leave an all-null score file.
int cmd_evaluate(const RunConfig& config) {
    fs::create_directories(config.out_dir);
    fs::create_directories(fs::path(config.out_dir) / "scores");

    RunManifest manifest;
    manifest.tool_version = kVersion;
    manifest.template_version = config.prompt.template_version;
    manifest.config_json = run_config_to_json(config);
    manifest.started_at = iso_utc_now();

    std::optional<SyntheticCorpus> corpus;
    fs::path dataset_file;
    if (config.synthetic) {
        corpus = generate_synthetic(*config.synthetic);
        dataset_file = fs::path(config.out_dir) / "dataset.jsonl";
        save_dataset(corpus->dataset, dataset_file);
    } else {
        dataset_file = config.dataset_path;
    }
    Dataset dataset = config.synthetic ? corpus->dataset : load_dataset(dataset_file);
    manifest.dataset_digest = sha256_hex(read_text(dataset_file));

    EvaluationTable table(dataset);
    if (config.synthetic) {
        table.add_column(config.ground_truth_id, corpus->ground_truth);
    } else {
        table.add_column(config.ground_truth_id,
                         import_annotations(config.ground_truth_path, config.ground_truth_id,
                                            dataset));
    }
    table.designate_ground_truth(config.ground_truth_id);
    write_scores(fs::path(config.out_dir) / "scores" /
                     (sanitize_filename(config.ground_truth_id) + ".jsonl"),
                 config.ground_truth_id, dataset, table.column(config.ground_truth_id));

    std::optional<ExampleSelector> examples;
    if (config.prompt.shot_mode != ShotMode::Zero) {
        examples.emplace(dataset, table, config.prompt.seed);
    }
    std::optional<ResponseCache> cache;
    if (!config.cache_dir.empty()) cache.emplace(config.cache_dir);

    ScoreContext context;
    context.corpus = corpus ? &*corpus : nullptr;
    context.examples = examples ? &*examples : nullptr;
    context.cache = cache ? &*cache : nullptr;
    context.prompt = config.prompt;
    context.metrics = config.metrics;
    context.concurrency = config.concurrency;
    context.offline = config.offline;

    for (const auto& spec : config.evaluators) {
        ScoreColumn column = ScoreColumn::empty(dataset.size());
        try {
            UsageTotals usage;
            column = score_evaluator(spec, dataset, table, context, &usage);
            if (spec.kind == "model") manifest.usage[spec.id] = usage;
            std::cout << "scored " << spec.id << " (" << dataset.size() << " records)\n";
        } catch (const ConfigError&) {
            throw;
        } catch (const std::runtime_error& e) {
            column = ScoreColumn::empty(dataset.size());
            manifest.errors[spec.id] = e.what();
            std::cout << "failed " << spec.id << ": " << e.what() << '\n';
        }
        table.add_column(spec.id, column);
        write_scores(fs::path(config.out_dir) / "scores" /
                         (sanitize_filename(spec.id) + ".jsonl"),
                     spec.id, dataset, table.column(spec.id));
    }

    manifest.finished_at = iso_utc_now();
    manifest.digest = manifest_digest(manifest);
    write_text(fs::path(config.out_dir) / "manifest.json", manifest_to_json(manifest));
    std::cout << "manifest digest: " << manifest.digest << '\n'
              << "score files: " << (fs::path(config.out_dir) / "scores").string() << '\n';
    return 0;
}

struct MetaEvalArgs {
    std::string dataset_path;
    std::string ground_truth_path;
    std::string ground_truth_id = "ground_truth";
    std::vector<std::string> score_files;
    std::vector<std::string> coeffs = {"pearson", "spearman", "kendall"};
    std::string level = "all";
    std::string out_dir;
};

// Builds the evaluation table from files. Each score file contributes one
// evaluator whose id is the file's stem.
EvaluationTable table_from_files(const Dataset& dataset, const std::string& gt_path,
                                 const std::string& gt_id,
                                 const std::vector<std::string>& score_files,
                                 std::vector<std::string>* ids_out = nullptr) {
    EvaluationTable table(dataset);
    table.add_column(gt_id, import_annotations(gt_path, gt_id, dataset));
    table.designate_ground_truth(gt_id);
    for (const auto& file : score_files) {
        std::string id = fs::path(file).stem().string();
        table.add_column(id, import_scores(file, id, dataset));
        if (ids_out) ids_out->push_back(id);
    }
    return table;
}

int cmd_meta_eval(const MetaEvalArgs& args) {
    Dataset dataset = load_dataset(args.dataset_path);
    EvaluationTable table = table_from_files(dataset, args.ground_truth_path,
                                             args.ground_truth_id, args.score_files);

    std::vector<MetaEvalReport> reports;
    for (CorrelationKind coeff : parse_coeffs(args.coeffs)) {
        reports.push_back(full_report(table, coeff));
    }
    for (const auto& report : reports) print_report(std::cout, report, args.level);

    if (!args.out_dir.empty()) {
        fs::create_directories(args.out_dir);
        json stage;
        stage["command"] = "meta-eval";
        stage["dataset"] = args.dataset_path;
        stage["ground_truth"] = args.ground_truth_path;
        stage["ground_truth_id"] = args.ground_truth_id;
        stage["scores"] = args.score_files;
        stage["coeffs"] = args.coeffs;

        RunManifest manifest;
        manifest.tool_version = kVersion;
        manifest.config_json = stage.dump();
        manifest.dataset_digest = sha256_hex(read_text(args.dataset_path));
        manifest.started_at = iso_utc_now();
        manifest.finished_at = manifest.started_at;
        manifest.digest = manifest_digest(manifest);

        write_text(fs::path(args.out_dir) / "manifest.json", manifest_to_json(manifest));
        write_text(fs::path(args.out_dir) / "report.csv",
                   report_to_csv(reports.front(), manifest.digest));
        write_text(fs::path(args.out_dir) / "report.md", report_to_markdown(reports.front()));
        for (std::size_t i = 1; i < reports.size(); ++i) {
            std::string name = "report-" + std::string(correlation_name(reports[i].coeff));
            write_text(fs::path(args.out_dir) / (name + ".csv"),
                       report_to_csv(reports[i], manifest.digest));
            write_text(fs::path(args.out_dir) / (name + ".md"),
                       report_to_markdown(reports[i]));
        }
        std::cout << "reports written to " << args.out_dir << " (manifest digest "
                  << manifest.digest << ")\n";
    }
    return 0;
}

struct EnsembleArgs {
    std::string dataset_path;
    std::string ground_truth_path;
    std::string ground_truth_id = "ground_truth";
    std::vector<std::string> score_files;
    std::vector<int> subset_sizes;  // empty: every size 1..pool
    std::string level = "dataset";
    std::string coeff = "pearson";
    std::size_t max_subsets = 10000;
    bool points = false;
};

int cmd_ensemble(const EnsembleArgs& args) {
    Dataset dataset = load_dataset(args.dataset_path);
    std::vector<std::string> pool;
    EvaluationTable table = table_from_files(dataset, args.ground_truth_path,
                                             args.ground_truth_id, args.score_files, &pool);

    SubsetOptions options;
    options.level = *level_from_name(args.level);
    options.coeff = *correlation_from_name(args.coeff);
    options.max_subsets = args.max_subsets;

    std::vector<int> sizes = args.subset_sizes;
    if (sizes.empty()) {
        for (int n = 1; n <= static_cast<int>(pool.size()); ++n) sizes.push_back(n);
    }

    std::cout << "pool: " << pool.size() << " evaluators, level " << args.level
              << ", coefficient " << args.coeff << " (%)\n";
    for (int size : sizes) {
        SubsetDistribution dist = subset_distribution(table, pool, size, options);
        std::cout << "\nsubset size " << size << ": " << dist.points.size() << " subsets\n";
        std::cout << "| series | mean | min | max |\n|---|---|---|---|\n";
        for (std::size_t ai = 0; ai < kAspectCount; ++ai) {
            const SubsetStats& s = dist.stats[ai];
            std::cout << "| " << aspect_name(kAllAspects[ai]) << " | " << format_percent(s.mean)
                      << " | " << format_percent(s.min) << " | " << format_percent(s.max)
                      << " |\n";
        }
        const SubsetStats& avg = dist.stats[kAspectCount];
        std::cout << "| Average | " << format_percent(avg.mean) << " | "
                  << format_percent(avg.min) << " | " << format_percent(avg.max) << " |\n";
        if (args.points) {
            for (const auto& point : dist.points) {
                std::cout << "  ";
                for (std::size_t i = 0; i < point.members.size(); ++i) {
                    std::cout << (i ? "+" : "") << point.members[i];
                }
                std::cout << ": " << format_percent(point.average) << '\n';
            }
        }
    }
    return 0;
}

int cmd_report(const std::string& out_dir, bool verify) {
    if (verify) {
        std::string message;
        if (verify_report_dir(out_dir, &message)) {
            std::cout << "verify: ok\n";
            return 0;
        }
        std::cout << "verify failed: " << message << '\n';
        return 1;
    }
    fs::path md = fs::path(out_dir) / "report.md";
    if (!fs::exists(md)) throw DataError("missing report.md in " + out_dir);
    std::cout << read_text(md);
    for (const auto& entry : fs::directory_iterator(out_dir)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("report-", 0) == 0 && entry.path().extension() == ".md") {
            std::cout << '\n' << read_text(entry.path());
        }
    }
    return 0;
}

int cmd_cost(const std::string& out_dir) {
    RunManifest manifest = manifest_from_json(read_text(fs::path(out_dir) / "manifest.json"));
    if (manifest.usage.empty()) {
        std::cout << "no model usage recorded\n";
    } else {
        std::cout << "| evaluator | requests | cache hits | prompt tokens | completion tokens "
                     "| cost (USD) |\n|---|---|---|---|---|---|\n";
        UsageTotals total;
        for (const auto& [id, u] : manifest.usage) {
            char cost[32];
            std::snprintf(cost, sizeof(cost), "%.6f", u.cost_usd);
            std::cout << "| " << id << " | " << u.requests << " | " << u.cache_hits << " | "
                      << u.prompt_tokens << " | " << u.completion_tokens << " | " << cost
                      << " |\n";
            total.prompt_tokens += u.prompt_tokens;
            total.completion_tokens += u.completion_tokens;
            total.cost_usd += u.cost_usd;
            total.requests += u.requests;
            total.cache_hits += u.cache_hits;
        }
        char cost[32];
        std::snprintf(cost, sizeof(cost), "%.6f", total.cost_usd);
        std::cout << "| total | " << total.requests << " | " << total.cache_hits << " | "
                  << total.prompt_tokens << " | " << total.completion_tokens << " | " << cost
                  << " |\n";
    }
    for (const auto& [id, message] : manifest.errors) {
        std::cout << "error[" << id << "]: " << message << '\n';
    }
    return 0;
}

int cmd_run(const RunConfig& config, const std::string& level) {
    RunResult result = run(config);
    std::cout << "records: " << result.dataset.size() << ", evaluators: "
              << config.evaluators.size() << '\n'
              << "output: " << config.out_dir << '\n'
              << "manifest digest: " << result.manifest.digest << '\n';
    for (const auto& [id, message] : result.manifest.errors) {
        std::cout << "error[" << id << "]: " << message << '\n';
    }
    std::cout << '\n';
    for (const auto& report : result.reports) print_report(std::cout, report, level);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"explanation-evaluation pipeline: score recommendation explanations with "
                 "models, metrics, and stubs, then correlate them against ground-truth labels"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    const std::vector<std::string> coeff_names = {"pearson", "spearman", "kendall"};
    const std::vector<std::string> level_names = {"dataset", "user", "pair", "all"};

    // run
    auto* run_cmd = app.add_subcommand("run", "execute the full pipeline from a config file");
    std::string run_config_path;
    ConfigOverrides run_overrides;
    std::string run_level = "all";
    std::uint64_t run_seed = 0;
    std::string run_out, run_cache;
    std::vector<std::string> run_coeffs;
    run_cmd->add_option("--config", run_config_path, "run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", run_seed, "override the run seed");
    run_cmd->add_option("--out", run_out, "override the output directory");
    run_cmd->add_option("--cache-dir", run_cache, "override the response cache directory");
    run_cmd->add_flag("--offline", run_overrides.offline,
                      "forbid network use; answer from the cache or stubs only");
    run_cmd->add_option("--coeff", run_coeffs, "correlation coefficients to report (repeatable)")
        ->check(CLI::IsMember(coeff_names));
    run_cmd->add_option("--level", run_level, "level shown in the console summary")
        ->check(CLI::IsMember(level_names));

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "synthesize a dataset with known ground truth");
    std::string gen_out;
    SyntheticConfig gen_cfg;
    gen_cmd->add_option("--out", gen_out, "output directory")->required();
    gen_cmd->add_option("--seed", gen_cfg.seed, "generator seed");
    gen_cmd->add_option("--users", gen_cfg.n_users, "number of users");
    gen_cmd->add_option("--items-per-user", gen_cfg.items_per_user, "items per user");
    gen_cmd->add_option("--generators", gen_cfg.n_generators, "explanation generators per pair");
    gen_cmd->add_option("--quality-sd", gen_cfg.quality_signal_sd,
                        "sd of the latent per-record quality");
    gen_cmd->add_option("--bias-sd", gen_cfg.user_bias_sd, "sd of the per-user rating offset");
    gen_cmd->add_option("--noise-sd", gen_cfg.evaluator_noise_sd,
                        "sd used by the noisy stub column");

    // evaluate
    auto* eval_cmd = app.add_subcommand(
        "evaluate", "score every configured evaluator; write score files and a manifest");
    std::string eval_config_path;
    ConfigOverrides eval_overrides;
    std::uint64_t eval_seed = 0;
    std::string eval_out, eval_cache;
    eval_cmd->add_option("--config", eval_config_path, "run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--seed", eval_seed, "override the run seed");
    eval_cmd->add_option("--out", eval_out, "override the output directory");
    eval_cmd->add_option("--cache-dir", eval_cache, "override the response cache directory");
    eval_cmd->add_flag("--offline", eval_overrides.offline,
                       "forbid network use; answer from the cache or stubs only");

    // meta-eval
    auto* meta_cmd = app.add_subcommand(
        "meta-eval", "correlate score files against ground-truth annotations");
    MetaEvalArgs meta_args;
    meta_cmd->add_option("--dataset", meta_args.dataset_path, "dataset JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    meta_cmd->add_option("--ground-truth", meta_args.ground_truth_path,
                         "ground-truth annotation JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    meta_cmd->add_option("--ground-truth-id", meta_args.ground_truth_id,
                         "evaluator id recorded in the ground-truth file");
    meta_cmd->add_option("--scores", meta_args.score_files,
                         "score files to meta-evaluate; the file stem is the evaluator id")
        ->required()
        ->check(CLI::ExistingFile);
    meta_cmd->add_option("--coeff", meta_args.coeffs,
                         "correlation coefficients to report (repeatable)")
        ->check(CLI::IsMember(coeff_names));
    meta_cmd->add_option("--level", meta_args.level, "level shown in the console summary")
        ->check(CLI::IsMember(level_names));
    meta_cmd->add_option("--out", meta_args.out_dir,
                         "also write report.csv/report.md and manifest.json here");

    // ensemble
    auto* ens_cmd = app.add_subcommand(
        "ensemble", "evaluate every fixed-size subset of a pool of score files");
    EnsembleArgs ens_args;
    ens_cmd->add_option("--dataset", ens_args.dataset_path, "dataset JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    ens_cmd->add_option("--ground-truth", ens_args.ground_truth_path,
                        "ground-truth annotation JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    ens_cmd->add_option("--ground-truth-id", ens_args.ground_truth_id,
                        "evaluator id recorded in the ground-truth file");
    ens_cmd->add_option("--scores", ens_args.score_files,
                        "score files forming the ensemble pool")
        ->required()
        ->check(CLI::ExistingFile);
    ens_cmd->add_option("--subset-size", ens_args.subset_sizes,
                        "subset sizes to evaluate (default: every size up to the pool)");
    ens_cmd->add_option("--level", ens_args.level, "meta-evaluation level")
        ->check(CLI::IsMember({"dataset", "user", "pair"}));
    ens_cmd->add_option("--coeff", ens_args.coeff, "correlation coefficient")
        ->check(CLI::IsMember(coeff_names));
    ens_cmd->add_option("--max-subsets", ens_args.max_subsets,
                        "refuse subset counts larger than this");
    ens_cmd->add_flag("--points", ens_args.points, "print every subset with its average");

    // report
    auto* rep_cmd = app.add_subcommand("report", "render or verify a finished output directory");
    std::string rep_out;
    bool rep_verify = false;
    rep_cmd->add_option("--out", rep_out, "output directory of a previous run")
        ->required()
        ->check(CLI::ExistingDirectory);
    rep_cmd->add_flag("--verify", rep_verify,
                      "check report.csv against manifest.json and exit nonzero on mismatch");

    // cost
    auto* cost_cmd = app.add_subcommand("cost", "summarize model usage and spend from a manifest");
    std::string cost_out;
    cost_cmd->add_option("--out", cost_out, "output directory holding manifest.json")
        ->required()
        ->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            if (run_cmd->count("--seed")) run_overrides.seed = run_seed;
            if (run_cmd->count("--out")) run_overrides.out_dir = run_out;
            if (run_cmd->count("--cache-dir")) run_overrides.cache_dir = run_cache;
            run_overrides.coeffs = run_coeffs;
            return cmd_run(load_config(run_config_path, run_overrides), run_level);
        }
        if (gen_cmd->parsed()) return cmd_generate(gen_out, gen_cfg);
        if (eval_cmd->parsed()) {
            if (eval_cmd->count("--seed")) eval_overrides.seed = eval_seed;
            if (eval_cmd->count("--out")) eval_overrides.out_dir = eval_out;
            if (eval_cmd->count("--cache-dir")) eval_overrides.cache_dir = eval_cache;
            return cmd_evaluate(load_config(eval_config_path, eval_overrides));
        }
        if (meta_cmd->parsed()) return cmd_meta_eval(meta_args);
        if (ens_cmd->parsed()) return cmd_ensemble(ens_args);
        if (rep_cmd->parsed()) return cmd_report(rep_out, rep_verify);
        if (cost_cmd->parsed()) return cmd_cost(cost_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
