#include "explaineval/runner.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "explaineval/digest.hpp"
#include "explaineval/ensemble.hpp"
#include "explaineval/version.hpp"

namespace explaineval {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;  // sorted keys: the canonical form digests cover

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << content;
}

std::string format_double(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

SyntheticConfig parse_synthetic(const json& obj) {
    SyntheticConfig cfg;
    cfg.n_users = obj.value("n_users", cfg.n_users);
    cfg.items_per_user = obj.value("items_per_user", cfg.items_per_user);
    cfg.n_generators = obj.value("n_generators", cfg.n_generators);
    cfg.quality_signal_sd = obj.value("quality_signal_sd", cfg.quality_signal_sd);
    cfg.user_bias_sd = obj.value("user_bias_sd", cfg.user_bias_sd);
    cfg.evaluator_noise_sd = obj.value("evaluator_noise_sd", cfg.evaluator_noise_sd);
    cfg.seed = obj.value("seed", cfg.seed);
    return cfg;
}

json synthetic_to_json(const SyntheticConfig& cfg) {
    json obj;
    obj["n_users"] = cfg.n_users;
    obj["items_per_user"] = cfg.items_per_user;
    obj["n_generators"] = cfg.n_generators;
    obj["quality_signal_sd"] = cfg.quality_signal_sd;
    obj["user_bias_sd"] = cfg.user_bias_sd;
    obj["evaluator_noise_sd"] = cfg.evaluator_noise_sd;
    obj["seed"] = cfg.seed;
    return obj;
}

ModelEndpoint parse_endpoint(const json& obj) {
    ModelEndpoint ep;
    ep.base_url = obj.value("base_url", "");
    ep.model_name = obj.value("model", "");
    ep.api_key_env = obj.value("api_key_env", "");
    ep.temperature = obj.value("temperature", 0.0);
    ep.timeout_s = obj.value("timeout_s", ep.timeout_s);
    ep.max_retries = obj.value("max_retries", ep.max_retries);
    ep.prompt_price_per_1m = obj.value("prompt_price_per_1m", 0.0);
    ep.completion_price_per_1m = obj.value("completion_price_per_1m", 0.0);
    if (ep.base_url.empty() || ep.model_name.empty()) {
        throw ConfigError("model endpoint needs base_url and model");
    }
    if (ep.timeout_s <= 0) throw ConfigError("endpoint timeout must be > 0");
    if (ep.prompt_price_per_1m < 0 || ep.completion_price_per_1m < 0) {
        throw ConfigError("endpoint prices must be >= 0");
    }
    return ep;
}

json endpoint_to_json(const ModelEndpoint& ep) {
    json obj;
    obj["base_url"] = ep.base_url;
    obj["model"] = ep.model_name;
    obj["api_key_env"] = ep.api_key_env;
    obj["temperature"] = ep.temperature;
    obj["timeout_s"] = ep.timeout_s;
    obj["max_retries"] = ep.max_retries;
    obj["prompt_price_per_1m"] = ep.prompt_price_per_1m;
    obj["completion_price_per_1m"] = ep.completion_price_per_1m;
    return obj;
}

EvaluatorSpec parse_evaluator(const json& obj) {
    EvaluatorSpec spec;
    spec.id = obj.value("id", "");
    spec.kind = obj.value("kind", "");
    if (spec.id.empty()) throw ConfigError("evaluator spec needs an id");
    if (spec.kind == "model") {
        if (!obj.contains("endpoint")) throw ConfigError("model evaluator needs an endpoint");
        spec.endpoint = parse_endpoint(obj["endpoint"]);
    } else if (spec.kind == "metric") {
        spec.metric_id = obj.value("metric_id", "");
        if (!is_reference_metric_id(spec.metric_id)) {
            throw ConfigError("unknown reference metric: " + spec.metric_id);
        }
    } else if (spec.kind == "stub") {
        spec.stub_kind = obj.value("stub", "random");
        spec.stub_value = obj.value("value", spec.stub_value);
        spec.stub_sd = obj.value("sd", spec.stub_sd);
        spec.stub_seed = obj.value("seed", spec.stub_seed);
    } else if (spec.kind == "annotations" || spec.kind == "scores") {
        spec.path = obj.value("path", "");
        if (spec.path.empty()) throw ConfigError("file evaluator needs a path");
    } else if (spec.kind == "ensemble") {
        if (!obj.contains("members") || !obj["members"].is_array() || obj["members"].empty()) {
            throw ConfigError("ensemble evaluator needs a non-empty members list");
        }
        for (const auto& m : obj["members"]) spec.members.push_back(m.get<std::string>());
    } else {
        throw ConfigError("unknown evaluator kind: " + spec.kind);
    }
    return spec;
}

json evaluator_to_json(const EvaluatorSpec& spec) {
    json obj;
    obj["id"] = spec.id;
    obj["kind"] = spec.kind;
    if (spec.kind == "model") obj["endpoint"] = endpoint_to_json(spec.endpoint);
    if (spec.kind == "metric") obj["metric_id"] = spec.metric_id;
    if (spec.kind == "stub") {
        obj["stub"] = spec.stub_kind;
        obj["value"] = spec.stub_value;
        obj["sd"] = spec.stub_sd;
        obj["seed"] = spec.stub_seed;
    }
    if (spec.kind == "annotations" || spec.kind == "scores") obj["path"] = spec.path;
    if (spec.kind == "ensemble") obj["members"] = spec.members;
    return obj;
}

}  // namespace

std::string iso_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sanitize_filename(const std::string& id) {
    std::string out;
    for (char c : id) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '.' || c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? "_" : out;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(read_file(path));
}

RunConfig parse_run_config(const std::string& json_text) {
    json obj = json::parse(json_text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        throw ConfigError("config is not a JSON object");
    }
    RunConfig cfg;
    cfg.dataset_path = obj.value("dataset", "");
    if (obj.contains("synthetic") && !obj["synthetic"].is_null()) {
        cfg.synthetic = parse_synthetic(obj["synthetic"]);
    }
    if (cfg.dataset_path.empty() == !cfg.synthetic.has_value()) {
        throw ConfigError("config needs exactly one of 'dataset' or 'synthetic'");
    }
    cfg.ground_truth_path = obj.value("ground_truth", "");
    if (!cfg.synthetic && cfg.ground_truth_path.empty()) {
        throw ConfigError("file datasets need a 'ground_truth' annotation path");
    }
    cfg.ground_truth_id = obj.value("ground_truth_id", cfg.ground_truth_id);

    cfg.seed = obj.value("seed", cfg.seed);
    if (obj.contains("evaluators")) {
        if (!obj["evaluators"].is_array()) throw ConfigError("'evaluators' must be an array");
        for (const auto& e : obj["evaluators"]) cfg.evaluators.push_back(parse_evaluator(e));
    }
    for (std::size_t i = 0; i < cfg.evaluators.size(); ++i) {
        for (std::size_t j = i + 1; j < cfg.evaluators.size(); ++j) {
            if (cfg.evaluators[i].id == cfg.evaluators[j].id) {
                throw ConfigError("duplicate evaluator id: " + cfg.evaluators[i].id);
            }
        }
        if (cfg.evaluators[i].id == cfg.ground_truth_id) {
            throw ConfigError("evaluator id collides with ground truth id: " +
                              cfg.evaluators[i].id);
        }
    }

    if (obj.contains("prompt")) {
        const json& p = obj["prompt"];
        if (auto m = aspect_mode_from_name(p.value("aspect_mode", "multiple"))) {
            cfg.prompt.aspect_mode = *m;
        } else {
            throw ConfigError("unknown aspect_mode");
        }
        if (auto s = shot_mode_from_name(p.value("shot_mode", "zero"))) {
            cfg.prompt.shot_mode = *s;
        } else {
            throw ConfigError("unknown shot_mode");
        }
        cfg.prompt.template_version = p.value("template_version", cfg.prompt.template_version);
        cfg.prompt.seed = p.value("seed", cfg.seed);
    } else {
        cfg.prompt.seed = cfg.seed;
    }

    if (obj.contains("metrics")) {
        const json& m = obj["metrics"];
        std::string tok = m.value("tokenizer", "cjk_char");
        if (tok == "cjk_char") {
            cfg.metrics.tokenizer = TokenizerMode::CjkChar;
        } else if (tok == "whitespace") {
            cfg.metrics.tokenizer = TokenizerMode::Whitespace;
        } else {
            throw ConfigError("unknown tokenizer: " + tok);
        }
        std::string smoothing = m.value("bleu_smoothing", "none");
        if (smoothing == "none") {
            cfg.metrics.bleu_smoothing = BleuSmoothing::None;
        } else if (smoothing == "add_epsilon") {
            cfg.metrics.bleu_smoothing = BleuSmoothing::AddEpsilon;
        } else {
            throw ConfigError("unknown bleu_smoothing: " + smoothing);
        }
    }

    if (obj.contains("coeffs")) {
        cfg.coeffs.clear();
        for (const auto& c : obj["coeffs"]) {
            auto kind = correlation_from_name(c.get<std::string>());
            if (!kind) throw ConfigError("unknown coefficient: " + c.get<std::string>());
            cfg.coeffs.push_back(*kind);
        }
        if (cfg.coeffs.empty()) throw ConfigError("'coeffs' must not be empty");
    }

    cfg.out_dir = obj.value("out_dir", cfg.out_dir);
    cfg.cache_dir = obj.value("cache_dir", cfg.cache_dir);
    cfg.offline = obj.value("offline", cfg.offline);
    cfg.concurrency = obj.value("concurrency", cfg.concurrency);
    if (cfg.concurrency < 1) throw ConfigError("concurrency must be >= 1");
    return cfg;
}

std::string run_config_to_json(const RunConfig& config) {
    json obj;
    obj["dataset"] = config.dataset_path;
    obj["synthetic"] = config.synthetic ? synthetic_to_json(*config.synthetic) : json(nullptr);
    obj["ground_truth"] = config.ground_truth_path;
    obj["ground_truth_id"] = config.ground_truth_id;
    json evaluators = json::array();
    for (const auto& spec : config.evaluators) evaluators.push_back(evaluator_to_json(spec));
    obj["evaluators"] = evaluators;
    json prompt;
    prompt["aspect_mode"] = std::string(aspect_mode_name(config.prompt.aspect_mode));
    prompt["shot_mode"] = std::string(shot_mode_name(config.prompt.shot_mode));
    prompt["template_version"] = config.prompt.template_version;
    prompt["seed"] = config.prompt.seed;
    obj["prompt"] = prompt;
    json metrics;
    metrics["tokenizer"] =
        config.metrics.tokenizer == TokenizerMode::CjkChar ? "cjk_char" : "whitespace";
    metrics["bleu_smoothing"] =
        config.metrics.bleu_smoothing == BleuSmoothing::None ? "none" : "add_epsilon";
    obj["metrics"] = metrics;
    json coeffs = json::array();
    for (auto c : config.coeffs) coeffs.push_back(std::string(correlation_name(c)));
    obj["coeffs"] = coeffs;
    obj["out_dir"] = config.out_dir;
    obj["cache_dir"] = config.cache_dir;
    obj["offline"] = config.offline;
    obj["concurrency"] = config.concurrency;
    obj["seed"] = config.seed;
    return obj.dump();
}

std::string manifest_to_json(const RunManifest& manifest) {
    json obj;
    obj["tool_version"] = manifest.tool_version;
    obj["template_version"] = manifest.template_version;
    obj["config"] = manifest.config_json.empty() ? json(nullptr)
                                                 : json::parse(manifest.config_json);
    obj["dataset_digest"] = manifest.dataset_digest;
    json usage;
    for (const auto& [id, totals] : manifest.usage) {
        json u;
        u["prompt_tokens"] = totals.prompt_tokens;
        u["completion_tokens"] = totals.completion_tokens;
        u["cost_usd"] = totals.cost_usd;
        u["requests"] = totals.requests;
        u["cache_hits"] = totals.cache_hits;
        usage[id] = u;
    }
    obj["usage"] = usage;
    json errors;
    for (const auto& [id, message] : manifest.errors) errors[id] = message;
    obj["errors"] = errors;
    obj["started_at"] = manifest.started_at;
    obj["finished_at"] = manifest.finished_at;
    obj["digest"] = manifest.digest;
    return obj.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& json_text) {
    json obj = json::parse(json_text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw DataError("manifest is not a JSON object");
    RunManifest m;
    m.tool_version = obj.value("tool_version", "");
    m.template_version = obj.value("template_version", "");
    if (obj.contains("config") && !obj["config"].is_null()) {
        m.config_json = obj["config"].dump();
    }
    m.dataset_digest = obj.value("dataset_digest", "");
    if (obj.contains("usage")) {
        for (auto it = obj["usage"].begin(); it != obj["usage"].end(); ++it) {
            UsageTotals totals;
            totals.prompt_tokens = it.value().value("prompt_tokens", std::int64_t{0});
            totals.completion_tokens = it.value().value("completion_tokens", std::int64_t{0});
            totals.cost_usd = it.value().value("cost_usd", 0.0);
            totals.requests = it.value().value("requests", std::int64_t{0});
            totals.cache_hits = it.value().value("cache_hits", std::int64_t{0});
            m.usage[it.key()] = totals;
        }
    }
    if (obj.contains("errors")) {
        for (auto it = obj["errors"].begin(); it != obj["errors"].end(); ++it) {
            m.errors[it.key()] = it.value().get<std::string>();
        }
    }
    m.started_at = obj.value("started_at", "");
    m.finished_at = obj.value("finished_at", "");
    m.digest = obj.value("digest", "");
    return m;
}

std::string manifest_digest(const RunManifest& manifest) {
    RunManifest canonical = manifest;
    canonical.digest.clear();
    canonical.started_at.clear();
    canonical.finished_at.clear();
    return sha256_hex(manifest_to_json(canonical));
}

std::string format_percent(double value) {
    std::string s = format_double(value * 100.0, "%.2f");
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string report_to_csv(const MetaEvalReport& report, const std::string& manifest_digest_hex) {
    std::ostringstream out;
    out << "# manifest_digest=" << manifest_digest_hex << "\n";
    out << "evaluator,aspect,level,coeff,value,value_percent,groups_total,groups_used,"
           "skipped_degenerate,skipped_small,error\n";
    std::string coeff(correlation_name(report.coeff));
    auto emit = [&](const std::string& evaluator, const std::string& aspect, MetaLevel level,
                    const ReportCell& cell, bool with_diagnostics) {
        out << csv_escape(evaluator) << ',' << aspect << ',' << level_name(level) << ',' << coeff
            << ',';
        if (cell.value) {
            out << format_double(*cell.value, "%.12g") << ',' << format_percent(*cell.value);
        } else {
            out << ',';
        }
        out << ',';
        if (with_diagnostics) {
            out << cell.diagnostics.groups_total << ',' << cell.diagnostics.groups_used << ','
                << cell.diagnostics.skipped_degenerate << ',' << cell.diagnostics.skipped_small;
        } else {
            out << ",,,";
        }
        out << ',' << csv_escape(cell.error) << "\n";
    };
    for (const auto& row : report.rows) {
        for (Aspect a : kAllAspects) {
            std::size_t ai = static_cast<std::size_t>(a);
            for (std::size_t li = 0; li < kAllLevels.size(); ++li) {
                emit(row.evaluator_id, std::string(aspect_name(a)), kAllLevels[li],
                     row.cells[ai][li], true);
            }
        }
        for (std::size_t li = 0; li < kAllLevels.size(); ++li) {
            emit(row.evaluator_id, "Average", kAllLevels[li], row.average[li], false);
        }
    }
    return out.str();
}

std::string report_to_markdown(const MetaEvalReport& report) {
    std::ostringstream out;
    out << "Dataset-Level / User-Level / Pair-Level (%), coefficient: "
        << correlation_name(report.coeff) << "\n\n";
    out << "| Method | Persuasiveness | Transparency | Accuracy | Satisfaction | Average |\n";
    out << "|---|---|---|---|---|---|\n";
    auto cell_text = [&](const std::array<ReportCell, 3>& levels) {
        std::string text;
        for (std::size_t li = 0; li < levels.size(); ++li) {
            if (li > 0) text += " / ";
            text += levels[li].value ? format_percent(*levels[li].value) : "n/a";
        }
        return text;
    };
    for (const auto& row : report.rows) {
        out << "| " << row.evaluator_id;
        for (Aspect a : kAllAspects) {
            out << " | " << cell_text(row.cells[static_cast<std::size_t>(a)]);
        }
        out << " | " << cell_text(row.average) << " |\n";
    }
    return out.str();
}

ScoreColumn score_evaluator(const EvaluatorSpec& spec, const Dataset& dataset,
                            const EvaluationTable& table, const ScoreContext& context,
                            UsageTotals* usage) {
    if (spec.kind == "model") {
        EvaluateOptions options;
        options.prompt = context.prompt;
        options.concurrency = context.concurrency;
        options.offline = context.offline;
        options.cache = context.cache;
        EvaluateResult eval = evaluate_dataset(dataset, spec.endpoint, context.examples, options);
        if (usage) *usage = eval.usage;
        return std::move(eval.column);
    }
    if (spec.kind == "metric") {
        return score_dataset_reference(dataset, spec.metric_id, context.metrics);
    }
    if (spec.kind == "stub") {
        if (spec.stub_kind == "random" || spec.stub_kind == "constant") {
            StubSpec stub;
            stub.kind =
                spec.stub_kind == "random" ? StubSpec::Kind::Random : StubSpec::Kind::Constant;
            stub.seed = spec.stub_seed;
            stub.constant_value = spec.stub_value;
            return stub_scores(dataset, stub);
        }
        if (!context.corpus) {
            throw ConfigError("stub '" + spec.stub_kind + "' needs a synthetic dataset");
        }
        if (spec.stub_kind == "oracle") return context.corpus->ground_truth;
        if (spec.stub_kind == "quality") return quality_column(*context.corpus);
        if (spec.stub_kind == "user_shifted") {
            return user_shifted_column(*context.corpus, spec.stub_sd, spec.stub_seed);
        }
        if (spec.stub_kind == "noisy") {
            return noisy_column(*context.corpus, spec.stub_sd, spec.stub_seed);
        }
        throw ConfigError("unknown stub kind: " + spec.stub_kind);
    }
    if (spec.kind == "annotations") return import_annotations(spec.path, spec.id, dataset);
    if (spec.kind == "scores") return import_scores(spec.path, spec.id, dataset);
    if (spec.kind == "ensemble") {
        EnsembleSpec ensemble;
        ensemble.members = spec.members;
        return ensemble_scores(table, ensemble);
    }
    throw ConfigError("unknown evaluator kind: " + spec.kind);
}

RunResult run(const RunConfig& config) {
    fs::create_directories(config.out_dir);
    fs::create_directories(fs::path(config.out_dir) / "scores");

    RunManifest manifest;
    manifest.tool_version = kVersion;
    manifest.template_version = config.prompt.template_version;
    manifest.config_json = run_config_to_json(config);
    manifest.started_at = iso_utc_now();

    // Dataset: load from disk or synthesize (and persist what was used).
    std::optional<SyntheticCorpus> corpus;
    fs::path dataset_file;
    if (config.synthetic) {
        corpus = generate_synthetic(*config.synthetic);
        dataset_file = fs::path(config.out_dir) / "dataset.jsonl";
        save_dataset(corpus->dataset, dataset_file);
    } else {
        dataset_file = config.dataset_path;
    }
    RunResult result(config.synthetic ? corpus->dataset : load_dataset(dataset_file));
    manifest.dataset_digest = sha256_hex(read_file(dataset_file));

    // Ground truth first; evaluators and examples depend on it.
    if (config.synthetic) {
        result.table.add_column(config.ground_truth_id, corpus->ground_truth);
    } else {
        result.table.add_column(
            config.ground_truth_id,
            import_annotations(config.ground_truth_path, config.ground_truth_id, result.dataset));
    }
    result.table.designate_ground_truth(config.ground_truth_id);
    write_scores(fs::path(config.out_dir) / "scores" /
                     (sanitize_filename(config.ground_truth_id) + ".jsonl"),
                 config.ground_truth_id, result.dataset, result.table.column(config.ground_truth_id));

    std::optional<ExampleSelector> examples;
    if (config.prompt.shot_mode != ShotMode::Zero) {
        examples.emplace(result.dataset, result.table, config.prompt.seed);
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
        ScoreColumn column = ScoreColumn::empty(result.dataset.size());
        try {
            UsageTotals usage;
            column = score_evaluator(spec, result.dataset, result.table, context, &usage);
            if (spec.kind == "model") manifest.usage[spec.id] = usage;
        } catch (const ConfigError&) {
            throw;  // configuration bugs abort the run
        } catch (const std::runtime_error& e) {
            // Wholesale evaluator failure: keep the run alive, record why,
            // and leave the column all-null so its cells report as undefined.
            column = ScoreColumn::empty(result.dataset.size());
            manifest.errors[spec.id] = e.what();
        }
        result.table.add_column(spec.id, column);
        write_scores(fs::path(config.out_dir) / "scores" /
                         (sanitize_filename(spec.id) + ".jsonl"),
                     spec.id, result.dataset, result.table.column(spec.id));
    }

    for (CorrelationKind coeff : config.coeffs) {
        result.reports.push_back(full_report(result.table, coeff));
    }

    manifest.finished_at = iso_utc_now();
    manifest.digest = manifest_digest(manifest);
    result.manifest = manifest;

    write_file(fs::path(config.out_dir) / "manifest.json", manifest_to_json(manifest));
    write_file(fs::path(config.out_dir) / "report.csv",
               report_to_csv(result.reports.front(), manifest.digest));
    write_file(fs::path(config.out_dir) / "report.md", report_to_markdown(result.reports.front()));
    for (std::size_t i = 1; i < result.reports.size(); ++i) {
        std::string name = "report-" + std::string(correlation_name(result.reports[i].coeff));
        write_file(fs::path(config.out_dir) / (name + ".csv"),
                   report_to_csv(result.reports[i], manifest.digest));
        write_file(fs::path(config.out_dir) / (name + ".md"),
                   report_to_markdown(result.reports[i]));
    }
    return result;
}

bool verify_report_dir(const std::string& out_dir, std::string* message) {
    auto fail = [&](const std::string& why) {
        if (message) *message = why;
        return false;
    };
    fs::path csv_path = fs::path(out_dir) / "report.csv";
    fs::path manifest_path = fs::path(out_dir) / "manifest.json";
    if (!fs::exists(csv_path)) return fail("missing report.csv");
    if (!fs::exists(manifest_path)) return fail("missing manifest.json");

    std::string csv = read_file(csv_path);
    const std::string prefix = "# manifest_digest=";
    if (csv.rfind(prefix, 0) != 0) return fail("report.csv has no embedded manifest digest");
    std::size_t eol = csv.find('\n');
    std::string embedded = csv.substr(prefix.size(),
                                      (eol == std::string::npos ? csv.size() : eol) -
                                          prefix.size());

    RunManifest manifest = manifest_from_json(read_file(manifest_path));
    std::string recomputed = manifest_digest(manifest);
    if (manifest.digest != recomputed) {
        return fail("manifest digest mismatch: stored " + manifest.digest + ", recomputed " +
                    recomputed);
    }
    if (embedded != manifest.digest) {
        return fail("report digest " + embedded + " does not match manifest " + manifest.digest);
    }
    if (message) *message = "ok";
    return true;
}

}  // namespace explaineval
