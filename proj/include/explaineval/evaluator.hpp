#pragma once
// Model-backed and stub evaluators: transport, response cache, cost ledger.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "explaineval/dataset.hpp"
#include "explaineval/parser.hpp"
#include "explaineval/prompt.hpp"
#include "explaineval/scores.hpp"
#include "explaineval/table.hpp"

namespace explaineval {

struct ModelEndpoint {
    std::string base_url;       // e.g. "http://127.0.0.1:8801/v1"
    std::string model_name;
    std::string api_key_env;    // env var holding the bearer token; may be empty
    double temperature = 0.0;
    int timeout_s = 60;
    int max_retries = 3;        // transport attempts per request
    double prompt_price_per_1m = 0.0;      // USD per 1M prompt tokens
    double completion_price_per_1m = 0.0;  // USD per 1M completion tokens
};

struct UsageRecord {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    double cost_usd = 0.0;
    bool cache_hit = false;
    int requests = 0;  // network requests actually issued (0 on cache hit)
};

struct UsageTotals {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    double cost_usd = 0.0;
    std::int64_t requests = 0;
    std::int64_t cache_hits = 0;

    void add(const UsageRecord& u);
};

double request_cost_usd(const ModelEndpoint& endpoint, std::int64_t prompt_tokens,
                        std::int64_t completion_tokens);

// Backoff before retry attempt N (1-based count of failures so far):
// 100ms * 2^(N-1), capped at 5s. Exposed so tests can pin the schedule.
std::chrono::milliseconds retry_delay(int failures);

// Filesystem response cache: one JSON file per key under cache_dir. The key
// hashes everything that determines a response (model, prompt, temperature,
// template version), so any change to the prompt or settings is a miss.
class ResponseCache {
public:
    explicit ResponseCache(std::string cache_dir);

    static std::string key(const std::string& model_name, const std::string& prompt,
                           double temperature, const std::string& template_version);

    struct Entry {
        std::string response_text;
        std::int64_t prompt_tokens = 0;
        std::int64_t completion_tokens = 0;
    };

    std::optional<Entry> get(const std::string& key) const;
    void put(const std::string& key, const Entry& entry) const;  // atomic overwrite
    const std::string& dir() const { return dir_; }

private:
    std::string path_for(const std::string& key) const;
    std::string dir_;
};

struct CompletionResult {
    std::string text;
    UsageRecord usage;
};

// One chat completion. Consults the cache unless bypass_cache; offline with a
// cache miss throws TransportError. Retries transport/5xx failures up to
// endpoint.max_retries attempts with the fixed backoff schedule.
CompletionResult complete(const ModelEndpoint& endpoint, const std::string& prompt,
                          const PromptConfig& config, const ResponseCache* cache, bool offline,
                          bool bypass_cache = false);

struct EvaluateOptions {
    PromptConfig prompt;
    int concurrency = 4;   // bounded worker pool for multiple-mode requests
    bool offline = false;
    const ResponseCache* cache = nullptr;
};

struct EvaluateResult {
    ScoreColumn column;
    UsageTotals usage;
    std::int64_t parse_retries = 0;   // second attempts triggered by parse failures
    std::int64_t records_failed = 0;  // records with at least one null after retry
};

// Scores every record item-wise: one request per record in multiple mode,
// one per (record, aspect) in single mode. A parse failure triggers exactly
// one fresh retry that bypasses the cache and overwrites the cached entry.
EvaluateResult evaluate_dataset(const Dataset& dataset, const ModelEndpoint& endpoint,
                                const ExampleSelector* examples, const EvaluateOptions& options);

// Deterministic non-network evaluators used for calibration and testing.
// `random` draws uniform 1..5 per record-aspect; `constant` emits all 3s.
struct StubSpec {
    enum class Kind { Random, Constant } kind = Kind::Random;
    std::uint64_t seed = 0;
    int constant_value = 3;
};

ScoreColumn stub_scores(const Dataset& dataset, const StubSpec& spec);

}  // namespace explaineval
