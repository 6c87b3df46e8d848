#include "explaineval/evaluator.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "explaineval/digest.hpp"
#include "explaineval/rng.hpp"

namespace explaineval {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct ParsedUrl {
    std::string host;  // scheme://host[:port]
    std::string path;  // leading path prefix, e.g. "/v1"
};

ParsedUrl split_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("base_url must include a scheme: " + base_url);
    }
    auto path_start = base_url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.host = base_url;
    } else {
        out.host = base_url.substr(0, path_start);
        out.path = base_url.substr(path_start);
    }
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

}  // namespace

void UsageTotals::add(const UsageRecord& u) {
    prompt_tokens += u.prompt_tokens;
    completion_tokens += u.completion_tokens;
    cost_usd += u.cost_usd;
    requests += u.requests;
    if (u.cache_hit) ++cache_hits;
}

double request_cost_usd(const ModelEndpoint& endpoint, std::int64_t prompt_tokens,
                        std::int64_t completion_tokens) {
    return static_cast<double>(prompt_tokens) * endpoint.prompt_price_per_1m / 1e6 +
           static_cast<double>(completion_tokens) * endpoint.completion_price_per_1m / 1e6;
}

std::chrono::milliseconds retry_delay(int failures) {
    if (failures < 1) failures = 1;
    std::int64_t ms = 100;
    for (int i = 1; i < failures && ms < 5000; ++i) ms *= 2;
    return std::chrono::milliseconds(std::min<std::int64_t>(ms, 5000));
}

ResponseCache::ResponseCache(std::string cache_dir) : dir_(std::move(cache_dir)) {
    if (dir_.empty()) throw ConfigError("cache directory must not be empty");
    std::filesystem::create_directories(dir_);
}

std::string ResponseCache::key(const std::string& model_name, const std::string& prompt,
                               double temperature, const std::string& template_version) {
    ordered_json obj;
    obj["model"] = model_name;
    obj["prompt"] = prompt;
    obj["temperature"] = temperature;
    obj["template_version"] = template_version;
    return sha256_hex(obj.dump());
}

std::string ResponseCache::path_for(const std::string& key) const {
    return dir_ + "/" + key + ".json";
}

std::optional<ResponseCache::Entry> ResponseCache::get(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buffer;
    buffer << in.rdbuf();
    json obj = json::parse(buffer.str(), nullptr, false);
    if (!obj.is_object() || !obj.contains("response_text")) return std::nullopt;  // corrupt: miss
    Entry entry;
    entry.response_text = obj["response_text"].get<std::string>();
    entry.prompt_tokens = obj.value("prompt_tokens", std::int64_t{0});
    entry.completion_tokens = obj.value("completion_tokens", std::int64_t{0});
    return entry;
}

void ResponseCache::put(const std::string& key, const Entry& entry) const {
    ordered_json obj;
    obj["response_text"] = entry.response_text;
    obj["prompt_tokens"] = entry.prompt_tokens;
    obj["completion_tokens"] = entry.completion_tokens;

    // Unique temp name + atomic rename so concurrent writers never interleave.
    static std::atomic<std::uint64_t> counter{0};
    std::string tmp = path_for(key) + ".tmp" + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write cache file: " + tmp);
        out << obj.dump();
    }
    std::filesystem::rename(tmp, path_for(key));
}

CompletionResult complete(const ModelEndpoint& endpoint, const std::string& prompt,
                          const PromptConfig& config, const ResponseCache* cache, bool offline,
                          bool bypass_cache) {
    std::string cache_key;
    if (cache != nullptr) {
        cache_key = ResponseCache::key(endpoint.model_name, prompt, endpoint.temperature,
                                       config.template_version);
        if (!bypass_cache) {
            if (auto entry = cache->get(cache_key)) {
                CompletionResult result;
                result.text = entry->response_text;
                result.usage.prompt_tokens = entry->prompt_tokens;
                result.usage.completion_tokens = entry->completion_tokens;
                result.usage.cost_usd = 0.0;
                result.usage.cache_hit = true;
                result.usage.requests = 0;
                return result;
            }
        }
    }
    if (offline) {
        throw TransportError("offline mode: response not in cache for model '" +
                             endpoint.model_name + "'");
    }

    httplib::Headers headers;
    if (!endpoint.api_key_env.empty()) {
        const char* key = std::getenv(endpoint.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw CredentialError("environment variable '" + endpoint.api_key_env +
                                  "' is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    ParsedUrl url = split_base_url(endpoint.base_url);
    httplib::Client client(url.host);
    client.set_connection_timeout(endpoint.timeout_s, 0);
    client.set_read_timeout(endpoint.timeout_s, 0);

    ordered_json body;
    body["model"] = endpoint.model_name;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = endpoint.temperature;
    std::string body_text = body.dump();

    int attempts = 0;
    std::string last_error;
    while (attempts < std::max(endpoint.max_retries, 1)) {
        if (attempts > 0) std::this_thread::sleep_for(retry_delay(attempts));
        ++attempts;
        auto res =
            client.Post(url.path + "/chat/completions", headers, body_text, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw CredentialError("authentication rejected (HTTP " + std::to_string(res->status) +
                                  ")");
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body);
        }

        json reply = json::parse(res->body, nullptr, false);
        if (!reply.is_object() || !reply.contains("choices") || reply["choices"].empty()) {
            throw TransportError("malformed completion response");
        }
        CompletionResult result;
        result.text = reply["choices"][0]["message"]["content"].get<std::string>();
        if (reply.contains("usage") && reply["usage"].is_object()) {
            result.usage.prompt_tokens = reply["usage"].value("prompt_tokens", std::int64_t{0});
            result.usage.completion_tokens =
                reply["usage"].value("completion_tokens", std::int64_t{0});
        }
        result.usage.cost_usd = request_cost_usd(endpoint, result.usage.prompt_tokens,
                                                 result.usage.completion_tokens);
        result.usage.cache_hit = false;
        result.usage.requests = attempts;
        if (cache != nullptr) {
            ResponseCache::Entry entry;
            entry.response_text = result.text;
            entry.prompt_tokens = result.usage.prompt_tokens;
            entry.completion_tokens = result.usage.completion_tokens;
            cache->put(cache_key, entry);
        }
        return result;
    }
    throw TransportError("retries exhausted after " + std::to_string(attempts) +
                         " attempt(s): " + last_error);
}

EvaluateResult evaluate_dataset(const Dataset& dataset, const ModelEndpoint& endpoint,
                                const ExampleSelector* examples, const EvaluateOptions& options) {
    if (options.prompt.shot_mode != ShotMode::Zero && examples == nullptr) {
        throw ConfigError("one-shot prompt mode requires an example selector");
    }

    // One task per request: (record) in multiple mode, (record, aspect) in
    // single mode.
    struct Task {
        std::size_t record_index;
        std::optional<Aspect> aspect;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (options.prompt.aspect_mode == AspectMode::Single) {
            for (Aspect a : kAllAspects) tasks.push_back({i, a});
        } else {
            tasks.push_back({i, std::nullopt});
        }
    }

    struct TaskResult {
        ParseOutcome outcome;
        UsageRecord usage;
        bool retried = false;
        bool transport_failed = false;
    };
    std::vector<TaskResult> results(tasks.size());

    std::atomic<std::size_t> next{0};
    std::mutex first_error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        while (true) {
            std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            {
                std::lock_guard<std::mutex> lock(first_error_mutex);
                if (first_error) return;  // fatal error elsewhere; drain quickly
            }
            const Task& task = tasks[t];
            TaskResult& slot = results[t];
            const ExplanationRecord& record = dataset.record(task.record_index);
            try {
                ShotExample example;
                const ShotExample* example_ptr = nullptr;
                if (options.prompt.shot_mode == ShotMode::OnePersonalized) {
                    example = examples->personalized(record.user_id, record.generator_id,
                                                     record.item_id);
                    example_ptr = &example;
                } else if (options.prompt.shot_mode == ShotMode::OneNonPersonalized) {
                    example = examples->non_personalized(record.generator_id);
                    example_ptr = &example;
                }
                std::string prompt = build_prompt(record, options.prompt, task.aspect, example_ptr);

                CompletionResult completion = complete(endpoint, prompt, options.prompt,
                                                       options.cache, options.offline);
                slot.usage = completion.usage;
                slot.outcome = parse_scores(completion.text, task.aspect);

                // A reply that produced no score at all earns one fresh
                // attempt that bypasses (and then overwrites) the cache.
                bool total_failure = true;
                for (Aspect a : kAllAspects) {
                    if (!slot.outcome.scores.at(a).is_null()) total_failure = false;
                }
                if (total_failure && !options.offline) {
                    slot.retried = true;
                    CompletionResult retry = complete(endpoint, prompt, options.prompt,
                                                      options.cache, options.offline,
                                                      /*bypass_cache=*/true);
                    slot.usage.prompt_tokens += retry.usage.prompt_tokens;
                    slot.usage.completion_tokens += retry.usage.completion_tokens;
                    slot.usage.cost_usd += retry.usage.cost_usd;
                    slot.usage.requests += retry.usage.requests;
                    slot.usage.cache_hit = false;
                    slot.outcome = parse_scores(retry.text, task.aspect);
                }
            } catch (const TransportError&) {
                // Scores stay null for this task; the run carries on.
                slot.transport_failed = true;
            } catch (...) {
                std::lock_guard<std::mutex> lock(first_error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int n_workers = std::max(1, options.concurrency);
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);

    // Deterministic reduction in task order: thread scheduling never touches
    // the table or the ledger.
    EvaluateResult out;
    out.column = ScoreColumn::empty(dataset.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        const Task& task = tasks[t];
        const TaskResult& slot = results[t];
        out.usage.add(slot.usage);
        if (slot.retried) ++out.parse_retries;
        AspectValues& cell = out.column.cells[task.record_index];
        if (task.aspect.has_value()) {
            const LikertScore& s = slot.outcome.scores.at(*task.aspect);
            if (!s.is_null()) {
                cell[static_cast<std::size_t>(*task.aspect)] = static_cast<double>(s.value());
            }
        } else {
            for (Aspect a : kAllAspects) {
                const LikertScore& s = slot.outcome.scores.at(a);
                if (!s.is_null()) {
                    cell[static_cast<std::size_t>(a)] = static_cast<double>(s.value());
                }
            }
        }
    }
    for (const AspectValues& cell : out.column.cells) {
        for (const auto& v : cell) {
            if (!v.has_value()) {
                ++out.records_failed;
                break;
            }
        }
    }
    return out;
}

ScoreColumn stub_scores(const Dataset& dataset, const StubSpec& spec) {
    ScoreColumn column = ScoreColumn::empty(dataset.size());
    if (spec.kind == StubSpec::Kind::Constant) {
        if (spec.constant_value < 1 || spec.constant_value > 5) {
            throw ConfigError("constant stub value must be in [1,5]");
        }
        for (auto& cell : column.cells) {
            for (auto& v : cell) v = static_cast<double>(spec.constant_value);
        }
        return column;
    }
    Rng rng(derive_seed(spec.seed, "stub-random"));
    for (auto& cell : column.cells) {
        for (auto& v : cell) v = static_cast<double>(1 + rng.uniform_index(5));
    }
    return column;
}

}  // namespace explaineval
