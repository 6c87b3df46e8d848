#pragma once
// In-process chat-completions server with scripted failures, a request
// ledger, and an in-flight high-water mark for concurrency assertions.

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace testsupport {

class MockLlmServer {
public:
    // Maps the received prompt to the reply text.
    using Responder = std::function<std::string(const std::string& prompt)>;

    MockLlmServer() {
        server_.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         handle(req, res);
                     });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockLlmServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string base_url() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
    }

    // A reply that satisfies both prompt modes: one labelled line per aspect.
    static std::string conforming_reply() {
        return "Persuasiveness: 4\nTransparency: 5\nAccuracy: 3\nSatisfaction: 4";
    }

    void set_responder(Responder responder) {
        std::lock_guard<std::mutex> lock(mutex_);
        responder_ = std::move(responder);
    }

    // The next `n` requests fail with `status` before normal handling resumes.
    void fail_next(int n, int status = 500) {
        fail_remaining_ = n;
        fail_status_ = status;
    }

    // Require this exact Authorization header; anything else gets 401.
    void require_auth(const std::string& header_value) {
        std::lock_guard<std::mutex> lock(mutex_);
        required_auth_ = header_value;
    }

    // Reply body sent verbatim (bypasses the completion JSON envelope).
    void set_raw_body(const std::string& body, int status = 200) {
        std::lock_guard<std::mutex> lock(mutex_);
        raw_body_ = body;
        raw_status_ = status;
        raw_mode_ = true;
    }

    void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }

    int request_count() const { return request_count_.load(); }
    int max_in_flight() const { return max_in_flight_.load(); }

    std::vector<std::string> prompts() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return prompts_;
    }

    std::vector<std::chrono::steady_clock::time_point> request_times() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return request_times_;
    }

    // Deterministic token accounting used by every reply envelope.
    static std::int64_t prompt_tokens_for(const std::string& prompt) {
        return static_cast<std::int64_t>(prompt.size());
    }
    static std::int64_t completion_tokens_for(const std::string& reply) {
        return static_cast<std::int64_t>(reply.size());
    }

private:
    void handle(const httplib::Request& req, httplib::Response& res) {
        int in_flight = in_flight_.fetch_add(1) + 1;
        int seen = max_in_flight_.load();
        while (in_flight > seen && !max_in_flight_.compare_exchange_weak(seen, in_flight)) {
        }
        request_count_.fetch_add(1);

        if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

        std::string prompt;
        auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_object() && body.contains("messages") && !body["messages"].empty()) {
            prompt = body["messages"][0].value("content", "");
        }

        Responder responder;
        std::string required_auth;
        bool raw_mode = false;
        std::string raw_body;
        int raw_status = 200;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            prompts_.push_back(prompt);
            request_times_.push_back(std::chrono::steady_clock::now());
            responder = responder_;
            required_auth = required_auth_;
            raw_mode = raw_mode_;
            raw_body = raw_body_;
            raw_status = raw_status_;
        }

        int remaining = fail_remaining_.load();
        while (remaining > 0 &&
               !fail_remaining_.compare_exchange_weak(remaining, remaining - 1)) {
        }
        if (remaining > 0) {
            res.status = fail_status_.load();
            res.set_content("{\"error\":\"scripted failure\"}", "application/json");
            in_flight_.fetch_sub(1);
            return;
        }

        if (!required_auth.empty() && req.get_header_value("Authorization") != required_auth) {
            res.status = 401;
            res.set_content("{\"error\":\"unauthorized\"}", "application/json");
            in_flight_.fetch_sub(1);
            return;
        }

        if (raw_mode) {
            res.status = raw_status;
            res.set_content(raw_body, "application/json");
            in_flight_.fetch_sub(1);
            return;
        }

        std::string reply = responder ? responder(prompt) : conforming_reply();
        nlohmann::json envelope = {
            {"id", "mock-1"},
            {"object", "chat.completion"},
            {"choices",
             nlohmann::json::array(
                 {{{"index", 0},
                   {"message", {{"role", "assistant"}, {"content", reply}}},
                   {"finish_reason", "stop"}}})},
            {"usage",
             {{"prompt_tokens", prompt_tokens_for(prompt)},
              {"completion_tokens", completion_tokens_for(reply)},
              {"total_tokens", prompt_tokens_for(prompt) + completion_tokens_for(reply)}}},
        };
        res.status = 200;
        res.set_content(envelope.dump(), "application/json");
        in_flight_.fetch_sub(1);
    }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;

    mutable std::mutex mutex_;
    Responder responder_;
    std::string required_auth_;
    bool raw_mode_ = false;
    std::string raw_body_;
    int raw_status_ = 200;
    std::vector<std::string> prompts_;
    std::vector<std::chrono::steady_clock::time_point> request_times_;

    std::chrono::milliseconds latency_{0};
    std::atomic<int> fail_remaining_{0};
    std::atomic<int> fail_status_{500};
    std::atomic<int> request_count_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
};

}  // namespace testsupport
