#include "rephraser.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "common.hpp"
#include "prompt.hpp"

namespace qoqa {

using nlohmann::json;

std::vector<std::string> MockEchoRephraser::rephrase(const std::string& prompt,
                                                     std::size_t count,
                                                     double /*temperature*/) {
    if (count < 1) {
        throw Error(ErrorCode::InvalidArgument, "rephrase: count must be >= 1");
    }
    std::string original = extract_original_query(prompt);
    if (original.empty()) original = "query";
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(original + " (v" + std::to_string(next_variant_++) + ")");
    }
    return out;
}

MockScriptedRephraser::MockScriptedRephraser(const std::string& script_path) {
    std::string text = read_file(script_path);
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty()) return;
        json arr = json::parse(line, nullptr, false);
        if (arr.is_discarded() || !arr.is_array()) {
            throw Error::malformed_line(script_path, line_no,
                                        "expected a JSON array of strings");
        }
        std::vector<std::string> entry;
        for (const auto& v : arr) {
            if (!v.is_string()) {
                throw Error::malformed_line(script_path, line_no, "non-string entry");
            }
            entry.push_back(v.get<std::string>());
        }
        script_.push_back(std::move(entry));
    });
}

MockScriptedRephraser::MockScriptedRephraser(std::vector<std::vector<std::string>> script)
    : script_(std::move(script)) {}

std::vector<std::string> MockScriptedRephraser::rephrase(const std::string& /*prompt*/,
                                                         std::size_t count,
                                                         double /*temperature*/) {
    if (count < 1) {
        throw Error(ErrorCode::InvalidArgument, "rephrase: count must be >= 1");
    }
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (int attempts = 0; attempts < 3 && out.size() < count; ++attempts) {
        if (next_line_ >= script_.size()) break;
        for (const auto& raw : script_[next_line_]) {
            std::string q = trim(raw);
            if (q.empty() || !seen.insert(q).second) continue;
            if (out.size() < count) out.push_back(std::move(q));
        }
        ++next_line_;
    }
    if (out.size() < count) {
        throw Error(ErrorCode::RephraserFailure,
                    "scripted rephraser exhausted: wanted " + std::to_string(count) +
                        ", produced " + std::to_string(out.size()));
    }
    return out;
}

namespace {

// Global in-flight bound shared by every LlmHttpRephraser.
RequestBudget& request_budget() {
    static RequestBudget budget;
    return budget;
}

}  // namespace

LlmHttpRephraser::LlmHttpRephraser(LlmRephraserConfig config)
    : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    "llm-http rephraser: base url not configured (QOQA_LLM_BASE_URL)");
    }
    request_budget().configure(config_.max_concurrent);
}

std::vector<std::string> LlmHttpRephraser::rephrase(const std::string& prompt,
                                                    std::size_t count,
                                                    double temperature) {
    if (count < 1) {
        throw Error(ErrorCode::InvalidArgument, "rephrase: count must be >= 1");
    }

    std::string content =
        prompt + "\nProvide exactly " + std::to_string(count) + " rephrased " +
        (count == 1 ? "query" : "queries") + ".\n";
    json request = {{"model", config_.model},
                    {"temperature", temperature},
                    {"messages", json::array({json{{"role", "user"}, {"content", content}}})}};
    std::string body = request.dump();

    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    std::string last_failure = "no usable lines";
    bool transport_failed = false;

    for (int attempt = 1; attempt <= config_.max_attempts && out.size() < count; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(std::chrono::milliseconds(200 * (1 << (attempt - 2))));
        }
        BudgetGuard guard(request_budget());
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_seconds);
        client.set_read_timeout(config_.timeout_seconds);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto res = client.Post("/chat/completions", headers, body, "application/json");
        if (!res) {
            transport_failed = true;
            last_failure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        transport_failed = false;
        if (res->status != 200) {
            last_failure = "http status " + std::to_string(res->status);
            continue;
        }
        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("choices") ||
            !reply["choices"].is_array() || reply["choices"].empty()) {
            last_failure = "malformed response body";
            continue;
        }
        const auto& message = reply["choices"][0]["message"];
        if (!message.is_object() || !message.contains("content") ||
            !message["content"].is_string()) {
            last_failure = "response missing message content";
            continue;
        }
        for (const auto& line : split_lines(message["content"].get<std::string>())) {
            std::string q = trim(line);
            if (q.empty() || !seen.insert(q).second) continue;
            if (out.size() < count) out.push_back(std::move(q));
        }
        last_failure = "only " + std::to_string(out.size()) + " usable lines";
    }

    if (out.size() < count) {
        if (transport_failed) {
            throw Error(ErrorCode::ProviderUnavailable,
                        "llm endpoint unreachable after " +
                            std::to_string(config_.max_attempts) + " attempts (" +
                            last_failure + ")");
        }
        throw Error(ErrorCode::RephraserFailure,
                    "rephraser returned too few queries after " +
                        std::to_string(config_.max_attempts) + " attempts (" + last_failure +
                        ")");
    }
    return out;
}

std::vector<std::string> RecordingRephraser::rephrase(const std::string& prompt,
                                                      std::size_t count,
                                                      double temperature) {
    prompts_.push_back(prompt);
    total_requested_ += count;
    return inner_.rephrase(prompt, count, temperature);
}

std::vector<std::string> RecordingRephraser::prompt_hashes() const {
    std::vector<std::string> hashes;
    hashes.reserve(prompts_.size());
    for (const auto& p : prompts_) hashes.push_back(hash_hex(p));
    return hashes;
}

}  // namespace qoqa
