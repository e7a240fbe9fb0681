#include "embedding_provider.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "common.hpp"

namespace qoqa {

using nlohmann::json;

MockEmbeddingProvider::MockEmbeddingProvider(std::size_t dim, uint64_t seed)
    : dim_(dim), seed_(seed) {
    if (dim_ < 1) {
        throw Error(ErrorCode::InvalidArgument, "mock provider: dim must be >= 1");
    }
}

Vector MockEmbeddingProvider::embed(const std::string& text) {
    if (text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "embed: text must be non-empty");
    }
    uint64_t state = fnv1a64(text) ^ (seed_ * 0x9e3779b97f4a7c15ull);
    Vector vec(dim_);
    for (auto& v : vec) {
        // 53 uniform bits mapped to [-1, 1); platform-independent.
        uint64_t bits = splitmix64(state) >> 11;
        v = static_cast<double>(bits) * (2.0 / 9007199254740992.0) - 1.0;
    }
    double norm = std::sqrt(dense_score(vec, vec));
    if (norm == 0.0) {
        vec[0] = 1.0;
        return vec;
    }
    for (auto& v : vec) v /= norm;
    return vec;
}

FileEmbeddingProvider::FileEmbeddingProvider(const std::string& path, std::size_t dim)
    : dim_(dim) {
    if (dim_ < 1) {
        throw Error(ErrorCode::InvalidArgument, "file provider: dim must be >= 1");
    }
    std::string contents = read_file(path);
    for_each_line(contents, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty()) return;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("text") ||
            !obj["text"].is_string() || !obj.contains("vector") ||
            !obj["vector"].is_array()) {
            throw Error::malformed_line(path, line_no,
                                        "expected {\"text\": ..., \"vector\": [...]}");
        }
        if (obj["vector"].size() != dim_) {
            throw Error(ErrorCode::DimensionMismatch,
                        path + ":" + std::to_string(line_no) + ": vector has " +
                            std::to_string(obj["vector"].size()) +
                            " components, expected " + std::to_string(dim_));
        }
        Vector vec;
        vec.reserve(dim_);
        for (const auto& v : obj["vector"]) vec.push_back(v.get<double>());
        by_text_[obj["text"].get<std::string>()] = std::move(vec);
    });
}

Vector FileEmbeddingProvider::embed(const std::string& text) {
    if (text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "embed: text must be non-empty");
    }
    auto it = by_text_.find(text);
    if (it == by_text_.end()) {
        throw Error(ErrorCode::ProviderUnavailable,
                    "no precomputed embedding for query text: \"" + text + "\"");
    }
    return it->second;
}

namespace {

// Global in-flight bound shared by every HttpEmbeddingProvider.
RequestBudget& embed_budget() {
    static RequestBudget budget;
    return budget;
}

}  // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpProviderConfig config, std::size_t dim)
    : config_(std::move(config)), dim_(dim) {
    if (dim_ < 1) {
        throw Error(ErrorCode::InvalidArgument, "http provider: dim must be >= 1");
    }
    if (config_.base_url.empty()) {
        throw Error(ErrorCode::InvalidArgument, "http provider: base url not configured");
    }
    embed_budget().configure(config_.max_concurrent);
}

Vector HttpEmbeddingProvider::embed(const std::string& text) {
    if (text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "embed: text must be non-empty");
    }
    std::string input = config_.apply_query_prefix ? kQueryPrefix + text : text;
    json request = {{"input", json::array({input})}};
    std::string body = request.dump();

    std::string last_failure;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100 * (1 << (attempt - 2))));
        }
        BudgetGuard guard(embed_budget());
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_seconds);
        client.set_read_timeout(config_.timeout_seconds);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto res = client.Post(config_.path, headers, body, "application/json");
        if (!res) {
            last_failure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_failure = "http status " + std::to_string(res->status);
            continue;
        }
        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("vectors") ||
            !reply["vectors"].is_array() || reply["vectors"].empty() ||
            !reply["vectors"][0].is_array()) {
            last_failure = "malformed response body";
            continue;
        }
        const auto& arr = reply["vectors"][0];
        if (arr.size() != dim_) {
            throw Error(ErrorCode::DimensionMismatch,
                        "embedding service returned " + std::to_string(arr.size()) +
                            " components, expected " + std::to_string(dim_));
        }
        Vector vec;
        vec.reserve(dim_);
        for (const auto& v : arr) vec.push_back(v.get<double>());
        return vec;
    }
    throw Error(ErrorCode::ProviderUnavailable,
                "embedding service unreachable after " +
                    std::to_string(config_.max_attempts) + " attempts (" + last_failure +
                    ")");
}

}  // namespace qoqa
