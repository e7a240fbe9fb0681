#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>

#include "embedding_store.hpp"

namespace qoqa {

/// Query prefix the bge family of embedding models expects at query time.
/// Stored document vectors are prefix-free; the prefix is applied here.
inline constexpr const char* kQueryPrefix =
    "Represent this sentence for searching relevant passages: ";

/// Source of query embeddings. Implementations must return vectors of
/// exactly dim() components.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::size_t dim() const = 0;
    virtual Vector embed(const std::string& text) = 0;
};

/// Deterministic test/offline provider: unit vector derived from a hash of
/// the text (and seed). Same text always maps to the same vector.
class MockEmbeddingProvider : public EmbeddingProvider {
public:
    MockEmbeddingProvider(std::size_t dim, uint64_t seed = 0);

    std::size_t dim() const override { return dim_; }
    Vector embed(const std::string& text) override;

private:
    std::size_t dim_;
    uint64_t seed_;
};

/// Looks up precomputed query vectors by exact text from a JSONL file of
/// {"text": ..., "vector": [...]} records. Unknown text is an error.
class FileEmbeddingProvider : public EmbeddingProvider {
public:
    FileEmbeddingProvider(const std::string& path, std::size_t dim);

    std::size_t dim() const override { return dim_; }
    Vector embed(const std::string& text) override;

private:
    std::size_t dim_;
    std::unordered_map<std::string, Vector> by_text_;
};

struct HttpProviderConfig {
    std::string base_url;          // e.g. http://localhost:8080
    std::string path = "/embed";   // POST target
    std::string api_key;           // sent as a bearer token when non-empty
    bool apply_query_prefix = true;
    int max_attempts = 3;
    int timeout_seconds = 30;
    int max_concurrent = 4;  // global in-flight bound shared by all instances
};

/// Remote embedding service. Request {"input": [text]}, response
/// {"vectors": [[...]]}. The query prefix is prepended before the request.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(HttpProviderConfig config, std::size_t dim);

    std::size_t dim() const override { return dim_; }
    Vector embed(const std::string& text) override;

private:
    HttpProviderConfig config_;
    std::size_t dim_;
};

}  // namespace qoqa
