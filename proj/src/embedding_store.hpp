#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "inverted_index.hpp"  // ScoredDoc

namespace qoqa {

using Vector = std::vector<double>;

/// Inner product of two equal-length vectors.
double dense_score(const Vector& query_vec, const Vector& doc_vec);

/// Document embeddings keyed by doc id. Immutable after load; ids are kept
/// sorted so serialization is byte-identical for identical content.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    explicit EmbeddingStore(std::size_t dim) : dim_(dim) {}

    static EmbeddingStore load_jsonl(const std::string& path, std::size_t dim);

    void insert(const std::string& doc_id, Vector vec);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    bool empty() const { return vectors_.empty(); }
    bool contains(const std::string& doc_id) const { return vectors_.contains(doc_id); }

    /// nullptr when the document has no stored embedding.
    const Vector* find(const std::string& doc_id) const;

    /// Exhaustive top-n by inner product descending, ties by ascending doc id.
    /// Zero and negative scores are kept; fewer than n returned only when the
    /// store is smaller than n.
    std::vector<ScoredDoc> search(const Vector& query_vec, std::size_t n) const;

    std::string serialize() const;
    static EmbeddingStore deserialize(std::string_view bytes);
    void save(const std::string& path) const;
    static EmbeddingStore load(const std::string& path);

private:
    std::size_t dim_ = 0;
    std::map<std::string, Vector> vectors_;
};

}  // namespace qoqa
