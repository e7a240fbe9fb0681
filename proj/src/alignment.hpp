#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "embedding_provider.hpp"
#include "embedding_store.hpp"
#include "inverted_index.hpp"

namespace qoqa {

enum class ScoreKind { Bm25, Dense, Hybrid };

ScoreKind parse_score_kind(const std::string& name);
const char* score_kind_name(ScoreKind kind);

struct AlignmentMode {
    ScoreKind kind = ScoreKind::Bm25;
    double alpha = 0.1;  // hybrid mixing weight

    void validate() const;
};

/// alpha * bm25 + dense.
double hybrid_score(double bm25, double dense, double alpha);

/// The retrieval backends an alignment computation may touch. Pointers may be
/// null when the mode does not need them.
struct AlignmentBackends {
    const InvertedIndex* sparse = nullptr;
    const EmbeddingStore* store = nullptr;
    EmbeddingProvider* provider = nullptr;
    Bm25Params bm25;
};

/// Top-n retrieval under the mode's retriever. bm25 -> sparse index;
/// dense -> embedding store; hybrid -> union of both top-n lists re-scored
/// as alpha * bm25 + dense, top-n kept. Ties break by ascending doc id.
std::vector<ScoredDoc> retrieve(const std::string& query, const AlignmentMode& mode,
                                std::size_t n, const AlignmentBackends& backends);

/// Mean of the mode's per-document scores over the query's top-n retrieved
/// documents; 0 when nothing scores.
double alignment_score(const std::string& query, const AlignmentMode& mode,
                       std::size_t n, const AlignmentBackends& backends);

struct QueryBucketEntry {
    std::string query_text;
    double score = 0.0;
    std::size_t iteration = 0;

    bool operator==(const QueryBucketEntry&) const = default;
};

/// Ledger of scored query rephrasings. The original query is entry zero and
/// is always present; texts are unique (first occurrence kept).
class QueryBucket {
public:
    explicit QueryBucket(QueryBucketEntry original);

    /// Appends unless the text is already present. Returns true on insert.
    bool insert(QueryBucketEntry entry);

    bool contains(const std::string& query_text) const;
    std::size_t size() const { return entries_.size(); }
    const QueryBucketEntry& original() const { return entries_.front(); }
    const std::vector<QueryBucketEntry>& entries() const { return entries_; }

    /// Highest score over all entries; never decreases under insert.
    double best_score() const;

    /// The k highest-scoring entries, descending; ties by earlier iteration,
    /// then lexicographic text. Fewer than k when the bucket is smaller.
    std::vector<QueryBucketEntry> top_k(std::size_t k) const;

    const QueryBucketEntry& best() const;

    std::string to_jsonl() const;

private:
    std::vector<QueryBucketEntry> entries_;
};

}  // namespace qoqa
