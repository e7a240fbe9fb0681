#include "alignment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "common.hpp"

namespace qoqa {

using nlohmann::json;

ScoreKind parse_score_kind(const std::string& name) {
    if (name == "bm25") return ScoreKind::Bm25;
    if (name == "dense") return ScoreKind::Dense;
    if (name == "hybrid") return ScoreKind::Hybrid;
    throw Error(ErrorCode::InvalidArgument,
                "unknown score kind \"" + name + "\" (expected bm25|dense|hybrid)");
}

const char* score_kind_name(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::Bm25: return "bm25";
        case ScoreKind::Dense: return "dense";
        case ScoreKind::Hybrid: return "hybrid";
    }
    return "unknown";
}

void AlignmentMode::validate() const {
    if (!std::isfinite(alpha)) {
        throw Error(ErrorCode::InvalidArgument, "alignment: alpha must be finite");
    }
}

double hybrid_score(double bm25, double dense, double alpha) {
    return alpha * bm25 + dense;
}

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("alignment: missing backend: ") + what);
    }
}

std::vector<ScoredDoc> retrieve_hybrid(const std::string& query, double alpha,
                                       std::size_t n, const AlignmentBackends& backends) {
    const InvertedIndex& index = *backends.sparse;
    const EmbeddingStore& store = *backends.store;

    Vector query_vec = backends.provider->embed(query);
    std::vector<ScoredDoc> sparse_hits = index.search(backends.bm25, query, n);
    std::vector<ScoredDoc> dense_hits = store.search(query_vec, n);

    std::set<std::string> pool;
    for (const auto& h : sparse_hits) pool.insert(h.doc_id);
    for (const auto& h : dense_hits) pool.insert(h.doc_id);

    TokenStream query_terms = tokenize(query);
    std::vector<ScoredDoc> fused;
    fused.reserve(pool.size());
    for (const auto& doc_id : pool) {
        // A document missing from one backend contributes 0 on that side.
        double bm25 = index.contains(doc_id)
                          ? index.bm25_score(backends.bm25, query_terms, doc_id)
                          : 0.0;
        double dense = 0.0;
        if (const Vector* doc_vec = store.find(doc_id)) {
            dense = dense_score(query_vec, *doc_vec);
        }
        fused.push_back(ScoredDoc{doc_id, hybrid_score(bm25, dense, alpha)});
    }
    std::sort(fused.begin(), fused.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (fused.size() > n) fused.resize(n);
    return fused;
}

}  // namespace

std::vector<ScoredDoc> retrieve(const std::string& query, const AlignmentMode& mode,
                                std::size_t n, const AlignmentBackends& backends) {
    mode.validate();
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "retrieve: n must be >= 1");
    }
    switch (mode.kind) {
        case ScoreKind::Bm25:
            require(backends.sparse != nullptr, "sparse index");
            return backends.sparse->search(backends.bm25, query, n);
        case ScoreKind::Dense:
            require(backends.store != nullptr, "embedding store");
            require(backends.provider != nullptr, "embedding provider");
            return backends.store->search(backends.provider->embed(query), n);
        case ScoreKind::Hybrid:
            require(backends.sparse != nullptr, "sparse index");
            require(backends.store != nullptr, "embedding store");
            require(backends.provider != nullptr, "embedding provider");
            return retrieve_hybrid(query, mode.alpha, n, backends);
    }
    throw Error(ErrorCode::Internal, "unreachable");
}

double alignment_score(const std::string& query, const AlignmentMode& mode,
                       std::size_t n, const AlignmentBackends& backends) {
    std::vector<ScoredDoc> hits = retrieve(query, mode, n, backends);
    if (hits.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& h : hits) sum += h.score;
    return sum / static_cast<double>(hits.size());
}

QueryBucket::QueryBucket(QueryBucketEntry original) {
    entries_.push_back(std::move(original));
}

bool QueryBucket::insert(QueryBucketEntry entry) {
    if (contains(entry.query_text)) return false;
    entries_.push_back(std::move(entry));
    return true;
}

bool QueryBucket::contains(const std::string& query_text) const {
    for (const auto& e : entries_) {
        if (e.query_text == query_text) return true;
    }
    return false;
}

double QueryBucket::best_score() const {
    double best = entries_.front().score;
    for (const auto& e : entries_) best = std::max(best, e.score);
    return best;
}

std::vector<QueryBucketEntry> QueryBucket::top_k(std::size_t k) const {
    if (k < 1) {
        throw Error(ErrorCode::InvalidArgument, "top_k: k must be >= 1");
    }
    std::vector<QueryBucketEntry> sorted = entries_;
    std::sort(sorted.begin(), sorted.end(),
              [](const QueryBucketEntry& a, const QueryBucketEntry& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.iteration != b.iteration) return a.iteration < b.iteration;
                  return a.query_text < b.query_text;
              });
    if (sorted.size() > k) sorted.resize(k);
    return sorted;
}

const QueryBucketEntry& QueryBucket::best() const {
    const QueryBucketEntry* best = &entries_.front();
    for (const auto& e : entries_) {
        if (e.score > best->score ||
            (e.score == best->score &&
             (e.iteration < best->iteration ||
              (e.iteration == best->iteration && e.query_text < best->query_text)))) {
            best = &e;
        }
    }
    return *best;
}

std::string QueryBucket::to_jsonl() const {
    std::string out;
    for (const auto& e : entries_) {
        json line = {{"text", e.query_text}, {"score", e.score}, {"iteration", e.iteration}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

}  // namespace qoqa
