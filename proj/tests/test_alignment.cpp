#include <doctest.h>

#include <cmath>
#include <random>

#include "alignment.hpp"
#include "common.hpp"
#include "oracles.hpp"

using namespace qoqa;

TEST_SUITE_BEGIN("alignment");

namespace {

/// Returns the same vector for every text.
class FixedProvider : public EmbeddingProvider {
public:
    explicit FixedProvider(Vector vec) : vec_(std::move(vec)) {}
    std::size_t dim() const override { return vec_.size(); }
    Vector embed(const std::string&) override { return vec_; }

private:
    Vector vec_;
};

const std::vector<Document> kToyCorpus = {
    {"d1", "", "cat sat"},
    {"d2", "", "dog ran"},
    {"d3", "", "cat dog"},
};

}  // namespace

TEST_CASE("hybrid score is alpha * bm25 + dense") {
    CHECK(hybrid_score(10.0, 0.5, 0.0) == 0.5);
    CHECK(hybrid_score(10.0, 0.5, 0.1) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(hybrid_score(7.25, 0.0, 1.0) == 7.25);
}

TEST_CASE("bm25 alignment over a single-document corpus is that document's score") {
    std::vector<Document> corpus = {{"d1", "", "cat sat on the mat"}};
    auto index = InvertedIndex::build(corpus);
    AlignmentBackends backends;
    backends.sparse = &index;

    AlignmentMode mode;  // bm25
    double expected = index.bm25_score(backends.bm25, tokenize("cat"), "d1");
    CHECK(alignment_score("cat", mode, 5, backends) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("bm25 alignment is the mean of the oracle's top scores") {
    auto index = InvertedIndex::build(kToyCorpus);
    AlignmentBackends backends;
    backends.sparse = &index;
    oracle::BruteForceBm25 ref(kToyCorpus);

    auto ranked = ref.rank("cat dog", backends.bm25.k1, backends.bm25.b);
    REQUIRE(ranked.size() >= 2);
    double expected = (ranked[0].second + ranked[1].second) / 2.0;

    AlignmentMode mode;
    CHECK(alignment_score("cat dog", mode, 2, backends) ==
          doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("bm25 alignment with no matching documents is zero") {
    auto index = InvertedIndex::build(kToyCorpus);
    AlignmentBackends backends;
    backends.sparse = &index;
    CHECK(alignment_score("wolf", AlignmentMode{}, 5, backends) == 0.0);
}

TEST_CASE("dense alignment averages inner products over the top-n") {
    EmbeddingStore store(2);
    store.insert("d1", {1, 0});
    store.insert("d2", {0, 1});
    FixedProvider provider({1, 0});

    AlignmentBackends backends;
    backends.store = &store;
    backends.provider = &provider;

    AlignmentMode mode;
    mode.kind = ScoreKind::Dense;
    CHECK(alignment_score("anything", mode, 2, backends) == 0.5);  // (1 + 0) / 2
}

TEST_CASE("hybrid retrieval fuses the union of both top-n lists") {
    auto index = InvertedIndex::build(kToyCorpus);
    EmbeddingStore store(2);
    store.insert("d1", {1, 0});
    store.insert("d2", {0, 1});
    store.insert("d3", {0.5, 0.5});
    FixedProvider provider({1, 0});

    AlignmentBackends backends;
    backends.sparse = &index;
    backends.store = &store;
    backends.provider = &provider;

    AlignmentMode mode;
    mode.kind = ScoreKind::Hybrid;
    mode.alpha = 0.1;

    auto hits = retrieve("cat", mode, 3, backends);
    REQUIRE(!hits.empty());
    TokenStream terms = tokenize("cat");
    for (const auto& h : hits) {
        double bm25 = index.bm25_score(backends.bm25, terms, h.doc_id);
        double dense = dense_score({1, 0}, *store.find(h.doc_id));
        CHECK(h.score == doctest::Approx(0.1 * bm25 + dense).epsilon(1e-12));
    }
    for (std::size_t i = 1; i < hits.size(); ++i) {
        CHECK(hits[i - 1].score >= hits[i].score);
    }
}

TEST_CASE("hybrid with alpha=0 scores candidates identically to dense mode") {
    std::mt19937_64 rng(31);
    auto docs = oracle::random_corpus(rng, 15);
    auto index = InvertedIndex::build(docs);
    EmbeddingStore store(4);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (const auto& d : docs) {
        Vector v(4);
        for (auto& c : v) c = coord(rng);
        store.insert(d.id, v);
    }
    MockEmbeddingProvider provider(4, 3);

    AlignmentBackends backends;
    backends.sparse = &index;
    backends.store = &store;
    backends.provider = &provider;

    AlignmentMode dense_mode;
    dense_mode.kind = ScoreKind::Dense;
    AlignmentMode hybrid_zero;
    hybrid_zero.kind = ScoreKind::Hybrid;
    hybrid_zero.alpha = 0.0;

    std::vector<std::string> candidates;
    for (int i = 0; i < 8; ++i) candidates.push_back(oracle::random_query(rng, 4));

    for (const auto& q : candidates) {
        double d = alignment_score(q, dense_mode, 3, backends);
        double h = alignment_score(q, hybrid_zero, 3, backends);
        CHECK(std::abs(d - h) < 1e-12);
    }
}

TEST_CASE("bucket keeps the original and dedupes by text") {
    QueryBucket bucket(QueryBucketEntry{"orig", 1.0, 0});
    CHECK(bucket.size() == 1);
    CHECK(bucket.original().query_text == "orig");

    CHECK(bucket.insert({"better", 2.0, 1}));
    CHECK(bucket.size() == 2);

    CHECK(!bucket.insert({"better", 5.0, 2}));  // duplicate text: unchanged
    CHECK(bucket.size() == 2);
    CHECK(bucket.best_score() == 2.0);

    CHECK(bucket.insert({"best", 3.0, 2}));
    CHECK(bucket.best().query_text == "best");
    CHECK(bucket.best_score() == 3.0);
}

TEST_CASE("bucket max never decreases under insertion") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> score(-5.0, 5.0);
    QueryBucket bucket(QueryBucketEntry{"orig", score(rng), 0});
    double running = bucket.best_score();
    for (int i = 1; i <= 100; ++i) {
        bucket.insert({"q" + std::to_string(i), score(rng), static_cast<std::size_t>(i)});
        CHECK(bucket.best_score() >= running);
        running = bucket.best_score();
    }
}

TEST_CASE("top_k ordering and tie rules") {
    QueryBucket bucket(QueryBucketEntry{"five", 5.0, 0});
    bucket.insert({"nine", 9.0, 1});
    bucket.insert({"seven", 7.0, 2});

    auto top2 = bucket.top_k(2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0].query_text == "nine");
    CHECK(top2[1].query_text == "seven");

    // Smaller bucket than k returns everything.
    QueryBucket small(QueryBucketEntry{"a", 1.0, 0});
    small.insert({"b", 2.0, 1});
    CHECK(small.top_k(3).size() == 2);

    // Equal scores: earlier iteration first, then lexicographic.
    QueryBucket ties(QueryBucketEntry{"zz", 1.0, 2});
    ties.insert({"aa", 1.0, 1});
    ties.insert({"mm", 1.0, 1});
    auto ordered = ties.top_k(3);
    CHECK(ordered[0].query_text == "aa");
    CHECK(ordered[1].query_text == "mm");
    CHECK(ordered[2].query_text == "zz");
}

TEST_CASE("top_k(k) is a prefix of top_k(k+1)") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> score(0.0, 10.0);
    std::uniform_int_distribution<std::size_t> iter(0, 5);
    QueryBucket bucket(QueryBucketEntry{"orig", score(rng), 0});
    for (int i = 0; i < 30; ++i) {
        bucket.insert({"q" + std::to_string(i), score(rng), iter(rng)});
    }
    for (std::size_t k = 1; k < bucket.size(); ++k) {
        auto a = bucket.top_k(k);
        auto b = bucket.top_k(k + 1);
        REQUIRE(a.size() == k);
        for (std::size_t i = 0; i < k; ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("bucket serializes one entry per line") {
    QueryBucket bucket(QueryBucketEntry{"orig", 1.5, 0});
    bucket.insert({"next", 2.5, 1});
    std::string jsonl = bucket.to_jsonl();
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 2);
    CHECK(jsonl.find("\"text\":\"orig\"") != std::string::npos);
    CHECK(jsonl.find("\"score\":2.5") != std::string::npos);
    CHECK(jsonl.find("\"iteration\":1") != std::string::npos);
}

TEST_CASE("alignment validates its inputs") {
    auto index = InvertedIndex::build(kToyCorpus);
    AlignmentBackends backends;
    backends.sparse = &index;
    CHECK_THROWS_AS(alignment_score("q", AlignmentMode{}, 0, backends), Error);

    AlignmentMode dense_mode;
    dense_mode.kind = ScoreKind::Dense;
    CHECK_THROWS_AS(alignment_score("q", dense_mode, 3, backends), Error);

    AlignmentMode bad;
    bad.alpha = std::nan("");
    CHECK_THROWS_AS(alignment_score("q", bad, 3, backends), Error);

    CHECK_THROWS_AS(parse_score_kind("nope"), Error);
    CHECK(parse_score_kind("hybrid") == ScoreKind::Hybrid);
}

TEST_SUITE_END();
