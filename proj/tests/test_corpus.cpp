#include <doctest.h>

#include <random>

#include "common.hpp"
#include "corpus.hpp"
#include "testutil.hpp"

using namespace qoqa;
using testutil::TempDir;

TEST_SUITE_BEGIN("corpus");

TEST_CASE("parse_corpus maps jsonl fields") {
    TempDir tmp;
    auto path = tmp.write("corpus.jsonl",
                          R"({"_id":"d1","title":"T","text":"body"})" "\n");
    auto docs = parse_corpus(path);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0] == Document{"d1", "T", "body"});
}

TEST_CASE("parse_corpus keeps file order, skips blank lines, ignores extras") {
    TempDir tmp;
    auto path = tmp.write("corpus.jsonl",
                          R"({"_id":"b","title":"","text":"second","extra":1})" "\n"
                          "\n"
                          R"({"_id":"a","title":"x","text":"first"})" "\n");
    auto docs = parse_corpus(path);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].id == "b");
    CHECK(docs[1].id == "a");
}

TEST_CASE("parse_corpus on empty file") {
    TempDir tmp;
    CHECK(parse_corpus(tmp.write("corpus.jsonl", "")).empty());
}

TEST_CASE("parse_corpus rejects duplicates and malformed lines") {
    TempDir tmp;
    auto dup = tmp.write("dup.jsonl",
                         R"({"_id":"d1","title":"","text":"x"})" "\n"
                         R"({"_id":"d1","title":"","text":"y"})" "\n");
    CHECK_THROWS_WITH_AS(parse_corpus(dup), doctest::Contains("d1"), Error);
    try {
        parse_corpus(dup);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateId);
    }

    auto bad = tmp.write("bad.jsonl", "{\"_id\":\"d1\"}\n");
    try {
        parse_corpus(bad);
        FAIL("expected MalformedLine");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedLine);
        CHECK(std::string(e.what()).find(":1") != std::string::npos);
    }

    auto notjson = tmp.write("notjson.jsonl", "{\"_id\":\"d1\"\n");
    CHECK_THROWS_AS(parse_corpus(notjson), Error);
}

TEST_CASE("parse_queries basics") {
    TempDir tmp;
    auto path = tmp.write("queries.jsonl",
                          R"({"_id":"q1","text":"what is the origin of COVID-19"})" "\n");
    auto queries = parse_queries(path);
    REQUIRE(queries.size() == 1);
    CHECK(queries[0] == QueryRecord{"q1", "what is the origin of COVID-19"});

    CHECK(parse_queries(tmp.write("empty.jsonl", "")).empty());

    auto missing = tmp.write("missing.jsonl", R"({"_id":"q1"})" "\n");
    try {
        parse_queries(missing);
        FAIL("expected MalformedLine");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedLine);
    }
}

TEST_CASE("parse_qrels basics") {
    TempDir tmp;
    auto path = tmp.write("qrels.tsv",
                          "query-id\tcorpus-id\tscore\n"
                          "q1\td7\t2\n");
    Qrels qrels = parse_qrels(path);
    CHECK(qrels.grade("q1", "d7") == 2);
    CHECK(qrels.grade("q1", "nope") == 0);
    CHECK(qrels.size() == 1);
}

TEST_CASE("parse_qrels header-only file is empty") {
    TempDir tmp;
    CHECK(parse_qrels(tmp.write("qrels.tsv", "query-id\tcorpus-id\tscore\n")).empty());
}

TEST_CASE("parse_qrels rejects non-integer and negative grades") {
    TempDir tmp;
    auto bad = tmp.write("bad.tsv",
                         "query-id\tcorpus-id\tscore\n"
                         "q1\td7\tx\n");
    try {
        parse_qrels(bad);
        FAIL("expected MalformedLine");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedLine);
    }

    auto neg = tmp.write("neg.tsv",
                         "query-id\tcorpus-id\tscore\n"
                         "q1\td7\t-1\n");
    CHECK_THROWS_AS(parse_qrels(neg), Error);
}

TEST_CASE("parse_qrels: later duplicate pair wins") {
    TempDir tmp;
    auto path = tmp.write("dup.tsv",
                          "query-id\tcorpus-id\tscore\n"
                          "q1\td7\t1\n"
                          "q1\td7\t2\n");
    CHECK(parse_qrels(path).grade("q1", "d7") == 2);
}

TEST_CASE("qrels grades are never negative") {
    TempDir tmp;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> grade(0, 3);
    std::string text = "query-id\tcorpus-id\tscore\n";
    for (int i = 0; i < 50; ++i) {
        text += "q" + std::to_string(i % 7) + "\td" + std::to_string(i) + "\t" +
                std::to_string(grade(rng)) + "\n";
    }
    Qrels qrels = parse_qrels(tmp.write("qrels.tsv", text));
    for (const auto& qid : qrels.query_ids()) {
        for (const auto& [_, g] : qrels.for_query(qid)) CHECK(g >= 0);
    }
}

TEST_CASE("corpus write-back round trip preserves fields exactly") {
    TempDir tmp;
    std::vector<Document> docs = {
        {"d1", "Title with \"quotes\"", "text\twith\ttabs"},
        {"d2", "", "unicode: caf\xc3\xa9 \xe2\x98\x83"},
        {"d3", "t", "line\\nescapes and trailing space "},
    };
    auto path = tmp.file("roundtrip.jsonl");
    write_corpus(path, docs);
    CHECK(parse_corpus(path) == docs);
}

TEST_SUITE_END();
