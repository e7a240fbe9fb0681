// Exercises the shared-library surface the way an external client would:
// through qoqa/qoqa.h only, never the C++ headers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "qoqa/qoqa.h"

TEST_SUITE_BEGIN("capi");

namespace {

class Scratch {
public:
    Scratch() {
        std::random_device rd;
        dir_ = std::filesystem::temp_directory_path() /
               ("qoqa-capi-" + std::to_string(rd()));
        std::filesystem::create_directories(dir_);
    }
    ~Scratch() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    std::string file(const std::string& name) const { return (dir_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream out(file(name), std::ios::binary);
        out << text;
        return file(name);
    }

private:
    std::filesystem::path dir_;
};

const char* kCorpus =
    "{\"_id\":\"d1\",\"title\":\"\",\"text\":\"cat sat mat whiskers\"}\n"
    "{\"_id\":\"d2\",\"title\":\"\",\"text\":\"dog ran park\"}\n"
    "{\"_id\":\"d3\",\"title\":\"\",\"text\":\"cat dog pets\"}\n";

}  // namespace

TEST_CASE("version and error message basics") {
    CHECK(std::strlen(qoqa_version()) > 0);
    CHECK(qoqa_last_error() != nullptr);
}

TEST_CASE("index build, stats, search and persistence") {
    Scratch tmp;
    auto corpus = tmp.write("corpus.jsonl", kCorpus);

    qoqa_index* index = nullptr;
    REQUIRE(qoqa_index_build(corpus.c_str(), &index) == QOQA_OK);
    CHECK(qoqa_index_doc_count(index) == 3);
    CHECK(qoqa_index_avg_doc_length(index) > 0.0);

    // idf of a term present in 2 of 3 docs: log(1.5/2.5) < 0.
    CHECK(qoqa_index_idf(index, "cat") == doctest::Approx(-0.5108256237659907));
    CHECK(qoqa_index_idf(index, "unseen") == doctest::Approx(1.9459101490553132));

    double score = 0.0;
    REQUIRE(qoqa_index_bm25_score(index, "whiskers mat", "d1", 1.2, 0.75, &score) ==
            QOQA_OK);
    CHECK(score > 0.0);
    CHECK(qoqa_index_bm25_score(index, "cat", "zzz", 1.2, 0.75, &score) ==
          QOQA_ERR_UNKNOWN_DOCUMENT);

    qoqa_hits* hits = nullptr;
    REQUIRE(qoqa_index_search(index, "whiskers mat", 5, 1.2, 0.75, &hits) == QOQA_OK);
    REQUIRE(qoqa_hits_count(hits) >= 1);
    CHECK(std::string(qoqa_hits_doc_id(hits, 0)) == "d1");
    CHECK(qoqa_hits_score(hits, 0) > 0.0);
    CHECK(qoqa_hits_doc_id(hits, 99) == nullptr);
    qoqa_hits_free(hits);

    auto saved = tmp.file("sparse.idx");
    REQUIRE(qoqa_index_save(index, saved.c_str()) == QOQA_OK);
    qoqa_index* loaded = nullptr;
    REQUIRE(qoqa_index_load(saved.c_str(), &loaded) == QOQA_OK);
    CHECK(qoqa_index_doc_count(loaded) == 3);
    qoqa_index_free(loaded);
    qoqa_index_free(index);
}

TEST_CASE("errors carry codes and messages") {
    qoqa_index* index = nullptr;
    CHECK(qoqa_index_build("/nonexistent/corpus.jsonl", &index) == QOQA_ERR_IO);
    CHECK(std::strlen(qoqa_last_error()) > 0);

    Scratch tmp;
    auto dup = tmp.write("dup.jsonl",
                         "{\"_id\":\"d1\",\"title\":\"\",\"text\":\"x\"}\n"
                         "{\"_id\":\"d1\",\"title\":\"\",\"text\":\"y\"}\n");
    CHECK(qoqa_index_build(dup.c_str(), &index) == QOQA_ERR_DUPLICATE_ID);

    auto empty = tmp.write("empty.jsonl", "");
    CHECK(qoqa_index_build(empty.c_str(), &index) == QOQA_ERR_EMPTY_CORPUS);

    CHECK(qoqa_index_build(nullptr, &index) == QOQA_ERR_INVALID_ARGUMENT);
    CHECK(qoqa_config_set(nullptr, "a", "b") == QOQA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("analyzer surface") {
    char* terms = nullptr;
    REQUIRE(qoqa_analyze("The cat SAT on nano-sized biomaterials.", &terms) == QOQA_OK);
    CHECK(std::string(terms) == "cat sat nano size biomateri");
    qoqa_string_free(terms);
}

TEST_CASE("full pipeline through the config handle") {
    Scratch tmp;
    auto corpus = tmp.write("corpus.jsonl", kCorpus);
    auto queries = tmp.write("queries.jsonl",
                             "{\"_id\":\"q1\",\"text\":\"whiskers mat\"}\n"
                             "{\"_id\":\"q2\",\"text\":\"park ran\"}\n");
    auto qrels = tmp.write("qrels.tsv",
                           "query-id\tcorpus-id\tscore\n"
                           "q1\td1\t1\n"
                           "q2\td2\t1\n");

    qoqa_config* config = nullptr;
    REQUIRE(qoqa_config_new(&config) == QOQA_OK);
    auto set = [&](const char* k, const std::string& v) {
        REQUIRE(qoqa_config_set(config, k, v.c_str()) == QOQA_OK);
    };
    set("corpus", corpus);
    set("queries", queries);
    set("qrels", qrels);
    set("out", tmp.file("out"));
    set("iters", "2");

    REQUIRE(qoqa_run_index(config) == QOQA_OK);

    int32_t failed = -1;
    REQUIRE(qoqa_run_optimize(config, &failed) == QOQA_OK);
    CHECK(failed == 0);

    char* report = nullptr;
    REQUIRE(qoqa_run_evaluate(config, &report) == QOQA_OK);
    REQUIRE(report != nullptr);
    CHECK(std::string(report).find("original") != std::string::npos);
    qoqa_string_free(report);

    // nDCG of the emitted original run against the qrels.
    double mean = 0.0;
    REQUIRE(qoqa_ndcg_at_k(tmp.file("out/runs/original.trec").c_str(), qrels.c_str(), 10,
                           &mean) == QOQA_OK);
    CHECK(mean > 0.0);
    CHECK(mean <= 1.0);

    // Report over the two emitted runs.
    set("runs", "original=" + tmp.file("out/runs/original.trec") +
                    ";qoqa=" + tmp.file("out/runs/qoqa.trec"));
    set("optimized", tmp.file("out/optimized.jsonl"));
    char* text = nullptr;
    REQUIRE(qoqa_run_report(config, &text) == QOQA_OK);
    REQUIRE(text != nullptr);
    CHECK(std::string(text).find("optimized queries: 2") != std::string::npos);
    qoqa_string_free(text);

    qoqa_config_free(config);
}

TEST_CASE("config file loading through the c api") {
    Scratch tmp;
    auto conf = tmp.write("qoqa.conf", "iters = 3\nscore = bm25\n");
    qoqa_config* config = nullptr;
    REQUIRE(qoqa_config_new(&config) == QOQA_OK);
    CHECK(qoqa_config_load_file(config, conf.c_str()) == QOQA_OK);
    CHECK(qoqa_config_load_file(config, "/nonexistent.conf") == QOQA_ERR_IO);
    qoqa_config_free(config);
}

TEST_SUITE_END();
