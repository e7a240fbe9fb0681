#include "qoqa/qoqa.h"

#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "alignment.hpp"
#include "analyzer.hpp"
#include "common.hpp"
#include "corpus.hpp"
#include "inverted_index.hpp"
#include "ndcg.hpp"
#include "pipeline.hpp"
#include "settings.hpp"
#include "trec_run.hpp"

struct qoqa_config {
    qoqa::Settings settings;
};

struct qoqa_index {
    qoqa::InvertedIndex index;
};

struct qoqa_hits {
    std::vector<qoqa::ScoredDoc> hits;
};

namespace {

thread_local std::string g_last_error;

qoqa_status to_status(qoqa::ErrorCode code) {
    using qoqa::ErrorCode;
    switch (code) {
        case ErrorCode::Internal: return QOQA_ERR_INTERNAL;
        case ErrorCode::InvalidArgument: return QOQA_ERR_INVALID_ARGUMENT;
        case ErrorCode::Io: return QOQA_ERR_IO;
        case ErrorCode::MalformedLine: return QOQA_ERR_MALFORMED_LINE;
        case ErrorCode::DuplicateId: return QOQA_ERR_DUPLICATE_ID;
        case ErrorCode::DimensionMismatch: return QOQA_ERR_DIMENSION_MISMATCH;
        case ErrorCode::EmptyCorpus: return QOQA_ERR_EMPTY_CORPUS;
        case ErrorCode::EmptyStore: return QOQA_ERR_EMPTY_STORE;
        case ErrorCode::EmptyQrels: return QOQA_ERR_EMPTY_QRELS;
        case ErrorCode::UnknownDocument: return QOQA_ERR_UNKNOWN_DOCUMENT;
        case ErrorCode::ProviderUnavailable: return QOQA_ERR_PROVIDER_UNAVAILABLE;
        case ErrorCode::RephraserFailure: return QOQA_ERR_REPHRASER_FAILURE;
    }
    return QOQA_ERR_INTERNAL;
}

/// Runs fn, translating exceptions into status codes + the thread-local
/// error message.
template <typename Fn>
qoqa_status guarded(Fn&& fn) {
    try {
        fn();
        return QOQA_OK;
    } catch (const qoqa::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return QOQA_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return QOQA_ERR_INTERNAL;
    }
}

qoqa_status invalid(const char* message) {
    g_last_error = message;
    return QOQA_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* qoqa_version(void) {
    return "0.1.0";
}

const char* qoqa_last_error(void) {
    return g_last_error.c_str();
}

void qoqa_string_free(char* s) {
    std::free(s);
}

qoqa_status qoqa_config_new(qoqa_config** out) {
    if (!out) return invalid("config_new: out is NULL");
    *out = new qoqa_config();
    return QOQA_OK;
}

void qoqa_config_free(qoqa_config* config) {
    delete config;
}

qoqa_status qoqa_config_set(qoqa_config* config, const char* key, const char* value) {
    if (!config || !key || !value) return invalid("config_set: NULL argument");
    return guarded([&] { config->settings.set(key, value); });
}

qoqa_status qoqa_config_load_file(qoqa_config* config, const char* path) {
    if (!config || !path) return invalid("config_load_file: NULL argument");
    return guarded([&] { config->settings.load_file(path); });
}

qoqa_status qoqa_run_index(const qoqa_config* config) {
    if (!config) return invalid("run_index: config is NULL");
    return guarded([&] { qoqa::cmd_index(config->settings); });
}

qoqa_status qoqa_run_optimize(const qoqa_config* config, int32_t* failed_out) {
    if (!config) return invalid("run_optimize: config is NULL");
    return guarded([&] {
        std::size_t failed = qoqa::cmd_optimize(config->settings);
        if (failed_out) *failed_out = static_cast<int32_t>(failed);
    });
}

qoqa_status qoqa_run_evaluate(const qoqa_config* config, char** report_out) {
    if (!config) return invalid("run_evaluate: config is NULL");
    return guarded([&] {
        std::string report = qoqa::cmd_evaluate(config->settings);
        if (report_out) *report_out = dup_string(report);
    });
}

qoqa_status qoqa_run_report(const qoqa_config* config, char** report_out) {
    if (!config) return invalid("run_report: config is NULL");
    return guarded([&] {
        std::ostringstream sink;  // report goes to the caller, not stderr
        std::string report = qoqa::cmd_report(config->settings, sink);
        if (report_out) *report_out = dup_string(report);
    });
}

qoqa_status qoqa_index_build(const char* corpus_jsonl, qoqa_index** out) {
    if (!corpus_jsonl || !out) return invalid("index_build: NULL argument");
    return guarded([&] {
        auto docs = qoqa::parse_corpus(corpus_jsonl);
        *out = new qoqa_index{qoqa::InvertedIndex::build(docs)};
    });
}

qoqa_status qoqa_index_load(const char* path, qoqa_index** out) {
    if (!path || !out) return invalid("index_load: NULL argument");
    return guarded([&] { *out = new qoqa_index{qoqa::InvertedIndex::load(path)}; });
}

qoqa_status qoqa_index_save(const qoqa_index* index, const char* path) {
    if (!index || !path) return invalid("index_save: NULL argument");
    return guarded([&] { index->index.save(path); });
}

void qoqa_index_free(qoqa_index* index) {
    delete index;
}

int64_t qoqa_index_doc_count(const qoqa_index* index) {
    return index ? static_cast<int64_t>(index->index.total_docs()) : 0;
}

double qoqa_index_avg_doc_length(const qoqa_index* index) {
    return index ? index->index.avg_doc_length() : 0.0;
}

double qoqa_index_idf(const qoqa_index* index, const char* term) {
    if (!index || !term) return 0.0;
    qoqa::TokenStream terms = qoqa::tokenize(term);
    return index->index.idf(terms.empty() ? std::string() : terms.front());
}

qoqa_status qoqa_index_bm25_score(const qoqa_index* index, const char* query,
                                  const char* doc_id, double k1, double b,
                                  double* score_out) {
    if (!index || !query || !doc_id || !score_out) {
        return invalid("bm25_score: NULL argument");
    }
    return guarded([&] {
        qoqa::Bm25Params params{k1, b};
        *score_out = index->index.bm25_score(params, qoqa::tokenize(query), doc_id);
    });
}

qoqa_status qoqa_index_search(const qoqa_index* index, const char* query, int32_t n,
                              double k1, double b, qoqa_hits** out) {
    if (!index || !query || !out) return invalid("search: NULL argument");
    if (n < 1) return invalid("search: n must be >= 1");
    return guarded([&] {
        qoqa::Bm25Params params{k1, b};
        *out = new qoqa_hits{
            index->index.search(params, query, static_cast<std::size_t>(n))};
    });
}

void qoqa_hits_free(qoqa_hits* hits) {
    delete hits;
}

int32_t qoqa_hits_count(const qoqa_hits* hits) {
    return hits ? static_cast<int32_t>(hits->hits.size()) : 0;
}

const char* qoqa_hits_doc_id(const qoqa_hits* hits, int32_t i) {
    if (!hits || i < 0 || static_cast<std::size_t>(i) >= hits->hits.size()) return nullptr;
    return hits->hits[static_cast<std::size_t>(i)].doc_id.c_str();
}

double qoqa_hits_score(const qoqa_hits* hits, int32_t i) {
    if (!hits || i < 0 || static_cast<std::size_t>(i) >= hits->hits.size()) return 0.0;
    return hits->hits[static_cast<std::size_t>(i)].score;
}

qoqa_status qoqa_analyze(const char* text, char** terms_out) {
    if (!text || !terms_out) return invalid("analyze: NULL argument");
    return guarded([&] {
        qoqa::TokenStream terms = qoqa::tokenize(text);
        std::string joined;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (i > 0) joined += ' ';
            joined += terms[i];
        }
        *terms_out = dup_string(joined);
    });
}

qoqa_status qoqa_ndcg_at_k(const char* run_path, const char* qrels_path, int32_t k,
                           double* mean_out) {
    if (!run_path || !qrels_path || !mean_out) return invalid("ndcg: NULL argument");
    if (k < 1) return invalid("ndcg: k must be >= 1");
    return guarded([&] {
        qoqa::TrecRun run = qoqa::read_trec_run(run_path);
        qoqa::Qrels qrels = qoqa::parse_qrels(qrels_path);
        *mean_out = qoqa::ndcg_at_k(run, qrels, static_cast<std::size_t>(k)).mean;
    });
}

}  // extern "C"
