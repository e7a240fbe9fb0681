/* qoqa — score-guided query rephrasing and retrieval toolkit.
 *
 * C API over the C++ core: opaque handles, integer status codes, and a
 * per-thread error message. Every function that can fail returns a
 * qoqa_status; on failure qoqa_last_error() describes what went wrong.
 * Handles are freed with their matching *_free function; out-parameters are
 * only written on QOQA_OK.
 */

#ifndef QOQA_H
#define QOQA_H

#include <stdint.h>

#if defined(_WIN32)
#define QOQA_API __declspec(dllexport)
#else
#define QOQA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qoqa_status {
    QOQA_OK = 0,
    QOQA_ERR_INTERNAL = 1,
    QOQA_ERR_INVALID_ARGUMENT = 2,
    QOQA_ERR_IO = 3,
    QOQA_ERR_MALFORMED_LINE = 4,
    QOQA_ERR_DUPLICATE_ID = 5,
    QOQA_ERR_DIMENSION_MISMATCH = 6,
    QOQA_ERR_EMPTY_CORPUS = 7,
    QOQA_ERR_EMPTY_STORE = 8,
    QOQA_ERR_EMPTY_QRELS = 9,
    QOQA_ERR_UNKNOWN_DOCUMENT = 10,
    QOQA_ERR_PROVIDER_UNAVAILABLE = 11,
    QOQA_ERR_REPHRASER_FAILURE = 12,
} qoqa_status;

/* Library version, e.g. "0.1.0". Static storage; do not free. */
QOQA_API const char* qoqa_version(void);

/* Message for the most recent failure on this thread. Valid until the next
 * failing call on the same thread. Never NULL. */
QOQA_API const char* qoqa_last_error(void);

/* Frees strings returned through char** out-parameters. */
QOQA_API void qoqa_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

/* Flat key=value settings driving the pipeline commands. Keys mirror the
 * CLI flags: corpus, queries, qrels, embeddings, out, index, score, alpha,
 * k1, b, n, k, r0, ri, iters, temperature, seed, expansion, rephraser,
 * script, model, provider, final, union, jobs, runs, optimized, ... */
typedef struct qoqa_config qoqa_config;

QOQA_API qoqa_status qoqa_config_new(qoqa_config** out);
QOQA_API void qoqa_config_free(qoqa_config* config);
QOQA_API qoqa_status qoqa_config_set(qoqa_config* config, const char* key,
                                     const char* value);
/* Loads `key = value` lines; '#' starts a comment. Later qoqa_config_set
 * calls override file values. */
QOQA_API qoqa_status qoqa_config_load_file(qoqa_config* config, const char* path);

/* ---- pipeline commands ------------------------------------------------ */

/* Builds and persists the sparse index (and dense store when embeddings are
 * configured). Deterministic: re-running writes identical bytes. */
QOQA_API qoqa_status qoqa_run_index(const qoqa_config* config);

/* Optimizes every query, appending to <out>/optimized.jsonl (resumable: ids
 * already present are skipped). Per-query failures do not abort the run;
 * *failed_out (optional) receives the failure count. */
QOQA_API qoqa_status qoqa_run_optimize(const qoqa_config* config, int32_t* failed_out);

/* Retrieves with original and optimized queries, writes TREC runs and the
 * comparison report. *report_out (optional) receives the report text; free
 * with qoqa_string_free. */
QOQA_API qoqa_status qoqa_run_evaluate(const qoqa_config* config, char** report_out);

/* Scores named runs against qrels and/or summarizes an optimized-queries
 * file. *report_out receives the text; free with qoqa_string_free. */
QOQA_API qoqa_status qoqa_run_report(const qoqa_config* config, char** report_out);

/* ---- sparse index ------------------------------------------------------ */

typedef struct qoqa_index qoqa_index;
typedef struct qoqa_hits qoqa_hits;

/* Builds an index from a BEIR corpus.jsonl file. */
QOQA_API qoqa_status qoqa_index_build(const char* corpus_jsonl, qoqa_index** out);
QOQA_API qoqa_status qoqa_index_load(const char* path, qoqa_index** out);
QOQA_API qoqa_status qoqa_index_save(const qoqa_index* index, const char* path);
QOQA_API void qoqa_index_free(qoqa_index* index);

QOQA_API int64_t qoqa_index_doc_count(const qoqa_index* index);
QOQA_API double qoqa_index_avg_doc_length(const qoqa_index* index);
/* log((N - n + 0.5) / (n + 0.5)); n = 0 for unseen terms. The term is
 * analyzed first; a term that analyzes to nothing yields the n = 0 value. */
QOQA_API double qoqa_index_idf(const qoqa_index* index, const char* term);

QOQA_API qoqa_status qoqa_index_bm25_score(const qoqa_index* index, const char* query,
                                           const char* doc_id, double k1, double b,
                                           double* score_out);

/* Top-n by BM25, ties by ascending doc id; zero-scoring documents omitted. */
QOQA_API qoqa_status qoqa_index_search(const qoqa_index* index, const char* query,
                                       int32_t n, double k1, double b, qoqa_hits** out);

QOQA_API void qoqa_hits_free(qoqa_hits* hits);
QOQA_API int32_t qoqa_hits_count(const qoqa_hits* hits);
/* Pointer owned by the hits handle; valid until qoqa_hits_free. NULL when i
 * is out of range. */
QOQA_API const char* qoqa_hits_doc_id(const qoqa_hits* hits, int32_t i);
QOQA_API double qoqa_hits_score(const qoqa_hits* hits, int32_t i);

/* ---- analysis & evaluation --------------------------------------------- */

/* Analyzer output (lowercase, stopword-filtered, stemmed) joined by single
 * spaces. *terms_out is freed with qoqa_string_free. */
QOQA_API qoqa_status qoqa_analyze(const char* text, char** terms_out);

/* Mean nDCG@k of a TREC run file against a BEIR qrels TSV. */
QOQA_API qoqa_status qoqa_ndcg_at_k(const char* run_path, const char* qrels_path,
                                    int32_t k, double* mean_out);

#ifdef __cplusplus
}
#endif

#endif /* QOQA_H */
