#pragma once

#include <iostream>
#include <memory>
#include <string>

#include "settings.hpp"

namespace qoqa {

/// Settings keys understood by the pipeline commands (flat key=value; CLI
/// flags map onto these 1:1):
///   corpus, queries, qrels, embeddings, query_embeddings  input paths
///   out            output directory (default "qoqa-out")
///   index          index directory (defaults to <out>)
///   score          bm25 | dense | hybrid        alpha, k1, b
///   n, k, r0, ri, iters, temperature, seed, expansion, patience,
///   doc_token_limit
///   rephraser      mock-echo | mock-scripted | llm-http
///   script         JSONL script for mock-scripted
///   model          llm model name
///   llm_base_url   overrides env QOQA_LLM_BASE_URL
///   provider       mock | file-lookup | http    provider_url, dim
///   final          sparse | dense (retriever used for evaluation)
///   union          merge original+best rankings in the evaluated run
///   jobs           worker threads for optimize/evaluate
///   runs           report input, "name=path;name=path;..."
///   optimized      optimized-queries file (report summary)

/// Builds and persists the retrieval artifacts: <index>/sparse.idx from the
/// corpus and, when embeddings are given, <index>/dense.vec. Re-running
/// produces byte-identical artifacts.
void cmd_index(const Settings& settings, std::ostream& log = std::cerr);

/// Runs the rephrasing loop for every query, appending one JSONL row per
/// query to <out>/optimized.jsonl and a trace per query under <out>/traces/.
/// Ids already present in the output are skipped (resume). Returns the number
/// of queries that failed; their errors are logged and the run continues.
std::size_t cmd_optimize(const Settings& settings, std::ostream& log = std::cerr);

/// Retrieves top-10 with the final retriever for original and optimized
/// queries, writes both runs and a comparison report, and returns the report
/// text.
std::string cmd_evaluate(const Settings& settings, std::ostream& log = std::cerr);

/// Scores named runs against qrels and renders the comparison table; with an
/// `optimized` file, also summarizes alignment-score deltas.
std::string cmd_report(const Settings& settings, std::ostream& log = std::cerr);

}  // namespace qoqa
