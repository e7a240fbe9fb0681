#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alignment.hpp"
#include "corpus.hpp"
#include "prompt.hpp"
#include "rephraser.hpp"

namespace qoqa {

struct OptimizerConfig {
    std::size_t n_docs = 5;       // N: retrieval depth / documents in the prompt
    std::size_t top_k = 3;        // K: scored rephrasings shown in the prompt
    std::size_t r_initial = 3;    // R0: rephrasings requested up front
    std::size_t r_step = 1;       // Ri: rephrasings requested per iteration
    std::size_t max_iters = 50;
    AlignmentMode mode;
    double temperature = 1.0;
    bool expansion_enabled = true;
    uint64_t seed = 0;
    std::size_t doc_token_limit = 512;
    std::size_t patience = 0;  // 0 disables early stopping

    void validate() const;
};

struct OptimizationResult {
    std::string best_query;
    double best_score = 0.0;
    QueryBucket trace;
    std::size_t iterations_run = 0;
};

/// Observer invoked as the run progresses; used to stream trace lines.
struct OptimizeHooks {
    std::function<void(const QueryBucketEntry&)> on_entry;
    std::function<void(std::size_t iteration, const std::string& prompt)> on_prompt;
};

/// One full score-guided rephrasing run for a single query: retrieve the
/// pinned top-N documents, seed the bucket with the original, request R0
/// rephrasings, then one batch of Ri per iteration, scoring everything and
/// keeping the argmax. The best score can never fall below the original's.
OptimizationResult optimize_query(const QueryRecord& query, const OptimizerConfig& config,
                                  const AlignmentBackends& backends,
                                  const std::vector<Document>& corpus,
                                  Rephraser& rephraser, const OptimizeHooks& hooks = {});

}  // namespace qoqa
