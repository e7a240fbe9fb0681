#include "optimizer.hpp"

#include <unordered_map>

#include "common.hpp"

namespace qoqa {

void OptimizerConfig::validate() const {
    if (n_docs < 1 || top_k < 1 || r_initial < 1 || r_step < 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "optimizer: n, k, r0 and ri must all be >= 1");
    }
    if (max_iters < 1) {
        throw Error(ErrorCode::InvalidArgument, "optimizer: iters must be >= 1");
    }
    if (!(temperature >= 0.0 && temperature <= 2.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "optimizer: temperature must be in [0, 2]");
    }
    if (doc_token_limit < 1) {
        throw Error(ErrorCode::InvalidArgument, "optimizer: doc token limit must be >= 1");
    }
    mode.validate();
}

OptimizationResult optimize_query(const QueryRecord& query, const OptimizerConfig& config,
                                  const AlignmentBackends& backends,
                                  const std::vector<Document>& corpus,
                                  Rephraser& rephraser, const OptimizeHooks& hooks) {
    config.validate();
    if (query.text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "optimize: query text must be non-empty");
    }

    // Documents shown in the prompt are pinned to the original query's top-N
    // for the whole run; rephrased candidates are scored against their own
    // retrievals inside alignment_score.
    std::vector<Document> prompt_docs;
    if (config.expansion_enabled) {
        std::unordered_map<std::string, const Document*> by_id;
        by_id.reserve(corpus.size());
        for (const auto& d : corpus) by_id.emplace(d.id, &d);
        for (const auto& hit : retrieve(query.text, config.mode, config.n_docs, backends)) {
            auto it = by_id.find(hit.doc_id);
            if (it != by_id.end()) prompt_docs.push_back(*it->second);
        }
    }

    PromptOptions prompt_options;
    prompt_options.include_documents = config.expansion_enabled;
    prompt_options.doc_token_limit = config.doc_token_limit;

    auto score_of = [&](const std::string& text) {
        return alignment_score(text, config.mode, config.n_docs, backends);
    };

    QueryBucket bucket(
        QueryBucketEntry{query.text, score_of(query.text), /*iteration=*/0});
    if (hooks.on_entry) hooks.on_entry(bucket.original());

    auto run_batch = [&](std::size_t iteration, std::size_t count,
                         const std::vector<QueryBucketEntry>& top_entries) {
        std::string prompt = build_prompt(query, prompt_docs, top_entries, prompt_options);
        if (hooks.on_prompt) hooks.on_prompt(iteration, prompt);
        for (const auto& candidate :
             rephraser.rephrase(prompt, count, config.temperature)) {
            if (bucket.contains(candidate)) continue;  // scored once per run
            QueryBucketEntry entry{candidate, score_of(candidate), iteration};
            bucket.insert(entry);
            if (hooks.on_entry) hooks.on_entry(entry);
        }
    };

    // Initial expansion round: no scored rephrasings exist yet, so the prompt
    // carries only the original query and the documents.
    run_batch(/*iteration=*/0, config.r_initial, {});

    std::size_t iterations_run = 0;
    std::size_t stale_iters = 0;
    for (std::size_t i = 1; i <= config.max_iters; ++i) {
        double before = bucket.best_score();
        run_batch(i, config.r_step, bucket.top_k(config.top_k));
        ++iterations_run;
        if (config.patience > 0) {
            stale_iters = bucket.best_score() > before ? 0 : stale_iters + 1;
            if (stale_iters >= config.patience) break;
        }
    }

    const QueryBucketEntry& best = bucket.best();
    OptimizationResult result{best.query_text, best.score, std::move(bucket),
                              iterations_run};
    return result;
}

}  // namespace qoqa
