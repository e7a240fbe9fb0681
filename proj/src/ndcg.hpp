#pragma once

#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "trec_run.hpp"

namespace qoqa {

struct NdcgResult {
    /// One value per qrels query (0 for queries missing from the run or
    /// without positive judgments).
    std::map<std::string, double> per_query;
    /// Mean over qrels queries that have at least one positive judgment.
    double mean = 0.0;
};

/// nDCG@k with exponential gain (2^grade - 1) and log2(rank + 1) discount.
/// The ideal ranking is taken over all judged documents of the query.
NdcgResult ndcg_at_k(const TrecRun& run, const Qrels& qrels, std::size_t k);

struct RunComparison {
    struct Entry {
        std::string name;
        double mean_ndcg = 0.0;
        double delta_vs_baseline = 0.0;
        bool best = false;
    };
    std::vector<Entry> entries;
    std::size_t k = 10;

    std::string to_tsv() const;
    /// Aligned plain-text table; the best run is marked with `*`.
    std::string to_table(const std::vector<std::string>& metadata = {}) const;
};

/// Scores each run at nDCG@k; the first run is the baseline for deltas.
RunComparison compare_runs(const std::vector<std::pair<std::string, TrecRun>>& runs,
                           const Qrels& qrels, std::size_t k = 10);

}  // namespace qoqa
