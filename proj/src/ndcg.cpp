#include "ndcg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "common.hpp"

namespace qoqa {
namespace {

double gain(int grade) {
    return std::pow(2.0, static_cast<double>(grade)) - 1.0;
}

double discount(std::size_t rank) {
    return std::log2(static_cast<double>(rank) + 1.0);
}

}  // namespace

NdcgResult ndcg_at_k(const TrecRun& run, const Qrels& qrels, std::size_t k) {
    if (k < 1) {
        throw Error(ErrorCode::InvalidArgument, "ndcg: k must be >= 1");
    }
    if (qrels.empty()) {
        throw Error(ErrorCode::EmptyQrels, "ndcg: no relevance judgments");
    }

    NdcgResult result;
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& qid : qrels.query_ids()) {
        const auto& judged = qrels.for_query(qid);

        std::vector<int> grades;
        grades.reserve(judged.size());
        for (const auto& [_, g] : judged) grades.push_back(g);
        std::sort(grades.rbegin(), grades.rend());

        double idcg = 0.0;
        for (std::size_t r = 1; r <= std::min(k, grades.size()); ++r) {
            idcg += gain(grades[r - 1]) / discount(r);
        }

        double ndcg = 0.0;
        if (idcg > 0.0) {
            double dcg = 0.0;
            for (const auto& row : run.for_query(qid)) {
                if (row.rank > k) break;
                dcg += gain(qrels.grade(qid, row.doc_id)) / discount(row.rank);
            }
            ndcg = dcg / idcg;
        }
        result.per_query[qid] = ndcg;

        if (qrels.has_positive(qid)) {
            sum += ndcg;
            ++counted;
        }
    }
    result.mean = counted == 0 ? 0.0 : sum / static_cast<double>(counted);
    return result;
}

RunComparison compare_runs(const std::vector<std::pair<std::string, TrecRun>>& runs,
                           const Qrels& qrels, std::size_t k) {
    if (runs.empty()) {
        throw Error(ErrorCode::InvalidArgument, "compare: need at least one run");
    }
    RunComparison cmp;
    cmp.k = k;
    double baseline = 0.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        double mean = ndcg_at_k(runs[i].second, qrels, k).mean;
        if (i == 0) baseline = mean;
        cmp.entries.push_back({runs[i].first, mean, mean - baseline, false});
    }
    auto best = std::max_element(cmp.entries.begin(), cmp.entries.end(),
                                 [](const auto& a, const auto& b) {
                                     return a.mean_ndcg < b.mean_ndcg;
                                 });
    best->best = true;
    return cmp;
}

std::string RunComparison::to_tsv() const {
    std::string metric = "ndcg@" + std::to_string(k);
    std::string out = "run\t" + metric + "\tdelta\tbest\n";
    char buf[64];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof(buf), "%.4f\t%+.4f", e.mean_ndcg, e.delta_vs_baseline);
        out += e.name + "\t" + buf + "\t" + (e.best ? "1" : "0") + "\n";
    }
    return out;
}

std::string RunComparison::to_table(const std::vector<std::string>& metadata) const {
    std::size_t name_width = 4;
    for (const auto& e : entries) name_width = std::max(name_width, e.name.size());

    std::string out;
    for (const auto& line : metadata) out += "# " + line + "\n";
    std::string metric = "nDCG@" + std::to_string(k);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-*s  %10s  %9s\n", static_cast<int>(name_width),
                  "run", metric.c_str(), "delta");
    out += buf;
    out += std::string(name_width + 23, '-') + "\n";
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof(buf), "%-*s  %10.4f  %+9.4f%s\n",
                      static_cast<int>(name_width), e.name.c_str(), e.mean_ndcg,
                      e.delta_vs_baseline, e.best ? "  *" : "");
        out += buf;
    }
    return out;
}

}  // namespace qoqa
