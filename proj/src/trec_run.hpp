#pragma once

#include <string>
#include <vector>

namespace qoqa {

/// Ranked retrieval results in TREC interchange format. Per query, ranks are
/// contiguous from 1 and scores are non-increasing with rank.
class TrecRun {
public:
    struct Row {
        std::string query_id;
        std::string doc_id;
        std::size_t rank = 1;
        double score = 0.0;
        std::string tag;

        bool operator==(const Row&) const = default;
    };

    TrecRun() = default;
    explicit TrecRun(std::vector<Row> rows);

    const std::vector<Row>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }

    /// Rows of one query in rank order.
    std::vector<Row> for_query(const std::string& query_id) const;
    std::vector<std::string> query_ids() const;

    /// Appends a ranked result list for one query; ranks are assigned 1..m in
    /// the given order. Scores must be non-increasing.
    void add_ranking(const std::string& query_id,
                     const std::vector<std::pair<std::string, double>>& ranked,
                     const std::string& tag);

    bool operator==(const TrecRun&) const = default;

private:
    void validate() const;

    std::vector<Row> rows_;
};

/// Line format: `qid Q0 docid rank score tag`, space-separated. Scores are
/// written with round-trip precision; write-then-read is identity.
void write_trec_run(const TrecRun& run, const std::string& path);
TrecRun read_trec_run(const std::string& path);

}  // namespace qoqa
