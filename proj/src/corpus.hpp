#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace qoqa {

/// One corpus entry as stored in a BEIR corpus.jsonl file.
struct Document {
    std::string id;
    std::string title;
    std::string text;

    bool operator==(const Document&) const = default;
};

struct QueryRecord {
    std::string id;
    std::string text;

    bool operator==(const QueryRecord&) const = default;
};

/// Graded relevance judgments keyed by (query-id, doc-id).
class Qrels {
public:
    using Key = std::pair<std::string, std::string>;

    void set(const std::string& query_id, const std::string& doc_id, int grade);
    int grade(const std::string& query_id, const std::string& doc_id) const;
    bool empty() const { return judgments_.empty(); }
    std::size_t size() const { return judgments_.size(); }

    /// Judged (doc-id -> grade) entries for one query; empty map if unknown.
    const std::map<std::string, int>& for_query(const std::string& query_id) const;

    /// Query ids in sorted order.
    std::vector<std::string> query_ids() const;

    bool has_positive(const std::string& query_id) const;

private:
    std::map<std::string, std::map<std::string, int>> judgments_;
};

std::vector<Document> parse_corpus(const std::string& path);
std::vector<QueryRecord> parse_queries(const std::string& path);
Qrels parse_qrels(const std::string& path);

/// Inverse of parse_corpus; one JSON object per line, fields _id/title/text.
void write_corpus(const std::string& path, const std::vector<Document>& docs);

}  // namespace qoqa
