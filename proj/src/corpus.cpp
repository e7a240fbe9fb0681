#include "corpus.hpp"

#include <iostream>
#include <unordered_set>

#include <json.hpp>

#include "common.hpp"

namespace qoqa {

using nlohmann::json;

namespace {

json parse_json_line(const std::string& path, std::size_t line_no, std::string_view line) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        throw Error::malformed_line(path, line_no, "not a JSON object");
    }
    return obj;
}

std::string require_string(const std::string& path, std::size_t line_no, const json& obj,
                           const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string()) {
        throw Error::malformed_line(path, line_no,
                                    std::string("missing string field \"") + field + "\"");
    }
    return it->get<std::string>();
}

}  // namespace

void Qrels::set(const std::string& query_id, const std::string& doc_id, int grade) {
    judgments_[query_id][doc_id] = grade;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = judgments_.find(query_id);
    if (q == judgments_.end()) return 0;
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
}

const std::map<std::string, int>& Qrels::for_query(const std::string& query_id) const {
    static const std::map<std::string, int> kEmpty;
    auto q = judgments_.find(query_id);
    return q == judgments_.end() ? kEmpty : q->second;
}

std::vector<std::string> Qrels::query_ids() const {
    std::vector<std::string> ids;
    ids.reserve(judgments_.size());
    for (const auto& [qid, _] : judgments_) ids.push_back(qid);
    return ids;
}

bool Qrels::has_positive(const std::string& query_id) const {
    for (const auto& [_, grade] : for_query(query_id)) {
        if (grade > 0) return true;
    }
    return false;
}

std::vector<Document> parse_corpus(const std::string& path) {
    std::string text = read_file(path);
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty()) return;  // tolerate blank lines
        json obj = parse_json_line(path, line_no, line);
        Document doc;
        doc.id = require_string(path, line_no, obj, "_id");
        if (doc.id.empty()) {
            throw Error::malformed_line(path, line_no, "empty _id");
        }
        doc.title = obj.contains("title") && obj["title"].is_string()
                        ? obj["title"].get<std::string>()
                        : std::string();
        doc.text = require_string(path, line_no, obj, "text");
        if (!seen.insert(doc.id).second) {
            throw Error::duplicate_id(path, line_no, doc.id);
        }
        docs.push_back(std::move(doc));
    });
    return docs;
}

std::vector<QueryRecord> parse_queries(const std::string& path) {
    std::string text = read_file(path);
    std::vector<QueryRecord> queries;
    std::unordered_set<std::string> seen;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty()) return;
        json obj = parse_json_line(path, line_no, line);
        QueryRecord q;
        q.id = require_string(path, line_no, obj, "_id");
        q.text = require_string(path, line_no, obj, "text");
        if (q.id.empty() || q.text.empty()) {
            throw Error::malformed_line(path, line_no, "empty _id or text");
        }
        if (!seen.insert(q.id).second) {
            throw Error::duplicate_id(path, line_no, q.id);
        }
        queries.push_back(std::move(q));
    });
    return queries;
}

Qrels parse_qrels(const std::string& path) {
    std::string text = read_file(path);
    Qrels qrels;
    bool saw_header = false;
    std::unordered_set<std::string> seen_pairs;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty()) return;
        std::vector<std::string_view> cols;
        std::size_t pos = 0;
        while (true) {
            std::size_t tab = line.find('\t', pos);
            if (tab == std::string_view::npos) {
                cols.push_back(line.substr(pos));
                break;
            }
            cols.push_back(line.substr(pos, tab - pos));
            pos = tab + 1;
        }
        if (!saw_header) {
            if (cols.size() != 3 || cols[0] != "query-id" || cols[1] != "corpus-id" ||
                cols[2] != "score") {
                throw Error::malformed_line(
                    path, line_no, "expected header \"query-id\\tcorpus-id\\tscore\"");
            }
            saw_header = true;
            return;
        }
        if (cols.size() != 3) {
            throw Error::malformed_line(path, line_no, "expected 3 tab-separated columns");
        }
        long long grade = 0;
        if (!parse_int(cols[2], grade) || grade < 0) {
            throw Error::malformed_line(path, line_no,
                                        "grade is not a non-negative integer: \"" +
                                            std::string(cols[2]) + "\"");
        }
        std::string qid(cols[0]);
        std::string did(cols[1]);
        if (!seen_pairs.insert(qid + "\t" + did).second) {
            std::cerr << "warning: " << path << ":" << line_no << ": duplicate qrels pair ("
                      << qid << ", " << did << "), later row wins\n";
        }
        qrels.set(qid, did, static_cast<int>(grade));
    });
    return qrels;
}

void write_corpus(const std::string& path, const std::vector<Document>& docs) {
    std::string out;
    for (const auto& doc : docs) {
        json obj = {{"_id", doc.id}, {"title", doc.title}, {"text", doc.text}};
        out += obj.dump();
        out += '\n';
    }
    write_file(path, out);
}

}  // namespace qoqa
