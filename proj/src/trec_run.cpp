#include "trec_run.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "common.hpp"

namespace qoqa {

TrecRun::TrecRun(std::vector<Row> rows) : rows_(std::move(rows)) {
    validate();
}

void TrecRun::validate() const {
    std::map<std::string, std::vector<const Row*>> per_query;
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& row : rows_) {
        if (!pairs.emplace(row.query_id, row.doc_id).second) {
            throw Error(ErrorCode::MalformedLine,
                        "run: duplicate (query, doc) pair (" + row.query_id + ", " +
                            row.doc_id + ")");
        }
        per_query[row.query_id].push_back(&row);
    }
    for (auto& [qid, rows] : per_query) {
        std::sort(rows.begin(), rows.end(),
                  [](const Row* a, const Row* b) { return a->rank < b->rank; });
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i]->rank != i + 1) {
                throw Error(ErrorCode::MalformedLine,
                            "run: ranks for query " + qid + " are not contiguous from 1");
            }
            if (i > 0 && rows[i]->score > rows[i - 1]->score) {
                throw Error(ErrorCode::MalformedLine,
                            "run: scores for query " + qid + " increase with rank");
            }
        }
    }
}

std::vector<TrecRun::Row> TrecRun::for_query(const std::string& query_id) const {
    std::vector<Row> out;
    for (const auto& row : rows_) {
        if (row.query_id == query_id) out.push_back(row);
    }
    std::sort(out.begin(), out.end(),
              [](const Row& a, const Row& b) { return a.rank < b.rank; });
    return out;
}

std::vector<std::string> TrecRun::query_ids() const {
    std::set<std::string> ids;
    for (const auto& row : rows_) ids.insert(row.query_id);
    return std::vector<std::string>(ids.begin(), ids.end());
}

void TrecRun::add_ranking(const std::string& query_id,
                          const std::vector<std::pair<std::string, double>>& ranked,
                          const std::string& tag) {
    std::set<std::string> seen;
    double prev = 0.0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& [doc_id, score] = ranked[i];
        if (!seen.insert(doc_id).second) {
            throw Error(ErrorCode::MalformedLine,
                        "run: duplicate doc " + doc_id + " for query " + query_id);
        }
        if (i > 0 && score > prev) {
            throw Error(ErrorCode::MalformedLine,
                        "run: scores for query " + query_id + " increase with rank");
        }
        prev = score;
        rows_.push_back(Row{query_id, doc_id, i + 1, score, tag});
    }
}

void write_trec_run(const TrecRun& run, const std::string& path) {
    std::string out;
    for (const auto& row : run.rows()) {
        out += row.query_id;
        out += " Q0 ";
        out += row.doc_id;
        out += ' ';
        out += std::to_string(row.rank);
        out += ' ';
        out += format_double(row.score);
        out += ' ';
        out += row.tag;
        out += '\n';
    }
    write_file(path, out);
}

TrecRun read_trec_run(const std::string& path) {
    std::string text = read_file(path);
    std::vector<TrecRun::Row> rows;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty()) return;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && line[pos] == ' ') ++pos;
            if (pos >= line.size()) break;
            std::size_t end = line.find(' ', pos);
            if (end == std::string_view::npos) end = line.size();
            fields.emplace_back(line.substr(pos, end - pos));
            pos = end;
        }
        if (fields.size() != 6 || fields[1] != "Q0") {
            throw Error::malformed_line(path, line_no,
                                        "expected `qid Q0 docid rank score tag`");
        }
        long long rank = 0;
        double score = 0.0;
        if (!parse_int(fields[3], rank) || rank < 1 || !parse_double(fields[4], score)) {
            throw Error::malformed_line(path, line_no, "bad rank or score");
        }
        rows.push_back(TrecRun::Row{fields[0], fields[2], static_cast<std::size_t>(rank),
                                    score, fields[5]});
    });
    return TrecRun(std::move(rows));  // validates rank contiguity etc.
}

}  // namespace qoqa
