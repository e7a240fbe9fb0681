#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "analyzer.hpp"
#include "corpus.hpp"

namespace qoqa {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    void validate() const;
};

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;

    bool operator==(const ScoredDoc&) const = default;
};

/// Immutable inverted index over an analyzed corpus. Documents are stored in
/// ascending id order regardless of input order, so two builds over permuted
/// input produce identical indexes (and identical serialized bytes).
class InvertedIndex {
public:
    struct Posting {
        uint32_t doc = 0;  // position in the sorted doc table
        uint32_t tf = 0;
    };

    static InvertedIndex build(const std::vector<Document>& docs);

    std::size_t total_docs() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    std::size_t doc_freq(const std::string& term) const;
    uint64_t doc_length(const std::string& doc_id) const;
    bool contains(const std::string& doc_id) const;
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }

    /// log((N - n + 0.5) / (n + 0.5)), natural log; negative when n > N/2.
    double idf(const std::string& term) const;

    /// Okapi sum over distinct query terms for one document.
    double bm25_score(const Bm25Params& params, const TokenStream& query_terms,
                      const std::string& doc_id) const;

    /// Top-n by score descending, ties by ascending doc id; documents scoring
    /// exactly zero are omitted.
    std::vector<ScoredDoc> search(const Bm25Params& params, const std::string& query,
                                  std::size_t n) const;

    std::string serialize() const;
    static InvertedIndex deserialize(std::string_view bytes);
    void save(const std::string& path) const;
    static InvertedIndex load(const std::string& path);

private:
    InvertedIndex() = default;
    void check_invariants() const;

    std::vector<std::string> doc_ids_;           // ascending
    std::vector<uint64_t> doc_lengths_;          // by doc position
    std::unordered_map<std::string, uint32_t> doc_pos_;
    std::map<std::string, std::vector<Posting>> postings_;  // sorted terms
    double avg_doc_length_ = 0.0;
};

}  // namespace qoqa
