#include "inverted_index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "common.hpp"

namespace qoqa {

namespace {
constexpr char kMagic[] = "QOQASIDX";
constexpr uint32_t kVersion = 1;
}  // namespace

void Bm25Params::validate() const {
    if (!(k1 >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bm25: k1 must be >= 0");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "bm25: b must be in [0, 1]");
    }
}

InvertedIndex InvertedIndex::build(const std::vector<Document>& docs) {
    if (docs.empty()) {
        throw Error(ErrorCode::EmptyCorpus, "cannot build index over empty corpus");
    }

    std::vector<const Document*> sorted;
    sorted.reserve(docs.size());
    for (const auto& d : docs) sorted.push_back(&d);
    std::sort(sorted.begin(), sorted.end(),
              [](const Document* a, const Document* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->id == sorted[i - 1]->id) {
            throw Error(ErrorCode::DuplicateId,
                        "duplicate document id \"" + sorted[i]->id + "\"");
        }
    }

    InvertedIndex index;
    index.doc_ids_.reserve(sorted.size());
    index.doc_lengths_.reserve(sorted.size());

    uint64_t total_tokens = 0;
    for (uint32_t pos = 0; pos < sorted.size(); ++pos) {
        const Document& doc = *sorted[pos];
        index.doc_ids_.push_back(doc.id);
        index.doc_pos_.emplace(doc.id, pos);

        TokenStream terms = tokenize(doc.title + " " + doc.text);
        index.doc_lengths_.push_back(terms.size());
        total_tokens += terms.size();

        std::map<std::string, uint32_t> freqs;
        for (auto& t : terms) ++freqs[t];
        for (auto& [term, tf] : freqs) {
            index.postings_[term].push_back(Posting{pos, tf});
        }
    }
    index.avg_doc_length_ = static_cast<double>(total_tokens) / sorted.size();
    return index;
}

std::size_t InvertedIndex::doc_freq(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

uint64_t InvertedIndex::doc_length(const std::string& doc_id) const {
    auto it = doc_pos_.find(doc_id);
    if (it == doc_pos_.end()) {
        throw Error(ErrorCode::UnknownDocument, "unknown document \"" + doc_id + "\"");
    }
    return doc_lengths_[it->second];
}

bool InvertedIndex::contains(const std::string& doc_id) const {
    return doc_pos_.contains(doc_id);
}

double InvertedIndex::idf(const std::string& term) const {
    double n = static_cast<double>(doc_freq(term));
    double N = static_cast<double>(total_docs());
    return std::log((N - n + 0.5) / (n + 0.5));
}

double InvertedIndex::bm25_score(const Bm25Params& params, const TokenStream& query_terms,
                                 const std::string& doc_id) const {
    params.validate();
    auto pos_it = doc_pos_.find(doc_id);
    if (pos_it == doc_pos_.end()) {
        throw Error(ErrorCode::UnknownDocument, "unknown document \"" + doc_id + "\"");
    }
    uint32_t pos = pos_it->second;
    double doc_len = static_cast<double>(doc_lengths_[pos]);
    double norm = params.k1 * (1.0 - params.b + params.b * doc_len / avg_doc_length_);

    double score = 0.0;
    std::unordered_set<std::string_view> seen;
    for (const auto& term : query_terms) {
        if (!seen.insert(term).second) continue;  // distinct terms only
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& plist = it->second;
        auto p = std::lower_bound(plist.begin(), plist.end(), pos,
                                  [](const Posting& a, uint32_t b) { return a.doc < b; });
        if (p == plist.end() || p->doc != pos) continue;
        double f = static_cast<double>(p->tf);
        score += idf(term) * f * (params.k1 + 1.0) / (f + norm);
    }
    return score;
}

std::vector<ScoredDoc> InvertedIndex::search(const Bm25Params& params,
                                             const std::string& query,
                                             std::size_t n) const {
    params.validate();
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "search: n must be >= 1");
    }
    if (total_docs() == 0) {
        throw Error(ErrorCode::EmptyCorpus, "search over empty index");
    }

    TokenStream terms = tokenize(query);
    std::vector<std::string> distinct;
    std::unordered_set<std::string_view> seen;
    for (const auto& term : terms) {
        if (seen.insert(term).second) distinct.push_back(term);
    }

    // Accumulate per-document scores over the postings of the query terms.
    std::unordered_map<uint32_t, double> acc;
    for (const auto& term : distinct) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        double term_idf = idf(term);
        for (const Posting& p : it->second) {
            double f = static_cast<double>(p.tf);
            double doc_len = static_cast<double>(doc_lengths_[p.doc]);
            double norm =
                params.k1 * (1.0 - params.b + params.b * doc_len / avg_doc_length_);
            acc[p.doc] += term_idf * f * (params.k1 + 1.0) / (f + norm);
        }
    }

    std::vector<ScoredDoc> hits;
    hits.reserve(acc.size());
    for (const auto& [pos, score] : acc) {
        if (score == 0.0) continue;
        hits.push_back(ScoredDoc{doc_ids_[pos], score});
    }
    std::sort(hits.begin(), hits.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (hits.size() > n) hits.resize(n);
    return hits;
}

std::string InvertedIndex::serialize() const {
    std::string out;
    out.append(kMagic, sizeof(kMagic) - 1);
    put_u32(out, kVersion);
    put_u64(out, doc_ids_.size());
    put_f64(out, avg_doc_length_);
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        put_str(out, doc_ids_[i]);
        put_u64(out, doc_lengths_[i]);
    }
    put_u64(out, postings_.size());
    for (const auto& [term, plist] : postings_) {
        put_str(out, term);
        put_u64(out, plist.size());
        for (const Posting& p : plist) {
            put_u32(out, p.doc);
            put_u32(out, p.tf);
        }
    }
    return out;
}

InvertedIndex InvertedIndex::deserialize(std::string_view bytes) {
    if (bytes.size() < sizeof(kMagic) - 1 ||
        bytes.substr(0, sizeof(kMagic) - 1) != kMagic) {
        throw Error(ErrorCode::Io, "not a sparse index artifact (bad magic)");
    }
    BinaryReader r(bytes.substr(sizeof(kMagic) - 1));
    uint32_t version = r.u32();
    if (version != kVersion) {
        throw Error(ErrorCode::Io,
                    "unsupported sparse index version " + std::to_string(version));
    }
    InvertedIndex index;
    uint64_t n_docs = r.u64();
    index.avg_doc_length_ = r.f64();
    index.doc_ids_.reserve(n_docs);
    index.doc_lengths_.reserve(n_docs);
    for (uint64_t i = 0; i < n_docs; ++i) {
        index.doc_ids_.push_back(r.str());
        index.doc_lengths_.push_back(r.u64());
        index.doc_pos_.emplace(index.doc_ids_.back(), static_cast<uint32_t>(i));
    }
    uint64_t n_terms = r.u64();
    for (uint64_t t = 0; t < n_terms; ++t) {
        std::string term = r.str();
        uint64_t n_postings = r.u64();
        std::vector<Posting> plist;
        plist.reserve(n_postings);
        for (uint64_t p = 0; p < n_postings; ++p) {
            Posting posting;
            posting.doc = r.u32();
            posting.tf = r.u32();
            plist.push_back(posting);
        }
        index.postings_.emplace(std::move(term), std::move(plist));
    }
    if (!r.at_end()) {
        throw Error(ErrorCode::Io, "trailing bytes in sparse index artifact");
    }
    index.check_invariants();
    return index;
}

void InvertedIndex::check_invariants() const {
    if (doc_ids_.size() != doc_lengths_.size()) {
        throw Error(ErrorCode::Io, "sparse index artifact: doc table size mismatch");
    }
    uint64_t total = 0;
    for (uint64_t len : doc_lengths_) total += len;
    double mean = doc_ids_.empty() ? 0.0 : static_cast<double>(total) / doc_ids_.size();
    if (std::abs(mean - avg_doc_length_) > 1e-9) {
        throw Error(ErrorCode::Io, "sparse index artifact: avg doc length mismatch");
    }
    for (const auto& [term, plist] : postings_) {
        for (std::size_t i = 0; i < plist.size(); ++i) {
            if (plist[i].doc >= doc_ids_.size()) {
                throw Error(ErrorCode::Io, "sparse index artifact: posting out of range");
            }
            if (i > 0 && plist[i - 1].doc >= plist[i].doc) {
                throw Error(ErrorCode::Io, "sparse index artifact: postings unsorted");
            }
        }
    }
}

void InvertedIndex::save(const std::string& path) const {
    write_file(path, serialize());
}

InvertedIndex InvertedIndex::load(const std::string& path) {
    return deserialize(read_file(path));
}

}  // namespace qoqa
