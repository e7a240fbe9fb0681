#include "analyzer.hpp"

#include <array>
#include <unordered_set>

#include "porter_stemmer.hpp"

namespace qoqa {
namespace {

// Lucene's default English stop set.
const std::unordered_set<std::string_view>& stopwords() {
    static const std::unordered_set<std::string_view> kStopwords = {
        "a",    "an",   "and",  "are",  "as",    "at",   "be",   "but",
        "by",   "for",  "if",   "in",   "into",  "is",   "it",   "no",
        "not",  "of",   "on",   "or",   "such",  "that", "the",  "their",
        "then", "there", "these", "they", "this", "to",   "was",  "will",
        "with",
    };
    return kStopwords;
}

inline bool is_alnum_ascii(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline char lower_ascii(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

// Walks alphanumeric runs, lowercased; emit(term, end_offset) for each run
// that survives the stopword filter. Stemming is left to the caller.
template <typename Emit>
void scan_terms(std::string_view text, Emit&& emit) {
    std::string term;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_alnum_ascii(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        term.clear();
        while (i < text.size() && is_alnum_ascii(static_cast<unsigned char>(text[i]))) {
            term.push_back(lower_ascii(static_cast<unsigned char>(text[i])));
            ++i;
        }
        if (!stopwords().contains(term)) {
            if (!emit(term, i)) return;
        }
    }
}

}  // namespace

bool is_stopword(std::string_view lowercase_term) {
    return stopwords().contains(lowercase_term);
}

TokenStream tokenize(std::string_view text) {
    TokenStream out;
    scan_terms(text, [&](const std::string& term, std::size_t) {
        out.push_back(porter_stem(term));
        return true;
    });
    return out;
}

std::size_t token_cut_offset(std::string_view text, std::size_t n) {
    if (n == 0) return 0;
    std::size_t count = 0;
    std::size_t cut = text.size();
    scan_terms(text, [&](const std::string&, std::size_t end) {
        if (++count == n) {
            cut = end;
            return false;
        }
        return true;
    });
    return count >= n ? cut : text.size();
}

}  // namespace qoqa
