#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qoqa {

/// Ordered list of normalized terms produced by the analyzer.
using TokenStream = std::vector<std::string>;

/// Lowercase, split on any non-alphanumeric byte, drop English stopwords,
/// Porter-stem. This approximates the default Lucene English analysis chain;
/// deterministic for any input, empty input gives an empty stream.
TokenStream tokenize(std::string_view text);

bool is_stopword(std::string_view lowercase_term);

/// Byte offset just past the end of the n-th surviving (post-stopword) token,
/// or text.size() when fewer than n tokens exist. Used to truncate document
/// text at an analyzer-token boundary.
std::size_t token_cut_offset(std::string_view text, std::size_t n);

}  // namespace qoqa
