#pragma once

#include <string>
#include <vector>

#include "alignment.hpp"
#include "corpus.hpp"

namespace qoqa {

/// Identifier of the instruction template baked into build_prompt; recorded
/// in run metadata and traces so prompt hashes can be compared across runs.
inline constexpr const char* kPromptTemplateVersion = "qoqa-prompt/v1";

struct PromptOptions {
    bool include_documents = true;      // off reproduces the no-expansion ablation
    std::size_t doc_token_limit = 512;  // analyzer tokens kept per document text
};

/// Deterministic rephrasing prompt: task instructions, the original query,
/// the pinned top-N documents (unless disabled), the current top-K scored
/// rephrasings (scores to 4 decimals), and the output-format instruction.
/// Identical inputs produce byte-identical text.
std::string build_prompt(const QueryRecord& original, const std::vector<Document>& docs,
                         const std::vector<QueryBucketEntry>& top_entries,
                         const PromptOptions& options = {});

/// The "Original query:" line content, recovered from a prompt built by
/// build_prompt. Used by the echo rephraser.
std::string extract_original_query(const std::string& prompt);

}  // namespace qoqa
