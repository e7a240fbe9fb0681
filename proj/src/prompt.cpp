#include "prompt.hpp"

#include <cstdio>

#include "analyzer.hpp"
#include "common.hpp"

namespace qoqa {
namespace {

constexpr const char* kInstructions =
    "You are optimizing a search query for document retrieval.\n"
    "Rewrite the original query so that it retrieves the target documents more "
    "precisely. A higher alignment score means a better query.\n";

constexpr const char* kOutputInstruction =
    "Write improved rephrasings of the original query, one per line. Output only "
    "the rephrased queries, one per line, with no numbering and no commentary.\n";

std::string format_score(double score) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", score);
    return std::string(buf);
}

}  // namespace

std::string build_prompt(const QueryRecord& original, const std::vector<Document>& docs,
                         const std::vector<QueryBucketEntry>& top_entries,
                         const PromptOptions& options) {
    std::string prompt;
    prompt += kInstructions;
    prompt += "\nOriginal query:\n";
    prompt += original.text;
    prompt += "\n";

    if (options.include_documents && !docs.empty()) {
        prompt += "\nRetrieved documents:\n";
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const Document& doc = docs[i];
            prompt += "[" + std::to_string(i + 1) + "] " + doc.title + "\n";
            std::size_t cut = token_cut_offset(doc.text, options.doc_token_limit);
            prompt.append(doc.text, 0, cut);
            prompt += "\n";
        }
    }

    if (!top_entries.empty()) {
        prompt += "\nPreviously rephrased queries and their alignment scores:\n";
        for (const auto& entry : top_entries) {
            prompt += "score=" + format_score(entry.score) + " query=" + entry.query_text +
                      "\n";
        }
    }

    prompt += "\n";
    prompt += kOutputInstruction;
    return prompt;
}

std::string extract_original_query(const std::string& prompt) {
    constexpr std::string_view kMarker = "Original query:\n";
    std::size_t start = prompt.find(kMarker);
    if (start == std::string::npos) return std::string();
    start += kMarker.size();
    std::size_t end = prompt.find('\n', start);
    if (end == std::string::npos) end = prompt.size();
    return prompt.substr(start, end - start);
}

}  // namespace qoqa
