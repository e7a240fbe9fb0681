// qoqa command-line driver. Talks to the core exclusively through the public
// C API so it doubles as a reference client for the shared library.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qoqa/qoqa.h"

namespace {

struct ConfigDeleter {
    void operator()(qoqa_config* c) const { qoqa_config_free(c); }
};
using ConfigPtr = std::unique_ptr<qoqa_config, ConfigDeleter>;

struct StringValue {
    std::string value;
    bool set = false;
};

// Options staged before being pushed into a qoqa_config, so that config-file
// values are applied first and flags override them.
class Staged {
public:
    void add(std::string key, std::string value) {
        items_.emplace_back(std::move(key), std::move(value));
    }

    int apply(qoqa_config* config) const {
        for (const auto& [key, value] : items_) {
            if (qoqa_config_set(config, key.c_str(), value.c_str()) != QOQA_OK) {
                std::fprintf(stderr, "error: %s\n", qoqa_last_error());
                return 1;
            }
        }
        return 0;
    }

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

int fail(qoqa_status) {
    std::fprintf(stderr, "error: %s\n", qoqa_last_error());
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qoqa — score-guided query rephrasing for retrieval"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qoqa_version()));

    std::string config_file;
    app.add_option("--config", config_file, "key=value config file (flags override)");

    Staged staged;
    auto bind = [&](CLI::App* cmd, const char* flag, const char* key, const char* help) {
        cmd->add_option_function<std::string>(
               flag, [&staged, key](const std::string& v) { staged.add(key, v); }, help)
            ->expected(1);
    };
    auto bind_flag = [&](CLI::App* cmd, const char* flag, const char* key,
                         const char* value, const char* help) {
        cmd->add_flag_callback(
            flag, [&staged, key, value] { staged.add(key, value); }, help);
    };

    auto add_common = [&](CLI::App* cmd) {
        bind(cmd, "--out", "out", "output directory (default qoqa-out)");
        bind(cmd, "--index-dir", "index", "index directory (defaults to --out)");
        bind(cmd, "--k1", "k1", "BM25 k1 (default 1.2)");
        bind(cmd, "--b", "b", "BM25 b (default 0.75)");
        bind(cmd, "--jobs", "jobs", "worker threads (default 1)");
    };

    CLI::App* index = app.add_subcommand("index", "build retrieval artifacts");
    bind(index, "--corpus", "corpus", "BEIR corpus.jsonl");
    bind(index, "--embeddings", "embeddings", "document embeddings JSONL");
    bind(index, "--dim", "dim", "embedding dimension (inferred when omitted)");
    add_common(index);

    CLI::App* optimize = app.add_subcommand("optimize", "rephrase queries score-guided");
    bind(optimize, "--corpus", "corpus", "BEIR corpus.jsonl");
    bind(optimize, "--queries", "queries", "BEIR queries.jsonl");
    bind(optimize, "--score", "score", "alignment score: bm25|dense|hybrid");
    bind(optimize, "--alpha", "alpha", "hybrid mixing weight (default 0.1)");
    bind(optimize, "--n", "n", "documents retrieved per query (default 5)");
    bind(optimize, "--k", "k", "top rephrasings shown in the prompt (default 3)");
    bind(optimize, "--r0", "r0", "initial rephrasings requested (default 3)");
    bind(optimize, "--ri", "ri", "rephrasings per iteration (default 1)");
    bind(optimize, "--iters", "iters", "optimization iterations (default 50)");
    bind(optimize, "--temperature", "temperature", "LLM temperature (default 1.0)");
    bind(optimize, "--seed", "seed", "seed for mock backends");
    bind(optimize, "--patience", "patience", "early stop after N stale iterations (0=off)");
    bind(optimize, "--doc-token-limit", "doc_token_limit",
         "analyzer tokens kept per prompt document (default 512)");
    bind(optimize, "--rephraser", "rephraser", "mock-echo|mock-scripted|llm-http");
    bind(optimize, "--script", "script", "JSONL script for mock-scripted");
    bind(optimize, "--model", "model", "LLM model name (llm-http)");
    bind(optimize, "--provider", "provider", "query embeddings: mock|file-lookup|http");
    bind(optimize, "--query-embeddings", "query_embeddings",
         "precomputed query vectors (file-lookup)");
    bind_flag(optimize, "--no-expansion", "expansion", "false",
              "omit the document block from prompts");
    add_common(optimize);

    CLI::App* evaluate = app.add_subcommand("evaluate", "score original vs optimized");
    bind(evaluate, "--qrels", "qrels", "BEIR qrels TSV");
    bind(evaluate, "--optimized", "optimized", "optimized-queries JSONL");
    bind(evaluate, "--final", "final", "final retriever: sparse|dense");
    bind(evaluate, "--provider", "provider", "query embeddings: mock|file-lookup|http");
    bind(evaluate, "--query-embeddings", "query_embeddings",
         "precomputed query vectors (file-lookup)");
    bind_flag(evaluate, "--union", "union", "true",
              "merge original+optimized rankings in the evaluated run");
    add_common(evaluate);

    CLI::App* report = app.add_subcommand("report", "compare runs / summarize a run");
    bind(report, "--qrels", "qrels", "BEIR qrels TSV");
    bind(report, "--optimized", "optimized", "optimized-queries JSONL to summarize");
    std::vector<std::string> run_specs;
    report->add_option("--run", run_specs, "named run, name=path (repeatable)");

    CLI11_PARSE(app, argc, argv);

    ConfigPtr config;
    {
        qoqa_config* raw = nullptr;
        if (qoqa_config_new(&raw) != QOQA_OK) return fail(QOQA_ERR_INTERNAL);
        config.reset(raw);
    }
    if (!config_file.empty() &&
        qoqa_config_load_file(config.get(), config_file.c_str()) != QOQA_OK) {
        return fail(QOQA_ERR_IO);
    }
    if (!run_specs.empty()) {
        std::string joined;
        for (const auto& spec : run_specs) {
            if (!joined.empty()) joined += ';';
            joined += spec;
        }
        staged.add("runs", joined);
    }
    if (int rc = staged.apply(config.get()); rc != 0) return rc;

    if (app.got_subcommand(index)) {
        qoqa_status status = qoqa_run_index(config.get());
        if (status != QOQA_OK) return fail(status);
        return 0;
    }
    if (app.got_subcommand(optimize)) {
        int32_t failed = 0;
        qoqa_status status = qoqa_run_optimize(config.get(), &failed);
        if (status != QOQA_OK) return fail(status);
        if (failed > 0) {
            std::fprintf(stderr, "error: %d queries failed\n", failed);
            return 1;
        }
        return 0;
    }
    if (app.got_subcommand(evaluate)) {
        char* text = nullptr;
        qoqa_status status = qoqa_run_evaluate(config.get(), &text);
        if (status != QOQA_OK) return fail(status);
        if (text) {
            std::fputs(text, stdout);
            qoqa_string_free(text);
        }
        return 0;
    }
    if (app.got_subcommand(report)) {
        char* text = nullptr;
        qoqa_status status = qoqa_run_report(config.get(), &text);
        if (status != QOQA_OK) return fail(status);
        if (text) {
            std::fputs(text, stdout);
            qoqa_string_free(text);
        }
        return 0;
    }
    return 1;
}
