#include "pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "alignment.hpp"
#include "common.hpp"
#include "corpus.hpp"
#include "embedding_provider.hpp"
#include "embedding_store.hpp"
#include "inverted_index.hpp"
#include "ndcg.hpp"
#include "optimizer.hpp"
#include "trec_run.hpp"

namespace qoqa {

using nlohmann::json;

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kEvalDepth = 10;

std::string index_dir(const Settings& s) {
    return s.get_or("index", s.get_or("out", "qoqa-out"));
}

std::string out_dir(const Settings& s) {
    return s.get_or("out", "qoqa-out");
}

std::string sparse_path(const Settings& s) {
    return (fs::path(index_dir(s)) / "sparse.idx").string();
}

std::string dense_path(const Settings& s) {
    return (fs::path(index_dir(s)) / "dense.vec").string();
}

void require_file(const std::string& path, const std::string& what) {
    if (!file_exists(path)) {
        throw Error(ErrorCode::Io, what + " not found: " + path);
    }
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

Bm25Params bm25_params(const Settings& s) {
    Bm25Params params;
    params.k1 = s.get_double("k1", 1.2);
    params.b = s.get_double("b", 0.75);
    params.validate();
    return params;
}

AlignmentMode alignment_mode(const Settings& s) {
    AlignmentMode mode;
    mode.kind = parse_score_kind(s.get_or("score", "bm25"));
    mode.alpha = s.get_double("alpha", 0.1);
    mode.validate();
    return mode;
}

OptimizerConfig optimizer_config(const Settings& s) {
    OptimizerConfig cfg;
    cfg.n_docs = static_cast<std::size_t>(s.get_int("n", 5));
    cfg.top_k = static_cast<std::size_t>(s.get_int("k", 3));
    cfg.r_initial = static_cast<std::size_t>(s.get_int("r0", 3));
    cfg.r_step = static_cast<std::size_t>(s.get_int("ri", 1));
    cfg.max_iters = static_cast<std::size_t>(s.get_int("iters", 50));
    cfg.mode = alignment_mode(s);
    cfg.temperature = s.get_double("temperature", 1.0);
    cfg.expansion_enabled = s.get_bool("expansion", true);
    cfg.seed = static_cast<uint64_t>(s.get_int("seed", 0));
    cfg.doc_token_limit = static_cast<std::size_t>(s.get_int("doc_token_limit", 512));
    cfg.patience = static_cast<std::size_t>(s.get_int("patience", 0));
    cfg.validate();
    return cfg;
}

std::unique_ptr<EmbeddingProvider> make_provider(const Settings& s, std::size_t dim) {
    std::string kind = s.get_or("provider", "mock");
    if (kind == "mock") {
        return std::make_unique<MockEmbeddingProvider>(
            dim, static_cast<uint64_t>(s.get_int("seed", 0)));
    }
    if (kind == "file-lookup") {
        return std::make_unique<FileEmbeddingProvider>(s.require("query_embeddings"), dim);
    }
    if (kind == "http") {
        HttpProviderConfig cfg;
        cfg.base_url = s.get_or("provider_url", env_or("QOQA_EMBED_BASE_URL", ""));
        cfg.api_key = env_or("QOQA_EMBED_API_KEY", "");
        return std::make_unique<HttpEmbeddingProvider>(cfg, dim);
    }
    throw Error(ErrorCode::InvalidArgument,
                "unknown provider \"" + kind + "\" (expected mock|file-lookup|http)");
}

std::unique_ptr<Rephraser> make_rephraser(const Settings& s) {
    std::string kind = s.get_or("rephraser", "mock-echo");
    if (kind == "mock-echo") return std::make_unique<MockEchoRephraser>();
    if (kind == "mock-scripted") {
        return std::make_unique<MockScriptedRephraser>(s.require("script"));
    }
    if (kind == "llm-http") {
        LlmRephraserConfig cfg;
        cfg.base_url = s.get_or("llm_base_url", env_or("QOQA_LLM_BASE_URL", ""));
        cfg.api_key = env_or("QOQA_LLM_API_KEY", "");
        cfg.model = s.get_or("model", "gpt-3.5-turbo");
        cfg.max_concurrent = static_cast<int>(s.get_int("jobs", 1)) * 2;
        return std::make_unique<LlmHttpRephraser>(cfg);
    }
    throw Error(ErrorCode::InvalidArgument,
                "unknown rephraser \"" + kind +
                    "\" (expected mock-echo|mock-scripted|llm-http)");
}

std::string sanitize_id(const std::string& id) {
    std::string out;
    out.reserve(id.size());
    for (char c : id) {
        bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                  (c >= 'A' && c <= 'Z') || c == '.' || c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    return out;
}

/// Runs fn(i) for i in [0, count); jobs <= 1 stays on the calling thread.
/// The first exception thrown by any worker is rethrown after all join.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> workers;
    std::size_t n_workers = std::min(jobs, count);
    workers.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
        workers.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

struct LoadedBackends {
    std::optional<InvertedIndex> sparse;
    std::optional<EmbeddingStore> store;
    std::unique_ptr<EmbeddingProvider> provider;

    AlignmentBackends view(const Bm25Params& params) const {
        AlignmentBackends b;
        b.sparse = sparse ? &*sparse : nullptr;
        b.store = store ? &*store : nullptr;
        b.provider = provider.get();
        b.bm25 = params;
        return b;
    }
};

LoadedBackends load_backends(const Settings& s, bool need_sparse, bool need_dense) {
    LoadedBackends loaded;
    if (need_sparse) {
        require_file(sparse_path(s), "sparse index (run `qoqa index` first)");
        loaded.sparse = InvertedIndex::load(sparse_path(s));
    }
    if (need_dense) {
        require_file(dense_path(s), "dense store (run `qoqa index` with embeddings first)");
        loaded.store = EmbeddingStore::load(dense_path(s));
        loaded.provider = make_provider(s, loaded.store->dim());
    }
    return loaded;
}

struct OptimizedRow {
    std::string query_id;
    std::string original;
    std::string best_query;
    double best_score = 0.0;
    double baseline_score = 0.0;
    std::size_t iterations = 0;
};

std::vector<OptimizedRow> read_optimized(const std::string& path) {
    std::vector<OptimizedRow> rows;
    std::string text = read_file(path);
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty()) return;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("query_id")) {
            throw Error::malformed_line(path, line_no, "bad optimized-queries row");
        }
        OptimizedRow row;
        row.query_id = obj["query_id"].get<std::string>();
        row.original = obj.value("original", "");
        row.best_query = obj.value("best_query", "");
        row.best_score = obj.value("best_score", 0.0);
        row.baseline_score = obj.value("baseline_score", 0.0);
        row.iterations = obj.value("iterations", std::size_t{0});
        rows.push_back(std::move(row));
    });
    return rows;
}

json run_meta(const Settings& s, const OptimizerConfig& cfg) {
    return json{{"score", score_kind_name(cfg.mode.kind)},
                {"alpha", cfg.mode.alpha},
                {"k1", s.get_double("k1", 1.2)},
                {"b", s.get_double("b", 0.75)},
                {"n", cfg.n_docs},
                {"k", cfg.top_k},
                {"r0", cfg.r_initial},
                {"ri", cfg.r_step},
                {"iters", cfg.max_iters},
                {"temperature", cfg.temperature},
                {"expansion", cfg.expansion_enabled},
                {"seed", cfg.seed},
                {"doc_token_limit", cfg.doc_token_limit},
                {"rephraser", s.get_or("rephraser", "mock-echo")},
                {"prompt_version", kPromptTemplateVersion}};
}

std::vector<std::string> report_metadata(const Settings& s) {
    std::vector<std::string> lines;
    std::string meta_path = (fs::path(out_dir(s)) / "run_meta.json").string();
    if (file_exists(meta_path)) {
        json meta = json::parse(read_file(meta_path), nullptr, false);
        if (!meta.is_discarded() && meta.is_object()) {
            for (auto it = meta.begin(); it != meta.end(); ++it) {
                lines.push_back(it.key() + "=" +
                                (it.value().is_string() ? it.value().get<std::string>()
                                                        : it.value().dump()));
            }
            std::sort(lines.begin(), lines.end());
        }
    }
    lines.push_back("final=" + s.get_or("final", "sparse"));
    lines.push_back(std::string("union=") + (s.get_bool("union", false) ? "on" : "off"));
    return lines;
}

}  // namespace

void cmd_index(const Settings& settings, std::ostream& log) {
    std::string corpus_path = settings.require("corpus");
    require_file(corpus_path, "corpus");

    std::vector<Document> docs = parse_corpus(corpus_path);
    InvertedIndex index = InvertedIndex::build(docs);
    index.save(sparse_path(settings));
    log << "indexed " << index.total_docs() << " documents (avg length "
        << format_double(index.avg_doc_length()) << ") -> " << sparse_path(settings)
        << "\n";

    if (auto embeddings = settings.get("embeddings"); embeddings && !embeddings->empty()) {
        require_file(*embeddings, "embeddings");
        auto dim = static_cast<std::size_t>(settings.get_int("dim", 0));
        if (dim == 0) {
            // Infer the dimension from the first record.
            std::string text = read_file(*embeddings);
            for_each_line(text, [&](std::size_t, std::string_view line) {
                if (dim != 0 || trim(line).empty()) return;
                json obj = json::parse(line, nullptr, false);
                if (!obj.is_discarded() && obj.contains("vector") &&
                    obj["vector"].is_array()) {
                    dim = obj["vector"].size();
                }
            });
            if (dim == 0) {
                throw Error(ErrorCode::InvalidArgument,
                            "cannot infer embedding dimension from " + *embeddings);
            }
        }
        EmbeddingStore store = EmbeddingStore::load_jsonl(*embeddings, dim);
        store.save(dense_path(settings));
        log << "stored " << store.size() << " embeddings (dim " << store.dim() << ") -> "
            << dense_path(settings) << "\n";
    }
}

std::size_t cmd_optimize(const Settings& settings, std::ostream& log) {
    std::string corpus_path = settings.require("corpus");
    std::string queries_path = settings.require("queries");
    require_file(corpus_path, "corpus");
    require_file(queries_path, "queries");

    OptimizerConfig cfg = optimizer_config(settings);
    Bm25Params params = bm25_params(settings);
    bool need_dense = cfg.mode.kind != ScoreKind::Bm25;
    LoadedBackends backends = load_backends(settings, true, need_dense);

    std::vector<Document> corpus = parse_corpus(corpus_path);
    std::vector<QueryRecord> queries = parse_queries(queries_path);

    fs::path out(out_dir(settings));
    fs::create_directories(out / "traces");
    std::string optimized_path = (out / "optimized.jsonl").string();
    write_file((out / "run_meta.json").string(), run_meta(settings, cfg).dump(2) + "\n");

    std::unordered_set<std::string> done;
    if (file_exists(optimized_path)) {
        for (const auto& row : read_optimized(optimized_path)) {
            done.insert(row.query_id);
        }
    }

    std::vector<const QueryRecord*> pending;
    for (const auto& q : queries) {
        if (!done.contains(q.id)) pending.push_back(&q);
    }
    log << "optimizing " << pending.size() << " queries (" << done.size()
        << " already done)\n";

    std::ofstream out_file(optimized_path, std::ios::app);
    if (!out_file) {
        throw Error(ErrorCode::Io, "cannot open " + optimized_path + " for append");
    }

    std::mutex io_mu;
    std::atomic<std::size_t> failed{0};
    auto jobs = static_cast<std::size_t>(settings.get_int("jobs", 1));

    parallel_for(pending.size(), jobs, [&](std::size_t i) {
        const QueryRecord& query = *pending[i];
        std::string trace_path = (out / "traces" / (sanitize_id(query.id) + ".jsonl")).string();
        std::ofstream trace(trace_path, std::ios::trunc);

        OptimizeHooks hooks;
        hooks.on_entry = [&](const QueryBucketEntry& e) {
            trace << json{{"type", "entry"},
                          {"text", e.query_text},
                          {"score", e.score},
                          {"iteration", e.iteration}}
                         .dump()
                  << "\n";
            trace.flush();
        };
        hooks.on_prompt = [&](std::size_t iteration, const std::string& prompt) {
            trace << json{{"type", "prompt"},
                          {"iteration", iteration},
                          {"hash", hash_hex(prompt)},
                          {"version", kPromptTemplateVersion}}
                         .dump()
                  << "\n";
            trace.flush();
        };

        try {
            auto rephraser = make_rephraser(settings);
            OptimizationResult result =
                optimize_query(query, cfg, backends.view(params), corpus, *rephraser, hooks);
            json row = {{"query_id", query.id},
                        {"original", query.text},
                        {"best_query", result.best_query},
                        {"best_score", result.best_score},
                        {"baseline_score", result.trace.original().score},
                        {"iterations", result.iterations_run}};
            std::lock_guard lock(io_mu);
            out_file << row.dump() << "\n";
            out_file.flush();
        } catch (const std::exception& e) {
            failed.fetch_add(1);
            std::lock_guard lock(io_mu);
            log << "error: query " << query.id << ": " << e.what()
                << " (partial trace at " << trace_path << ")\n";
        }
    });

    log << "optimize finished, " << failed.load() << " failed\n";
    return failed.load();
}

std::string cmd_evaluate(const Settings& settings, std::ostream& log) {
    std::string qrels_path = settings.require("qrels");
    require_file(qrels_path, "qrels");
    fs::path out(out_dir(settings));
    std::string optimized_path =
        settings.get_or("optimized", (out / "optimized.jsonl").string());
    require_file(optimized_path, "optimized queries (run `qoqa optimize` first)");

    Qrels qrels = parse_qrels(qrels_path);
    std::vector<OptimizedRow> rows = read_optimized(optimized_path);
    std::sort(rows.begin(), rows.end(),
              [](const OptimizedRow& a, const OptimizedRow& b) {
                  return a.query_id < b.query_id;
              });

    std::string final_kind = settings.get_or("final", "sparse");
    if (final_kind != "sparse" && final_kind != "dense") {
        throw Error(ErrorCode::InvalidArgument,
                    "unknown final retriever \"" + final_kind +
                        "\" (expected sparse|dense)");
    }
    bool union_rankings = settings.get_bool("union", false);
    Bm25Params params = bm25_params(settings);
    LoadedBackends backends =
        load_backends(settings, final_kind == "sparse", final_kind == "dense");

    auto retrieve_final = [&](const std::string& text) -> std::vector<ScoredDoc> {
        if (text.empty()) return {};
        if (final_kind == "sparse") {
            return backends.sparse->search(params, text, kEvalDepth);
        }
        return backends.store->search(backends.provider->embed(text), kEvalDepth);
    };

    struct QueryResult {
        std::vector<ScoredDoc> original;
        std::vector<ScoredDoc> best;
    };
    std::vector<QueryResult> results(rows.size());
    auto jobs = static_cast<std::size_t>(settings.get_int("jobs", 1));
    parallel_for(rows.size(), jobs, [&](std::size_t i) {
        results[i].original = retrieve_final(rows[i].original);
        results[i].best = rows[i].best_query == rows[i].original
                              ? results[i].original
                              : retrieve_final(rows[i].best_query);
        if (union_rankings) {
            std::map<std::string, double> merged;
            for (const auto& h : results[i].original) {
                merged[h.doc_id] = h.score;
            }
            for (const auto& h : results[i].best) {
                auto it = merged.find(h.doc_id);
                merged[h.doc_id] = it == merged.end() ? h.score : std::max(it->second, h.score);
            }
            std::vector<ScoredDoc> fused;
            fused.reserve(merged.size());
            for (const auto& [id, score] : merged) fused.push_back(ScoredDoc{id, score});
            std::sort(fused.begin(), fused.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.doc_id < b.doc_id;
            });
            if (fused.size() > kEvalDepth) fused.resize(kEvalDepth);
            results[i].best = std::move(fused);
        }
    });

    TrecRun original_run;
    TrecRun qoqa_run;
    std::string qoqa_tag = union_rankings ? "qoqa-union" : "qoqa";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::pair<std::string, double>> ranked;
        for (const auto& h : results[i].original) ranked.emplace_back(h.doc_id, h.score);
        original_run.add_ranking(rows[i].query_id, ranked, "original");
        ranked.clear();
        for (const auto& h : results[i].best) ranked.emplace_back(h.doc_id, h.score);
        qoqa_run.add_ranking(rows[i].query_id, ranked, qoqa_tag);
    }

    fs::create_directories(out / "runs");
    write_trec_run(original_run, (out / "runs" / "original.trec").string());
    write_trec_run(qoqa_run, (out / "runs" / (qoqa_tag + ".trec")).string());

    RunComparison cmp = compare_runs({{"original", original_run}, {qoqa_tag, qoqa_run}},
                                     qrels, kEvalDepth);
    std::string table = cmp.to_table(report_metadata(settings));
    write_file((out / "report.tsv").string(), cmp.to_tsv());
    write_file((out / "report.txt").string(), table);
    log << "evaluated " << rows.size() << " queries -> " << (out / "report.txt").string()
        << "\n";
    return table;
}

std::string cmd_report(const Settings& settings, std::ostream& log) {
    std::string text;

    if (auto runs_spec = settings.get("runs"); runs_spec && !runs_spec->empty()) {
        Qrels qrels = parse_qrels(settings.require("qrels"));
        std::vector<std::pair<std::string, TrecRun>> runs;
        std::size_t pos = 0;
        while (pos <= runs_spec->size()) {
            std::size_t sep = runs_spec->find(';', pos);
            std::string item = runs_spec->substr(
                pos, sep == std::string::npos ? std::string::npos : sep - pos);
            pos = sep == std::string::npos ? runs_spec->size() + 1 : sep + 1;
            item = trim(item);
            if (item.empty()) continue;
            std::size_t eq = item.find('=');
            if (eq == std::string::npos) {
                throw Error(ErrorCode::InvalidArgument,
                            "bad runs entry \"" + item + "\" (expected name=path)");
            }
            runs.emplace_back(trim(item.substr(0, eq)),
                              read_trec_run(trim(item.substr(eq + 1))));
        }
        RunComparison cmp = compare_runs(runs, qrels, kEvalDepth);
        text += cmp.to_table();
    }

    if (auto optimized = settings.get("optimized"); optimized && !optimized->empty()) {
        std::vector<OptimizedRow> rows = read_optimized(*optimized);
        if (!rows.empty()) {
            double base_sum = 0.0;
            double best_sum = 0.0;
            std::size_t improved = 0;
            std::size_t regressed = 0;
            for (const auto& r : rows) {
                base_sum += r.baseline_score;
                best_sum += r.best_score;
                if (r.best_score > r.baseline_score) ++improved;
                if (r.best_score < r.baseline_score) ++regressed;
            }
            auto n = static_cast<double>(rows.size());
            char buf[256];
            std::snprintf(buf, sizeof(buf),
                          "optimized queries: %zu\nmean alignment score: %.4f -> %.4f "
                          "(delta %+.4f)\nimproved: %zu  regressed: %zu\n",
                          rows.size(), base_sum / n, best_sum / n,
                          (best_sum - base_sum) / n, improved, regressed);
            if (!text.empty()) text += "\n";
            text += buf;
        }
    }

    if (text.empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    "report: nothing to do (set `runs` and/or `optimized`)");
    }
    log << text;
    return text;
}

}  // namespace qoqa
