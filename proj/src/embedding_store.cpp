#include "embedding_store.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "common.hpp"

namespace qoqa {

using nlohmann::json;

namespace {
constexpr char kMagic[] = "QOQADVEC";
constexpr uint32_t kVersion = 1;
}  // namespace

double dense_score(const Vector& query_vec, const Vector& doc_vec) {
    if (query_vec.size() != doc_vec.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "inner product over vectors of dimension " +
                        std::to_string(query_vec.size()) + " and " +
                        std::to_string(doc_vec.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < query_vec.size(); ++i) {
        sum += query_vec[i] * doc_vec[i];
    }
    return sum;
}

EmbeddingStore EmbeddingStore::load_jsonl(const std::string& path, std::size_t dim) {
    if (dim < 1) {
        throw Error(ErrorCode::InvalidArgument, "embedding dimension must be >= 1");
    }
    std::string text = read_file(path);
    EmbeddingStore store(dim);
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty()) return;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("_id") ||
            !obj["_id"].is_string() || !obj.contains("vector") ||
            !obj["vector"].is_array()) {
            throw Error::malformed_line(path, line_no,
                                        "expected {\"_id\": ..., \"vector\": [...]}");
        }
        std::string id = obj["_id"].get<std::string>();
        const auto& arr = obj["vector"];
        if (arr.size() != dim) {
            throw Error(ErrorCode::DimensionMismatch,
                        path + ":" + std::to_string(line_no) + ": vector for \"" + id +
                            "\" has " + std::to_string(arr.size()) + " components, expected " +
                            std::to_string(dim));
        }
        Vector vec;
        vec.reserve(dim);
        for (const auto& v : arr) {
            if (!v.is_number()) {
                throw Error::malformed_line(path, line_no, "non-numeric vector component");
            }
            vec.push_back(v.get<double>());
        }
        if (store.vectors_.contains(id)) {
            throw Error::duplicate_id(path, line_no, id);
        }
        store.insert(id, std::move(vec));
    });
    return store;
}

void EmbeddingStore::insert(const std::string& doc_id, Vector vec) {
    if (dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "vector for \"" + doc_id + "\" has " + std::to_string(vec.size()) +
                        " components, expected " + std::to_string(dim_));
    }
    for (double v : vec) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument,
                        "non-finite vector component for \"" + doc_id + "\"");
        }
    }
    if (!vectors_.emplace(doc_id, std::move(vec)).second) {
        throw Error(ErrorCode::DuplicateId, "duplicate id \"" + doc_id + "\"");
    }
}

const Vector* EmbeddingStore::find(const std::string& doc_id) const {
    auto it = vectors_.find(doc_id);
    return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<ScoredDoc> EmbeddingStore::search(const Vector& query_vec,
                                              std::size_t n) const {
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "search: n must be >= 1");
    }
    if (vectors_.empty()) {
        throw Error(ErrorCode::EmptyStore, "search over empty embedding store");
    }
    if (query_vec.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "query vector has " + std::to_string(query_vec.size()) +
                        " components, expected " + std::to_string(dim_));
    }
    std::vector<ScoredDoc> hits;
    hits.reserve(vectors_.size());
    for (const auto& [id, vec] : vectors_) {
        hits.push_back(ScoredDoc{id, dense_score(query_vec, vec)});
    }
    std::sort(hits.begin(), hits.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (hits.size() > n) hits.resize(n);
    return hits;
}

std::string EmbeddingStore::serialize() const {
    std::string out;
    out.append(kMagic, sizeof(kMagic) - 1);
    put_u32(out, kVersion);
    put_u64(out, dim_);
    put_u64(out, vectors_.size());
    for (const auto& [id, vec] : vectors_) {
        put_str(out, id);
        for (double v : vec) put_f64(out, v);
    }
    return out;
}

EmbeddingStore EmbeddingStore::deserialize(std::string_view bytes) {
    if (bytes.size() < sizeof(kMagic) - 1 ||
        bytes.substr(0, sizeof(kMagic) - 1) != kMagic) {
        throw Error(ErrorCode::Io, "not an embedding store artifact (bad magic)");
    }
    BinaryReader r(bytes.substr(sizeof(kMagic) - 1));
    uint32_t version = r.u32();
    if (version != kVersion) {
        throw Error(ErrorCode::Io,
                    "unsupported embedding store version " + std::to_string(version));
    }
    EmbeddingStore store(static_cast<std::size_t>(r.u64()));
    uint64_t count = r.u64();
    for (uint64_t i = 0; i < count; ++i) {
        std::string id = r.str();
        Vector vec(store.dim_);
        for (auto& v : vec) v = r.f64();
        store.insert(id, std::move(vec));
    }
    if (!r.at_end()) {
        throw Error(ErrorCode::Io, "trailing bytes in embedding store artifact");
    }
    return store;
}

void EmbeddingStore::save(const std::string& path) const {
    write_file(path, serialize());
}

EmbeddingStore EmbeddingStore::load(const std::string& path) {
    return deserialize(read_file(path));
}

}  // namespace qoqa
