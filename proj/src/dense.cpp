#include "hybridir/dense.hpp"

#include <cmath>
#include <thread>

#include "hybridir/error.hpp"
#include "io.hpp"
#include "json.hpp"

namespace hybridir::dense {

namespace {

constexpr std::string_view kMagic = "EMB1";

double squared_norm(std::span<const float> v) { return dot(v, v); }

}  // namespace

double dot(std::span<const float> a, std::span<const float> b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return total;
}

double cosine(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw DimensionError("cosine of vectors with different dimensions");
    double na = std::sqrt(squared_norm(a));
    double nb = std::sqrt(squared_norm(b));
    if (na == 0.0 || nb == 0.0) throw NumericError("cosine of a zero vector");
    return dot(a, b) / (na * nb);
}

EmbeddingStore EmbeddingStore::create(std::size_t dim, std::vector<std::string> ids, std::vector<float> data) {
    if (dim == 0) throw DimensionError("embedding dimension must be at least 1");
    if (data.size() != ids.size() * dim) {
        throw DimensionError("matrix holds " + std::to_string(data.size()) + " values, expected " +
                             std::to_string(ids.size()) + " x " + std::to_string(dim));
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) throw NumericError("non-finite value in row " + std::to_string(i / dim));
    }
    EmbeddingStore store;
    store.dim_ = dim;
    store.ids_ = std::move(ids);
    store.data_ = std::move(data);
    return store;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& vectors, const std::filesystem::path& ids_path) {
    auto in = io::open_in(vectors, true);
    io::BinaryReader r(in, vectors.string());
    r.expect_magic(kMagic);
    auto dim = r.get<std::uint32_t>();
    auto count = r.get<std::uint32_t>();
    std::vector<float> data(static_cast<std::size_t>(dim) * count);
    try {
        r.bytes(data.data(), data.size() * sizeof(float));
    } catch (const FormatError&) {
        throw DimensionError(vectors.string() + ": payload shorter than the header's " + std::to_string(count) + " x " +
                             std::to_string(dim) + " floats");
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw DimensionError(vectors.string() + ": payload longer than the header's " + std::to_string(count) + " x " +
                             std::to_string(dim) + " floats");
    }
    std::vector<std::string> ids;
    io::for_each_line(ids_path, [&](std::string_view line, std::size_t number) {
        if (line.find_first_not_of(" \t") == std::string_view::npos) return;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(ids_path.string(), number, std::string("malformed JSON: ") + e.what());
        }
        if (record.is_string()) {
            ids.push_back(record.get<std::string>());
        } else if (record.is_object() && record.contains("_id") && record["_id"].is_string()) {
            ids.push_back(record["_id"].get<std::string>());
        } else {
            throw ParseError(ids_path.string(), number, "expected {\"_id\": str} or a JSON string");
        }
    });
    if (ids.size() != count) {
        throw DimensionError(ids_path.string() + " lists " + std::to_string(ids.size()) + " ids but " +
                             vectors.string() + " holds " + std::to_string(count) + " vectors");
    }
    return create(dim, std::move(ids), std::move(data));
}

void EmbeddingStore::save(const std::filesystem::path& vectors, const std::filesystem::path& ids_path) const {
    {
        auto out = io::open_out(vectors, true);
        io::BinaryWriter w(out);
        w.bytes(kMagic.data(), kMagic.size());
        w.put<std::uint32_t>(static_cast<std::uint32_t>(dim_));
        w.put<std::uint32_t>(static_cast<std::uint32_t>(ids_.size()));
        w.bytes(data_.data(), data_.size() * sizeof(float));
        if (!out) throw IoError("write failed: " + vectors.string());
    }
    auto out = io::open_out(ids_path);
    for (const auto& id : ids_) out << nlohmann::json{{"_id", id}}.dump() << '\n';
    if (!out) throw IoError("write failed: " + ids_path.string());
}

EmbeddingStore EmbeddingStore::normalize() const {
    EmbeddingStore out = *this;
    for (std::size_t i = 0; i < size(); ++i) {
        double norm = std::sqrt(squared_norm(row(i)));
        if (norm == 0.0) throw NumericError("row " + std::to_string(i) + " (\"" + ids_[i] + "\") has zero norm");
        for (std::size_t j = 0; j < dim_; ++j) {
            out.data_[i * dim_ + j] = static_cast<float>(static_cast<double>(data_[i * dim_ + j]) / norm);
        }
    }
    out.normalized_ = true;
    return out;
}

RankedList dense_search(const EmbeddingStore& store, std::span<const float> query, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    if (!store.normalized()) throw InvalidArgument("dense_search needs a normalized store");
    if (query.size() != store.dim()) {
        throw DimensionError("query has dimension " + std::to_string(query.size()) + ", store has " +
                             std::to_string(store.dim()));
    }
    double qnorm = std::sqrt(squared_norm(query));
    if (qnorm == 0.0) throw NumericError("query vector has zero norm");
    RankedList out;
    out.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) out.push_back({store.ids()[i], dot(store.row(i), query) / qnorm});
    select_top_k(out, k);
    return out;
}

RetrievalRun dense_search_batch(const EmbeddingStore& store, const EmbeddingStore& queries, std::size_t k,
                                unsigned threads) {
    if (queries.dim() != store.dim() && queries.size() > 0) {
        throw DimensionError("query embeddings have dimension " + std::to_string(queries.dim()) + ", store has " +
                             std::to_string(store.dim()));
    }
    std::vector<RankedList> results(queries.size());
    unsigned workers = threads ? threads : io::thread_count();
    workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(workers, queries.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < queries.size(); ++i) results[i] = dense_search(store, queries.row(i), k);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < queries.size(); i += workers) {
                        results[i] = dense_search(store, queries.row(i), k);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    RetrievalRun run;
    for (std::size_t i = 0; i < queries.size(); ++i) run.queries[queries.ids()[i]] = std::move(results[i]);
    return run;
}

}  // namespace hybridir::dense
