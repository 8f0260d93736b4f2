#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hybridir/run.hpp"

namespace hybridir::dense {

/// Row-major f32 matrix with one row per id.
class EmbeddingStore {
   public:
    EmbeddingStore() = default;

    /// Throws DimensionError on shape mismatch and NumericError on
    /// non-finite values (naming the 0-based row).
    static EmbeddingStore create(std::size_t dim, std::vector<std::string> ids, std::vector<float> data);

    /// `EMB1` binary matrix plus a JSONL id file (`{"_id": ...}` per line).
    static EmbeddingStore load(const std::filesystem::path& vectors, const std::filesystem::path& ids);
    void save(const std::filesystem::path& vectors, const std::filesystem::path& ids) const;

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool normalized() const noexcept { return normalized_; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

    /// Unit-L2 copy. Throws NumericError on a zero-norm row.
    EmbeddingStore normalize() const;

   private:
    std::size_t dim_ = 0;
    std::vector<std::string> ids_;
    std::vector<float> data_;
    bool normalized_ = false;
};

/// Dot product accumulated in double precision.
double dot(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const float> a, std::span<const float> b);

/// Exact top-k by cosine similarity. The store must be normalized; the
/// query is normalized here. Every document is ranked, including
/// zero and negative similarities.
RankedList dense_search(const EmbeddingStore& store, std::span<const float> query, std::size_t k);

/// Runs every row of `queries` against `store`, splitting queries across
/// `threads` workers (0 = io default). Output does not depend on the
/// thread count.
RetrievalRun dense_search_batch(const EmbeddingStore& store, const EmbeddingStore& queries, std::size_t k,
                                unsigned threads = 0);

}  // namespace hybridir::dense
