#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hybridir/corpus.hpp"
#include "hybridir/run.hpp"

namespace hybridir::sparse {

struct AnalyzerConfig {
    bool lowercase = true;
    std::unordered_set<std::string> stopwords;
    /// surface -> lemma, applied after lowercasing and stopword removal.
    std::unordered_map<std::string, std::string> lemmas;
};

/// Word tokens are maximal letter/digit runs.
class Analyzer {
   public:
    Analyzer() = default;
    explicit Analyzer(AnalyzerConfig config);

    std::vector<std::string> analyze(std::string_view text) const;
    const AnalyzerConfig& config() const noexcept { return config_; }

   private:
    AnalyzerConfig config_;
};

/// Stopword list (one per line) and lemma table (surface<TAB>lemma); either
/// path may be empty.
AnalyzerConfig load_analyzer_config(const std::filesystem::path& stopwords, const std::filesystem::path& lemmas,
                                    bool lowercase = true);

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
};

/// Exact BM25 over an in-memory inverted index:
///   sum_t idf(t) * tf / (tf + k1 * (1 - b + b * dl / avgdl))
///   idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
/// A document is indexed as its title followed by its text.
class Bm25Index {
   public:
    /// Throws InvalidArgument on an empty corpus or out-of-range parameters.
    static Bm25Index build(const CorpusStore& corpus, Analyzer analyzer = {}, Bm25Params params = {});

    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    double avg_doc_length() const noexcept { return avg_doc_length_; }
    std::uint32_t doc_length(std::string_view doc_id) const;
    std::size_t document_frequency(std::string_view term) const;
    std::uint32_t term_frequency(std::string_view term, std::string_view doc_id) const;
    double idf(std::string_view term) const;
    const Bm25Params& params() const noexcept { return params_; }
    const Analyzer& analyzer() const noexcept { return analyzer_; }
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    std::size_t vocabulary_size() const noexcept { return postings_.size(); }

    /// Score of one document for already-analyzed terms; repeated terms
    /// count once per occurrence. Throws InvalidArgument for unknown docs.
    double score(std::span<const std::string> query_terms, std::string_view doc_id) const;

    /// Top-k documents sharing at least one term with the query.
    RankedList search(std::string_view query_text, std::size_t k) const;
    RankedList search_terms(std::span<const std::string> query_terms, std::size_t k) const;

    void save(const std::filesystem::path& path) const;
    static Bm25Index load(const std::filesystem::path& path);

   private:
    double term_weight(double idf, std::uint32_t tf, std::uint32_t doc) const;
    std::uint32_t internal_doc(std::string_view doc_id) const;

    Analyzer analyzer_;
    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> doc_lookup_;
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

using TermId = std::uint32_t;

/// Non-negative term weights, sorted by term id, no duplicates.
class SparseVector {
   public:
    SparseVector() = default;
    /// Throws InvalidArgument on negative or non-finite weights or duplicate
    /// terms.
    static SparseVector from_entries(std::vector<std::pair<TermId, float>> entries);

    std::span<const std::pair<TermId, float>> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    double dot(const SparseVector& other) const;
    SparseVector scaled(float factor) const;

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

   private:
    std::vector<std::pair<TermId, float>> entries_;
};

using NamedSparseVectors = std::vector<std::pair<std::string, SparseVector>>;

/// JSONL records `{"_id": str, "vector": {"<term id>": weight, ...}}`.
NamedSparseVectors load_sparse_vectors(const std::filesystem::path& path);
void save_sparse_vectors(const NamedSparseVectors& vectors, const std::filesystem::path& path);

struct ImpactPosting {
    std::uint32_t doc;
    float weight;
};

/// Inverted index over precomputed term weights; scores are sparse dot
/// products accumulated in double precision.
class ImpactIndex {
   public:
    static ImpactIndex build(const NamedSparseVectors& docs);

    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    std::size_t posting_count() const noexcept;
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }

    /// Documents with a strictly positive score, top-k in canonical order.
    RankedList search(const SparseVector& query, std::size_t k) const;
    SparseVector reconstruct(std::string_view doc_id) const;

    void save(const std::filesystem::path& path) const;
    static ImpactIndex load(const std::filesystem::path& path);

   private:
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> doc_lookup_;
    std::unordered_map<TermId, std::vector<ImpactPosting>> postings_;
};

enum class IndexKind : std::uint8_t { kBm25 = 0, kImpact = 1 };

/// Reads only the header of a saved index.
IndexKind peek_index_kind(const std::filesystem::path& path);

}  // namespace hybridir::sparse
