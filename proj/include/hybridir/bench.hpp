#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hybridir/hybrid.hpp"
#include "hybridir/metrics.hpp"
#include "hybridir/sparse.hpp"

namespace hybridir::bench {

struct DatasetSpec {
    std::string name;
    std::string group;
    std::filesystem::path corpus;
    std::filesystem::path queries;
    std::filesystem::path qrels;
    // Dense retrievers read EMB1 vectors plus id files for both sides.
    std::optional<std::filesystem::path> doc_embeddings;
    std::optional<std::filesystem::path> doc_embedding_ids;
    std::optional<std::filesystem::path> query_embeddings;
    std::optional<std::filesystem::path> query_embedding_ids;
    // Impact retrievers read sparse-vector JSONL for both sides.
    std::optional<std::filesystem::path> doc_sparse;
    std::optional<std::filesystem::path> query_sparse;
};

enum class RetrieverKind { kBm25, kImpact, kDense, kHybrid };

struct RetrieverSpec {
    std::string name;
    RetrieverKind kind = RetrieverKind::kBm25;
    sparse::Bm25Params bm25;
    std::optional<std::filesystem::path> stopwords;
    std::optional<std::filesystem::path> lemmas;
    bool lowercase = true;
    // Hybrid only.
    std::vector<std::string> members;
    std::optional<std::filesystem::path> model;
    std::vector<std::string> train_datasets;
    hybrid::LtrParams ltr;
    std::size_t pool_depth = hybrid::kDefaultPoolDepth;
};

struct BenchmarkConfig {
    std::vector<DatasetSpec> datasets;
    std::vector<RetrieverSpec> retrievers;
    /// Group display order; defaults to first appearance among datasets.
    std::vector<std::string> groups;
    std::set<std::string> excluded;
    metrics::MetricKs ks;
    /// Length of every written run.
    std::size_t depth = 100;

    /// Throws InvalidArgument on duplicate names, unknown hybrid members,
    /// hybrids with fewer than two members or without a model source.
    void validate() const;
};

/// JSON config; relative paths resolve against the config's directory.
BenchmarkConfig load_benchmark_config(const std::filesystem::path& path);
BenchmarkConfig parse_benchmark_config(const std::string& json_text, const std::filesystem::path& base_dir);

struct BenchmarkResult {
    /// retriever -> dataset -> metrics.
    std::map<std::string, std::map<std::string, metrics::DatasetMetrics>> metrics;
    /// retriever -> NDCG group table, in config retriever order.
    std::vector<std::pair<std::string, metrics::GroupTable>> ndcg_tables;
    std::vector<std::filesystem::path> written;
};

/// Writes, under `out_dir`:
///   runs/<retriever>/<dataset>.trec
///   reports/<retriever>/<dataset>.json
///   models/<hybrid>.lmrt (trained hybrids only)
///   report.json, report.txt
/// Output depends only on the config and its input files.
BenchmarkResult run_benchmark(const BenchmarkConfig& config, const std::filesystem::path& out_dir,
                              unsigned threads = 0);

inline constexpr double kReferenceQps = 1500.0;

struct ThroughputConfig {
    std::size_t n_queries = 1000;
    std::size_t candidates_per_query = 200;
    std::size_t indexes = 2;
    std::size_t k = 100;
    std::uint64_t seed = 7;
    unsigned threads = 0;
};

struct ThroughputReport {
    std::size_t queries = 0;
    std::size_t candidates_per_query = 0;
    std::size_t trees = 0;
    std::size_t max_depth = 0;
    unsigned threads = 1;
    double single_seconds = 0.0;
    double multi_seconds = 0.0;
    double single_qps = 0.0;
    double multi_qps = 0.0;
    double reference_qps = kReferenceQps;

    std::string to_json() const;
};

/// Full binary trees of exactly `depth` levels with random splits and
/// leaves; stands in for a trained model when only speed matters.
hybrid::TreeEnsemble random_ensemble(std::size_t feature_count, std::size_t n_trees, std::size_t depth,
                                     std::uint64_t seed);

/// Times pool + feature extraction + prediction + top-k on synthetic runs.
/// Each of `indexes` runs holds candidates_per_query / indexes disjoint
/// documents, so the pool size equals candidates_per_query.
ThroughputReport throughput_bench(const hybrid::TreeEnsemble& ensemble, const ThroughputConfig& config);

}  // namespace hybridir::bench
