#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hybridir/corpus.hpp"
#include "hybridir/run.hpp"

namespace hybridir::hybrid {

/// (score, list max, list min, present) per member index.
inline constexpr std::size_t kFeaturesPerIndex = 4;
inline constexpr std::size_t kDefaultPoolDepth = 100;

/// Union of the top `depth` documents of every run, in first-seen order
/// (run by run, rank by rank).
std::vector<std::string> build_candidate_pool(std::span<const RankedList> runs, std::size_t depth = kDefaultPoolDepth);

/// Per-query view of the member runs truncated to `depth`: the candidate
/// pool plus per-run score lookups and list extremes.
class QueryFeatures {
   public:
    QueryFeatures(std::span<const RankedList> runs, std::size_t depth = kDefaultPoolDepth);

    const std::vector<std::string>& pool() const noexcept { return pool_; }
    std::size_t feature_count() const noexcept { return stats_.size() * kFeaturesPerIndex; }

    /// Writes the feature row for `doc_id` into `out` (size feature_count()).
    /// A run that does not list the document contributes four zeros.
    void extract(const std::string& doc_id, std::span<double> out) const;
    /// Rows for the whole pool, row-major.
    std::vector<double> pool_rows() const;

   private:
    struct RunStats {
        std::unordered_map<std::string, double> scores;
        double max = 0.0;
        double min = 0.0;
    };
    std::vector<RunStats> stats_;
    std::vector<std::string> pool_;
};

std::vector<double> extract_features(std::span<const RankedList> runs, const std::string& candidate,
                                     std::size_t depth = kDefaultPoolDepth);

struct LtrParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 6;
    double row_subsample = 0.75;
    double col_subsample_per_tree = 0.9;
    double learning_rate = 0.3;
    double sigma = 1.0;
    double l2_leaf_reg = 1.0;
    double min_child_weight = 1.0;
    /// Rank cutoff used inside |delta NDCG|; 0 means the full list.
    std::size_t ndcg_truncation = 0;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument when out of range.
    void validate() const;
};

/// Flat binary tree; a node with feature < 0 is a leaf. Rows with
/// x[feature] < threshold go left.
struct TreeNode {
    std::int32_t feature = -1;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double threshold = 0.0;
    double value = 0.0;
};

class RegressionTree {
   public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    double predict(std::span<const double> row) const {
        std::int32_t i = 0;
        while (nodes_[i].feature >= 0) {
            const auto& n = nodes_[i];
            i = row[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
        }
        return nodes_[i].value;
    }

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::size_t depth() const;
    std::size_t leaf_count() const;

   private:
    std::vector<TreeNode> nodes_;
};

/// Boosted trees over per-index feature quadruples. The score of a row is
/// sum_t learning_rate * leaf_t(row), accumulated in tree order.
class TreeEnsemble {
   public:
    TreeEnsemble() = default;
    /// Validates split features, child links and leaf values.
    TreeEnsemble(std::vector<RegressionTree> trees, std::size_t feature_count, double learning_rate);

    double predict(std::span<const double> row) const;
    /// `rows` is row-major with feature_count() columns.
    std::vector<double> predict_batch(std::span<const double> rows) const;

    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
    std::size_t feature_count() const noexcept { return feature_count_; }
    double learning_rate() const noexcept { return learning_rate_; }

    /// Training metadata carried in the model file.
    LtrParams params;
    std::size_t pool_depth = kDefaultPoolDepth;
    /// Member index names in feature order; empty when unknown.
    std::vector<std::string> index_names;

    /// Binary `LMRT1` layout (little-endian): magic, u32 version, u32
    /// feature_count, u32 pool_depth, params, index names, trees.
    void save(const std::filesystem::path& path) const;
    static TreeEnsemble load(const std::filesystem::path& path);

   private:
    std::vector<RegressionTree> trees_;
    std::size_t feature_count_ = 0;
    double learning_rate_ = 0.3;
};

/// One query's candidates with their feature rows and relevance grades.
struct QueryGroup {
    std::string query_id;
    std::vector<std::string> doc_ids;
    std::vector<double> features;  // row-major, doc_ids.size() x feature_count
    std::vector<int> grades;
};

/// Pools every query present in both the runs and the qrels; unjudged
/// candidates get grade 0. `runs` are member runs in feature order.
std::vector<QueryGroup> make_training_groups(std::span<const RetrievalRun> runs, const QrelSet& qrels,
                                             std::size_t depth = kDefaultPoolDepth);

/// Pairwise LambdaMART gradients for one group. For every pair with
/// grade_i > grade_j: lambda = -sigma / (1 + exp(sigma (s_i - s_j))) *
/// |delta NDCG_ij|; grad[i] += lambda, grad[j] -= lambda, and both hessians
/// gain sigma^2 rho (1 - rho) |delta NDCG_ij|. Ranks come from the current
/// scores (ties by position). Adds into `grad` and `hess`.
void accumulate_lambdas(std::span<const double> scores, std::span<const int> grades, double sigma,
                        std::size_t truncation, std::span<double> grad, std::span<double> hess);

/// |delta NDCG| of swapping documents i and j in the ranking implied by
/// `scores`.
double delta_ndcg(std::span<const double> scores, std::span<const int> grades, std::size_t i, std::size_t j,
                  std::size_t truncation);

struct TrainReport {
    /// Mean NDCG@10 over training groups: entry 0 before the first tree,
    /// entry t after tree t.
    std::vector<double> train_ndcg;
};

/// Throws InvalidArgument when no group holds two different grades.
TreeEnsemble train_lambdamart(std::span<const QueryGroup> groups, std::size_t feature_count, const LtrParams& params,
                              TrainReport* report = nullptr);

/// Pool, featurize, rescore and cut to k for one query.
RankedList fuse_query(std::span<const RankedList> runs, const TreeEnsemble& ensemble, std::size_t k);

/// Fuses every query that appears in any run. Throws DimensionError when
/// the number of runs does not match the model.
RetrievalRun fuse(std::span<const RetrievalRun> runs, const TreeEnsemble& ensemble, std::size_t k,
                  unsigned threads = 1);

}  // namespace hybridir::hybrid
