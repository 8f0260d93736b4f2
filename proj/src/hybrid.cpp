#include "hybridir/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <thread>
#include <unordered_set>

#include "hybridir/error.hpp"
#include "hybridir/metrics.hpp"
#include "io.hpp"

namespace hybridir::hybrid {

namespace {

constexpr std::string_view kMagic = "LMRT1";
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kMonitorCutoff = 10;

double rank_discount(std::size_t rank0, std::size_t truncation) {
    if (truncation != 0 && rank0 >= truncation) return 0.0;
    return 1.0 / std::log2(static_cast<double>(rank0) + 2.0);
}

// Position of every document when sorted by descending score, ties by index.
std::vector<std::size_t> ranks_of(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<std::size_t> rank(scores.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return rank;
}

double ideal_dcg(std::span<const int> grades, std::size_t truncation) {
    std::vector<int> sorted(grades.begin(), grades.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double ideal = 0.0;
    for (std::size_t r = 0; r < sorted.size(); ++r) {
        if (sorted[r] <= 0) break;
        ideal += sorted[r] * rank_discount(r, truncation);
    }
    return ideal;
}

double group_ndcg(const QueryGroup& group, std::span<const double> scores, std::size_t cutoff) {
    RankedList ranked;
    QueryJudgments judgments;
    for (std::size_t i = 0; i < group.doc_ids.size(); ++i) {
        ranked.push_back({group.doc_ids[i], scores[i]});
        judgments.emplace(group.doc_ids[i], group.grades[i]);
    }
    std::sort(ranked.begin(), ranked.end(), ranks_before);
    return metrics::ndcg_at_k(ranked, judgments, cutoff);
}

class TreeBuilder {
   public:
    TreeBuilder(std::span<const double> features, std::size_t feature_count, std::span<const double> grad,
                std::span<const double> hess, const LtrParams& params, std::vector<std::size_t> columns)
        : x_(features), f_(feature_count), grad_(grad), hess_(hess), params_(params), columns_(std::move(columns)) {}

    RegressionTree build(std::vector<std::uint32_t> rows) {
        nodes_.clear();
        grow(rows, 0);
        return RegressionTree(std::move(nodes_));
    }

   private:
    struct Split {
        double gain = 0.0;
        std::size_t feature = 0;
        double threshold = 0.0;
    };

    double score(double g, double h) const { return g * g / (h + params_.l2_leaf_reg); }

    std::int32_t grow(std::vector<std::uint32_t>& rows, std::size_t depth) {
        double g = 0.0;
        double h = 0.0;
        for (auto r : rows) {
            g += grad_[r];
            h += hess_[r];
        }
        auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(TreeNode{-1, -1, -1, 0.0, -g / (h + params_.l2_leaf_reg)});
        if (depth >= params_.max_depth || rows.size() < 2) return id;

        Split best;
        const double parent = score(g, h);
        std::vector<std::uint32_t> sorted;
        for (auto feature : columns_) {
            sorted = rows;
            std::stable_sort(sorted.begin(), sorted.end(),
                             [&](std::uint32_t a, std::uint32_t b) { return value(a, feature) < value(b, feature); });
            double gl = 0.0;
            double hl = 0.0;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                gl += grad_[sorted[i]];
                hl += hess_[sorted[i]];
                double here = value(sorted[i], feature);
                double next = value(sorted[i + 1], feature);
                if (here == next) continue;
                double hr = h - hl;
                if (hl < params_.min_child_weight || hr < params_.min_child_weight) continue;
                double gain = 0.5 * (score(gl, hl) + score(g - gl, hr) - parent);
                if (gain > best.gain + 1e-12) {
                    double threshold = here + (next - here) / 2.0;
                    if (!(threshold > here)) threshold = next;
                    best = {gain, feature, threshold};
                }
            }
        }
        if (best.gain <= 1e-12) return id;

        std::vector<std::uint32_t> left, right;
        for (auto r : rows) (value(r, best.feature) < best.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        nodes_[id].feature = static_cast<std::int32_t>(best.feature);
        nodes_[id].threshold = best.threshold;
        nodes_[id].value = 0.0;
        auto l = grow(left, depth + 1);
        nodes_[id].left = l;
        auto r = grow(right, depth + 1);
        nodes_[id].right = r;
        return id;
    }

    double value(std::uint32_t row, std::size_t feature) const { return x_[row * f_ + feature]; }

    std::span<const double> x_;
    std::size_t f_;
    std::span<const double> grad_;
    std::span<const double> hess_;
    const LtrParams& params_;
    std::vector<std::size_t> columns_;
    std::vector<TreeNode> nodes_;
};

std::size_t sample_size(double ratio, std::size_t n) {
    auto m = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
    return std::clamp<std::size_t>(m, 1, n);
}

}  // namespace

// ---------------------------------------------------------------- features

std::vector<std::string> build_candidate_pool(std::span<const RankedList> runs, std::size_t depth) {
    std::vector<std::string> pool;
    std::unordered_set<std::string> seen;
    for (const auto& run : runs) {
        std::size_t limit = std::min(depth, run.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (seen.insert(run[i].doc_id).second) pool.push_back(run[i].doc_id);
        }
    }
    return pool;
}

QueryFeatures::QueryFeatures(std::span<const RankedList> runs, std::size_t depth) {
    if (runs.empty()) throw InvalidArgument("need at least one run to build features");
    stats_.resize(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
        auto& st = stats_[r];
        std::size_t limit = std::min(depth, runs[r].size());
        st.scores.reserve(limit);
        for (std::size_t i = 0; i < limit; ++i) {
            double s = runs[r][i].score;
            st.scores.emplace(runs[r][i].doc_id, s);
            if (i == 0) {
                st.max = s;
                st.min = s;
            } else {
                st.max = std::max(st.max, s);
                st.min = std::min(st.min, s);
            }
        }
    }
    pool_ = build_candidate_pool(runs, depth);
}

void QueryFeatures::extract(const std::string& doc_id, std::span<double> out) const {
    for (std::size_t r = 0; r < stats_.size(); ++r) {
        auto* f = out.data() + r * kFeaturesPerIndex;
        const auto& st = stats_[r];
        auto it = st.scores.find(doc_id);
        if (it == st.scores.end()) {
            f[0] = f[1] = f[2] = f[3] = 0.0;
        } else {
            f[0] = it->second;
            f[1] = st.max;
            f[2] = st.min;
            f[3] = 1.0;
        }
    }
}

std::vector<double> QueryFeatures::pool_rows() const {
    const std::size_t width = feature_count();
    std::vector<double> rows(pool_.size() * width);
    for (std::size_t i = 0; i < pool_.size(); ++i) extract(pool_[i], std::span<double>(rows).subspan(i * width, width));
    return rows;
}

std::vector<double> extract_features(std::span<const RankedList> runs, const std::string& candidate, std::size_t depth) {
    QueryFeatures qf(runs, depth);
    std::vector<double> row(qf.feature_count());
    qf.extract(candidate, row);
    return row;
}

// ---------------------------------------------------------------- model

void LtrParams::validate() const {
    if (n_trees < 1) throw InvalidArgument("n_trees must be at least 1");
    if (max_depth < 1) throw InvalidArgument("max_depth must be at least 1");
    if (!(row_subsample > 0.0 && row_subsample <= 1.0)) throw InvalidArgument("row_subsample must be in (0, 1]");
    if (!(col_subsample_per_tree > 0.0 && col_subsample_per_tree <= 1.0)) {
        throw InvalidArgument("col_subsample_per_tree must be in (0, 1]");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidArgument("learning_rate must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
    if (!(l2_leaf_reg >= 0.0)) throw InvalidArgument("l2_leaf_reg must be non-negative");
    if (!(min_child_weight >= 0.0)) throw InvalidArgument("min_child_weight must be non-negative");
}

std::size_t RegressionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::size_t best = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [i, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (nodes_[i].feature >= 0) {
            stack.emplace_back(nodes_[i].left, d + 1);
            stack.emplace_back(nodes_[i].right, d + 1);
        }
    }
    return best;
}

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

TreeEnsemble::TreeEnsemble(std::vector<RegressionTree> trees, std::size_t feature_count, double learning_rate)
    : trees_(std::move(trees)), feature_count_(feature_count), learning_rate_(learning_rate) {
    if (!std::isfinite(learning_rate)) throw InvalidArgument("learning rate must be finite");
    for (std::size_t t = 0; t < trees_.size(); ++t) {
        const auto& nodes = trees_[t].nodes();
        if (nodes.empty()) throw InvalidArgument("tree " + std::to_string(t) + " has no nodes");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& n = nodes[i];
            if (n.feature >= 0) {
                if (static_cast<std::size_t>(n.feature) >= feature_count_) {
                    throw InvalidArgument("tree " + std::to_string(t) + " splits on feature " +
                                          std::to_string(n.feature) + " of " + std::to_string(feature_count_));
                }
                auto in_range = [&](std::int32_t c) {
                    return c > static_cast<std::int32_t>(i) && static_cast<std::size_t>(c) < nodes.size();
                };
                if (!in_range(n.left) || !in_range(n.right)) {
                    throw InvalidArgument("tree " + std::to_string(t) + " has an invalid child link at node " +
                                          std::to_string(i));
                }
                if (std::isnan(n.threshold)) throw InvalidArgument("NaN split threshold");
            } else if (!std::isfinite(n.value)) {
                throw InvalidArgument("tree " + std::to_string(t) + " has a non-finite leaf value");
            }
        }
    }
}

double TreeEnsemble::predict(std::span<const double> row) const {
    if (row.size() != feature_count_) {
        throw DimensionError("feature row has " + std::to_string(row.size()) + " values, model expects " +
                             std::to_string(feature_count_));
    }
    double score = 0.0;
    for (const auto& tree : trees_) score += learning_rate_ * tree.predict(row);
    return score;
}

std::vector<double> TreeEnsemble::predict_batch(std::span<const double> rows) const {
    if (feature_count_ == 0 || rows.size() % feature_count_ != 0) {
        throw DimensionError("feature matrix size " + std::to_string(rows.size()) + " is not a multiple of " +
                             std::to_string(feature_count_));
    }
    std::vector<double> out(rows.size() / feature_count_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict(rows.subspan(i * feature_count_, feature_count_));
    return out;
}

void TreeEnsemble::save(const std::filesystem::path& path) const {
    auto out = io::open_out(path, true);
    io::BinaryWriter w(out);
    w.bytes(kMagic.data(), kMagic.size());
    w.put<std::uint32_t>(kVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(feature_count_));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(pool_depth));
    w.put<double>(learning_rate_);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params.n_trees));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params.max_depth));
    w.put<double>(params.row_subsample);
    w.put<double>(params.col_subsample_per_tree);
    w.put<double>(params.learning_rate);
    w.put<double>(params.sigma);
    w.put<double>(params.l2_leaf_reg);
    w.put<double>(params.min_child_weight);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params.ndcg_truncation));
    w.put<std::uint64_t>(params.seed);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(index_names.size()));
    for (const auto& name : index_names) w.str(name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(trees_.size()));
    for (const auto& tree : trees_) {
        w.put<std::uint32_t>(static_cast<std::uint32_t>(tree.nodes().size()));
        for (const auto& n : tree.nodes()) {
            w.put<std::int32_t>(n.feature);
            w.put<std::int32_t>(n.left);
            w.put<std::int32_t>(n.right);
            w.put<double>(n.threshold);
            w.put<double>(n.value);
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

TreeEnsemble TreeEnsemble::load(const std::filesystem::path& path) {
    auto in = io::open_in(path, true);
    io::BinaryReader r(in, path.string());
    r.expect_magic(kMagic);
    auto version = r.get<std::uint32_t>();
    if (version != kVersion) {
        throw FormatError(path.string() + ": model version " + std::to_string(version) + ", this build reads " +
                          std::to_string(kVersion));
    }
    auto feature_count = r.get<std::uint32_t>();
    auto pool_depth = r.get<std::uint32_t>();
    auto lr = r.get<double>();
    LtrParams params;
    params.n_trees = r.get<std::uint32_t>();
    params.max_depth = r.get<std::uint32_t>();
    params.row_subsample = r.get<double>();
    params.col_subsample_per_tree = r.get<double>();
    params.learning_rate = r.get<double>();
    params.sigma = r.get<double>();
    params.l2_leaf_reg = r.get<double>();
    params.min_child_weight = r.get<double>();
    params.ndcg_truncation = r.get<std::uint32_t>();
    params.seed = r.get<std::uint64_t>();
    std::vector<std::string> names(r.get<std::uint32_t>());
    for (auto& n : names) n = r.str();
    std::vector<RegressionTree> trees(r.get<std::uint32_t>());
    for (auto& tree : trees) {
        std::vector<TreeNode> nodes(r.get<std::uint32_t>());
        for (auto& n : nodes) {
            n.feature = r.get<std::int32_t>();
            n.left = r.get<std::int32_t>();
            n.right = r.get<std::int32_t>();
            n.threshold = r.get<double>();
            n.value = r.get<double>();
        }
        tree = RegressionTree(std::move(nodes));
    }
    r.expect_end();
    try {
        TreeEnsemble ensemble(std::move(trees), feature_count, lr);
        ensemble.params = params;
        ensemble.pool_depth = pool_depth;
        ensemble.index_names = std::move(names);
        return ensemble;
    } catch (const InvalidArgument& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------- training

std::vector<QueryGroup> make_training_groups(std::span<const RetrievalRun> runs, const QrelSet& qrels,
                                             std::size_t depth) {
    if (runs.empty()) throw InvalidArgument("need at least one run");
    std::vector<QueryGroup> groups;
    const RankedList empty;
    for (const auto& [query_id, judgments] : qrels.judgments()) {
        std::vector<RankedList> lists;
        bool any = false;
        for (const auto& run : runs) {
            const auto* list = run.find(query_id);
            any = any || (list && !list->empty());
            lists.push_back(list ? *list : empty);
        }
        if (!any) continue;
        QueryFeatures qf(lists, depth);
        QueryGroup group;
        group.query_id = query_id;
        group.doc_ids = qf.pool();
        group.features = qf.pool_rows();
        for (const auto& doc : group.doc_ids) {
            auto it = judgments.find(doc);
            group.grades.push_back(it == judgments.end() ? 0 : it->second);
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

double delta_ndcg(std::span<const double> scores, std::span<const int> grades, std::size_t i, std::size_t j,
                  std::size_t truncation) {
    double ideal = ideal_dcg(grades, truncation);
    if (ideal == 0.0) return 0.0;
    auto rank = ranks_of(scores);
    double gain_diff = static_cast<double>(grades[i] - grades[j]);
    double disc_diff = rank_discount(rank[i], truncation) - rank_discount(rank[j], truncation);
    return std::abs(gain_diff * disc_diff) / ideal;
}

void accumulate_lambdas(std::span<const double> scores, std::span<const int> grades, double sigma,
                        std::size_t truncation, std::span<double> grad, std::span<double> hess) {
    const std::size_t n = scores.size();
    double ideal = ideal_dcg(grades, truncation);
    if (ideal == 0.0) return;
    auto rank = ranks_of(scores);
    std::vector<double> disc(n);
    for (std::size_t i = 0; i < n; ++i) disc[i] = rank_discount(rank[i], truncation);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (grades[i] <= grades[j]) continue;
            double delta = std::abs(static_cast<double>(grades[i] - grades[j]) * (disc[i] - disc[j])) / ideal;
            if (delta == 0.0) continue;
            double rho = 1.0 / (1.0 + std::exp(sigma * (scores[i] - scores[j])));
            double lambda = -sigma * rho * delta;
            grad[i] += lambda;
            grad[j] -= lambda;
            double h = sigma * sigma * rho * (1.0 - rho) * delta;
            hess[i] += h;
            hess[j] += h;
        }
    }
}

TreeEnsemble train_lambdamart(std::span<const QueryGroup> groups, std::size_t feature_count, const LtrParams& params,
                              TrainReport* report) {
    params.validate();
    if (feature_count == 0) throw InvalidArgument("feature_count must be positive");
    std::size_t total_rows = 0;
    std::vector<std::size_t> offsets;
    bool trainable = false;
    for (const auto& g : groups) {
        if (g.grades.size() != g.doc_ids.size() || g.features.size() != g.doc_ids.size() * feature_count) {
            throw DimensionError("group \"" + g.query_id + "\" has inconsistent feature or grade sizes");
        }
        for (int grade : g.grades) {
            if (grade < 0) throw InvalidArgument("negative grade in group \"" + g.query_id + "\"");
        }
        if (std::adjacent_find(g.grades.begin(), g.grades.end(), std::not_equal_to<>()) != g.grades.end()) {
            trainable = true;
        }
        offsets.push_back(total_rows);
        total_rows += g.doc_ids.size();
    }
    if (!trainable) throw InvalidArgument("no trainable pairs: every group has a single grade");

    std::vector<double> features;
    features.reserve(total_rows * feature_count);
    for (const auto& g : groups) features.insert(features.end(), g.features.begin(), g.features.end());

    std::mt19937_64 rng(params.seed);
    std::vector<double> scores(total_rows, 0.0);
    std::vector<double> grad(total_rows), hess(total_rows);
    std::vector<RegressionTree> trees;
    trees.reserve(params.n_trees);

    auto monitor = [&] {
        if (!report) return;
        double sum = 0.0;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            sum += group_ndcg(groups[g], std::span<const double>(scores).subspan(offsets[g], groups[g].doc_ids.size()),
                              kMonitorCutoff);
        }
        report->train_ndcg.push_back(groups.empty() ? 0.0 : sum / static_cast<double>(groups.size()));
    };
    monitor();

    std::vector<std::size_t> group_order(groups.size());
    std::vector<std::size_t> all_columns(feature_count);
    std::iota(all_columns.begin(), all_columns.end(), 0);

    for (std::size_t t = 0; t < params.n_trees; ++t) {
        std::vector<std::size_t> chosen_groups;
        std::iota(group_order.begin(), group_order.end(), 0);
        if (params.row_subsample < 1.0) {
            std::shuffle(group_order.begin(), group_order.end(), rng);
            group_order.resize(sample_size(params.row_subsample, groups.size()));
            std::sort(group_order.begin(), group_order.end());
        }
        chosen_groups = group_order;
        group_order.resize(groups.size());

        std::vector<std::size_t> columns = all_columns;
        if (params.col_subsample_per_tree < 1.0) {
            std::shuffle(columns.begin(), columns.end(), rng);
            columns.resize(sample_size(params.col_subsample_per_tree, feature_count));
            std::sort(columns.begin(), columns.end());
        }

        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(hess.begin(), hess.end(), 0.0);
        std::vector<std::uint32_t> rows;
        for (auto g : chosen_groups) {
            const std::size_t n = groups[g].doc_ids.size();
            const std::size_t off = offsets[g];
            accumulate_lambdas(std::span<const double>(scores).subspan(off, n), groups[g].grades, params.sigma,
                               params.ndcg_truncation, std::span<double>(grad).subspan(off, n),
                               std::span<double>(hess).subspan(off, n));
            for (std::size_t i = 0; i < n; ++i) rows.push_back(static_cast<std::uint32_t>(off + i));
        }

        TreeBuilder builder(features, feature_count, grad, hess, params, std::move(columns));
        auto tree = builder.build(std::move(rows));
        for (std::size_t r = 0; r < total_rows; ++r) {
            scores[r] += params.learning_rate *
                         tree.predict(std::span<const double>(features).subspan(r * feature_count, feature_count));
        }
        trees.push_back(std::move(tree));
        monitor();
    }

    TreeEnsemble ensemble(std::move(trees), feature_count, params.learning_rate);
    ensemble.params = params;
    return ensemble;
}

// ---------------------------------------------------------------- fusion

RankedList fuse_query(std::span<const RankedList> runs, const TreeEnsemble& ensemble, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    if (runs.size() * kFeaturesPerIndex != ensemble.feature_count()) {
        throw DimensionError("model expects " + std::to_string(ensemble.feature_count() / kFeaturesPerIndex) +
                             " member runs, got " + std::to_string(runs.size()));
    }
    QueryFeatures qf(runs, ensemble.pool_depth);
    std::vector<double> row(qf.feature_count());
    RankedList out;
    out.reserve(qf.pool().size());
    for (const auto& doc : qf.pool()) {
        qf.extract(doc, row);
        out.push_back({doc, ensemble.predict(row)});
    }
    select_top_k(out, k);
    return out;
}

RetrievalRun fuse(std::span<const RetrievalRun> runs, const TreeEnsemble& ensemble, std::size_t k, unsigned threads) {
    if (runs.size() * kFeaturesPerIndex != ensemble.feature_count()) {
        throw DimensionError("model expects " + std::to_string(ensemble.feature_count() / kFeaturesPerIndex) +
                             " member runs, got " + std::to_string(runs.size()));
    }
    std::set<std::string> query_ids;
    for (const auto& run : runs) {
        for (const auto& [qid, list] : run.queries) query_ids.insert(qid);
    }
    std::vector<std::string> ids(query_ids.begin(), query_ids.end());
    std::vector<RankedList> results(ids.size());
    const RankedList empty;
    auto work = [&](std::size_t i) {
        std::vector<RankedList> lists;
        lists.reserve(runs.size());
        for (const auto& run : runs) {
            const auto* list = run.find(ids[i]);
            lists.push_back(list ? *list : empty);
        }
        results[i] = fuse_query(lists, ensemble, k);
    };
    unsigned workers = std::max(1u, std::min<unsigned>(threads ? threads : 1, static_cast<unsigned>(ids.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < ids.size(); ++i) work(i);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < ids.size(); i += workers) work(i);
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
    RetrievalRun out;
    out.tag = "hybrid";
    for (std::size_t i = 0; i < ids.size(); ++i) out.queries.emplace(ids[i], std::move(results[i]));
    return out;
}

}  // namespace hybridir::hybrid
