#include "hybridir/bench.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "hybridir/dense.hpp"
#include "hybridir/error.hpp"
#include "io.hpp"
#include "json.hpp"

namespace hybridir::bench {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
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

const char* kind_name(RetrieverKind kind) {
    switch (kind) {
        case RetrieverKind::kBm25: return "bm25";
        case RetrieverKind::kImpact: return "impact";
        case RetrieverKind::kDense: return "dense";
        case RetrieverKind::kHybrid: return "hybrid";
    }
    return "?";
}

RetrieverKind parse_kind(const std::string& s) {
    if (s == "bm25") return RetrieverKind::kBm25;
    if (s == "impact") return RetrieverKind::kImpact;
    if (s == "dense") return RetrieverKind::kDense;
    if (s == "hybrid") return RetrieverKind::kHybrid;
    throw InvalidArgument("unknown retriever kind \"" + s + "\"");
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw InvalidArgument(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) throw InvalidArgument(where + ": unknown key \"" + key + "\"");
    }
}

fs::path resolve(const fs::path& base, const json& value) {
    fs::path p(value.get<std::string>());
    return p.is_absolute() ? p : base / p;
}

std::optional<fs::path> optional_path(const fs::path& base, const json& obj, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    return resolve(base, obj.at(key));
}

// Rethrows `e` with the dataset and file prepended, keeping its code.
[[noreturn]] void rethrow_with(const std::string& context, const Error& e) {
    throw Error(e.code(), context + ": " + e.what());
}

void require_file(const std::string& dataset, const std::optional<fs::path>& path, const char* what) {
    if (!path) throw InvalidArgument("dataset \"" + dataset + "\": no " + std::string(what) + " path configured");
    if (!fs::is_regular_file(*path)) {
        throw IoError("dataset \"" + dataset + "\": missing " + std::string(what) + " file " + path->string());
    }
}

hybrid::LtrParams parse_ltr(const json& obj) {
    check_keys(obj,
               {"n_trees", "max_depth", "row_subsample", "col_subsample_per_tree", "learning_rate", "sigma",
                "l2_leaf_reg", "min_child_weight", "ndcg_truncation", "seed"},
               "hybrid params");
    hybrid::LtrParams p;
    p.n_trees = obj.value("n_trees", p.n_trees);
    p.max_depth = obj.value("max_depth", p.max_depth);
    p.row_subsample = obj.value("row_subsample", p.row_subsample);
    p.col_subsample_per_tree = obj.value("col_subsample_per_tree", p.col_subsample_per_tree);
    p.learning_rate = obj.value("learning_rate", p.learning_rate);
    p.sigma = obj.value("sigma", p.sigma);
    p.l2_leaf_reg = obj.value("l2_leaf_reg", p.l2_leaf_reg);
    p.min_child_weight = obj.value("min_child_weight", p.min_child_weight);
    p.ndcg_truncation = obj.value("ndcg_truncation", p.ndcg_truncation);
    p.seed = obj.value("seed", p.seed);
    p.validate();
    return p;
}

ojson means_json(const metrics::DatasetMetrics& m) {
    ojson out = ojson::object();
    for (const auto& [name, value] : m.means()) out[name] = value;
    return out;
}

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

struct LoadedDataset {
    CorpusStore corpus;
    QuerySet queries;
    QrelSet qrels;
};

LoadedDataset load_dataset(const DatasetSpec& ds) {
    LoadedDataset out;
    const std::string ctx = "dataset \"" + ds.name + "\"";
    require_file(ds.name, ds.corpus, "corpus");
    require_file(ds.name, ds.queries, "queries");
    require_file(ds.name, ds.qrels, "qrels");
    try {
        out.corpus = load_corpus(ds.corpus);
        out.queries = load_queries(ds.queries);
        out.qrels = load_qrels(ds.qrels);
    } catch (const Error& e) {
        rethrow_with(ctx, e);
    }
    return out;
}

RetrievalRun run_bm25(const RetrieverSpec& spec, const DatasetSpec& ds, const LoadedDataset& data, std::size_t depth,
                      unsigned threads) {
    sparse::AnalyzerConfig analyzer;
    if (spec.stopwords || spec.lemmas) {
        analyzer = sparse::load_analyzer_config(spec.stopwords.value_or(fs::path()), spec.lemmas.value_or(fs::path()),
                                                spec.lowercase);
    }
    analyzer.lowercase = spec.lowercase;
    sparse::Bm25Index index;
    try {
        index = sparse::Bm25Index::build(data.corpus, sparse::Analyzer(std::move(analyzer)), spec.bm25);
    } catch (const Error& e) {
        rethrow_with("dataset \"" + ds.name + "\"", e);
    }
    std::vector<RankedList> lists(data.queries.size());
    parallel_for(data.queries.size(), threads, [&](std::size_t i) { lists[i] = index.search(data.queries[i].text, depth); });
    RetrievalRun run;
    for (std::size_t i = 0; i < lists.size(); ++i) run.queries.emplace(data.queries[i].query_id, std::move(lists[i]));
    return run;
}

RetrievalRun run_impact(const DatasetSpec& ds, std::size_t depth, unsigned threads) {
    require_file(ds.name, ds.doc_sparse, "document sparse vectors");
    require_file(ds.name, ds.query_sparse, "query sparse vectors");
    sparse::ImpactIndex index;
    sparse::NamedSparseVectors queries;
    try {
        index = sparse::ImpactIndex::build(sparse::load_sparse_vectors(*ds.doc_sparse));
        queries = sparse::load_sparse_vectors(*ds.query_sparse);
    } catch (const Error& e) {
        rethrow_with("dataset \"" + ds.name + "\"", e);
    }
    std::vector<RankedList> lists(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) { lists[i] = index.search(queries[i].second, depth); });
    RetrievalRun run;
    for (std::size_t i = 0; i < lists.size(); ++i) {
        if (!run.queries.emplace(queries[i].first, std::move(lists[i])).second) {
            throw ValidationError("dataset \"" + ds.name + "\": duplicate query id \"" + queries[i].first + "\" in " +
                                  ds.query_sparse->string());
        }
    }
    return run;
}

RetrievalRun run_dense(const DatasetSpec& ds, std::size_t depth, unsigned threads) {
    require_file(ds.name, ds.doc_embeddings, "document embeddings");
    require_file(ds.name, ds.doc_embedding_ids, "document embedding ids");
    require_file(ds.name, ds.query_embeddings, "query embeddings");
    require_file(ds.name, ds.query_embedding_ids, "query embedding ids");
    try {
        auto docs = dense::EmbeddingStore::load(*ds.doc_embeddings, *ds.doc_embedding_ids).normalize();
        auto queries = dense::EmbeddingStore::load(*ds.query_embeddings, *ds.query_embedding_ids);
        return dense::dense_search_batch(docs, queries, depth, threads);
    } catch (const Error& e) {
        rethrow_with("dataset \"" + ds.name + "\"", e);
    }
}

}  // namespace

// ---------------------------------------------------------------- config

void BenchmarkConfig::validate() const {
    if (datasets.empty()) throw InvalidArgument("benchmark config lists no datasets");
    if (retrievers.empty()) throw InvalidArgument("benchmark config lists no retrievers");
    if (depth == 0) throw InvalidArgument("depth must be at least 1");
    std::set<std::string> names;
    for (const auto& ds : datasets) {
        if (ds.name.empty()) throw InvalidArgument("dataset with empty name");
        if (!names.insert(ds.name).second) throw InvalidArgument("duplicate dataset name \"" + ds.name + "\"");
        if (ds.group.empty()) throw InvalidArgument("dataset \"" + ds.name + "\" has no group");
    }
    for (const auto& g : excluded) {
        if (!names.contains(g)) throw InvalidArgument("excluded dataset \"" + g + "\" is not configured");
    }
    std::map<std::string, RetrieverKind> seen;
    for (const auto& r : retrievers) {
        if (r.name.empty()) throw InvalidArgument("retriever with empty name");
        if (seen.contains(r.name)) throw InvalidArgument("duplicate retriever name \"" + r.name + "\"");
        if (r.kind == RetrieverKind::kHybrid) {
            if (r.members.size() < 2) {
                throw InvalidArgument("hybrid \"" + r.name + "\" needs at least two member retrievers");
            }
            std::set<std::string> unique_members(r.members.begin(), r.members.end());
            if (unique_members.size() != r.members.size()) {
                throw InvalidArgument("hybrid \"" + r.name + "\" lists a member twice");
            }
            for (const auto& m : r.members) {
                auto it = seen.find(m);
                if (it == seen.end()) {
                    throw InvalidArgument("hybrid \"" + r.name + "\" references \"" + m +
                                          "\", which is not defined before it");
                }
                if (it->second == RetrieverKind::kHybrid) {
                    throw InvalidArgument("hybrid \"" + r.name + "\" cannot use another hybrid as a member");
                }
            }
            if (!r.model && r.train_datasets.empty()) {
                throw InvalidArgument("hybrid \"" + r.name + "\" needs a model path or train_datasets");
            }
            for (const auto& d : r.train_datasets) {
                if (!names.contains(d)) {
                    throw InvalidArgument("hybrid \"" + r.name + "\" trains on unknown dataset \"" + d + "\"");
                }
            }
            r.ltr.validate();
            if (r.pool_depth == 0) throw InvalidArgument("hybrid \"" + r.name + "\": pool_depth must be positive");
        }
        seen.emplace(r.name, r.kind);
    }
}

BenchmarkConfig parse_benchmark_config(const std::string& json_text, const fs::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("benchmark config", e.byte, e.what());
    }
    BenchmarkConfig cfg;
    try {
        check_keys(root, {"datasets", "retrievers", "groups", "exclude", "k", "depth"}, "benchmark config");
        cfg.depth = root.value("depth", cfg.depth);
        if (root.contains("k")) {
            const auto& k = root.at("k");
            check_keys(k, {"ndcg", "mrr", "recall", "accuracy"}, "k");
            cfg.ks.ndcg = k.value("ndcg", cfg.ks.ndcg);
            cfg.ks.mrr = k.value("mrr", cfg.ks.mrr);
            cfg.ks.recall = k.value("recall", cfg.ks.recall);
            cfg.ks.accuracy = k.value("accuracy", cfg.ks.accuracy);
            if (!cfg.ks.ndcg || !cfg.ks.mrr || !cfg.ks.recall || !cfg.ks.accuracy) {
                throw InvalidArgument("metric cutoffs must be at least 1");
            }
        }
        if (root.contains("groups")) cfg.groups = root.at("groups").get<std::vector<std::string>>();
        if (root.contains("exclude")) {
            for (const auto& d : root.at("exclude")) cfg.excluded.insert(d.get<std::string>());
        }
        for (const auto& d : root.at("datasets")) {
            check_keys(d, {"name", "group", "corpus", "queries", "qrels", "embeddings", "sparse"}, "dataset");
            DatasetSpec ds;
            ds.name = d.at("name").get<std::string>();
            ds.group = d.at("group").get<std::string>();
            ds.corpus = resolve(base_dir, d.at("corpus"));
            ds.queries = resolve(base_dir, d.at("queries"));
            ds.qrels = resolve(base_dir, d.at("qrels"));
            if (d.contains("embeddings")) {
                const auto& e = d.at("embeddings");
                check_keys(e, {"docs", "doc_ids", "queries", "query_ids"}, "dataset \"" + ds.name + "\" embeddings");
                ds.doc_embeddings = optional_path(base_dir, e, "docs");
                ds.doc_embedding_ids = optional_path(base_dir, e, "doc_ids");
                ds.query_embeddings = optional_path(base_dir, e, "queries");
                ds.query_embedding_ids = optional_path(base_dir, e, "query_ids");
            }
            if (d.contains("sparse")) {
                const auto& s = d.at("sparse");
                check_keys(s, {"docs", "queries"}, "dataset \"" + ds.name + "\" sparse");
                ds.doc_sparse = optional_path(base_dir, s, "docs");
                ds.query_sparse = optional_path(base_dir, s, "queries");
            }
            cfg.datasets.push_back(std::move(ds));
        }
        for (const auto& r : root.at("retrievers")) {
            check_keys(r,
                       {"name", "kind", "k1", "b", "stopwords", "lemmas", "lowercase", "members", "model",
                        "train_datasets", "params", "pool_depth"},
                       "retriever");
            RetrieverSpec spec;
            spec.name = r.at("name").get<std::string>();
            spec.kind = parse_kind(r.at("kind").get<std::string>());
            spec.bm25.k1 = r.value("k1", spec.bm25.k1);
            spec.bm25.b = r.value("b", spec.bm25.b);
            spec.stopwords = optional_path(base_dir, r, "stopwords");
            spec.lemmas = optional_path(base_dir, r, "lemmas");
            spec.lowercase = r.value("lowercase", spec.lowercase);
            if (r.contains("members")) spec.members = r.at("members").get<std::vector<std::string>>();
            spec.model = optional_path(base_dir, r, "model");
            if (r.contains("train_datasets")) spec.train_datasets = r.at("train_datasets").get<std::vector<std::string>>();
            if (r.contains("params")) spec.ltr = parse_ltr(r.at("params"));
            spec.pool_depth = r.value("pool_depth", spec.pool_depth);
            cfg.retrievers.push_back(std::move(spec));
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("benchmark config: ") + e.what());
    }
    if (cfg.groups.empty()) {
        for (const auto& ds : cfg.datasets) {
            if (std::find(cfg.groups.begin(), cfg.groups.end(), ds.group) == cfg.groups.end()) {
                cfg.groups.push_back(ds.group);
            }
        }
    } else {
        for (const auto& ds : cfg.datasets) {
            if (std::find(cfg.groups.begin(), cfg.groups.end(), ds.group) == cfg.groups.end()) {
                throw InvalidArgument("dataset \"" + ds.name + "\" uses group \"" + ds.group +
                                      "\", which is not in groups");
            }
        }
    }
    cfg.validate();
    return cfg;
}

BenchmarkConfig load_benchmark_config(const fs::path& path) {
    return parse_benchmark_config(io::read_file(path), path.parent_path());
}

// ---------------------------------------------------------------- pipeline

BenchmarkResult run_benchmark(const BenchmarkConfig& config, const fs::path& out_dir, unsigned threads) {
    config.validate();
    if (threads == 0) threads = io::thread_count();
    BenchmarkResult result;
    const std::size_t depth = std::max({config.depth, config.ks.ndcg, config.ks.mrr, config.ks.recall,
                                        config.ks.accuracy});

    std::vector<LoadedDataset> data;
    data.reserve(config.datasets.size());
    for (const auto& ds : config.datasets) data.push_back(load_dataset(ds));

    // retriever -> dataset index -> run
    std::map<std::string, std::vector<RetrievalRun>> runs;
    auto write_run = [&](const RetrieverSpec& r, std::size_t d, RetrievalRun run) {
        run.tag = r.name;
        auto path = out_dir / "runs" / r.name / (config.datasets[d].name + ".trec");
        save_trec_run(run, path);
        result.written.push_back(path);
        runs[r.name][d] = std::move(run);
    };

    for (const auto& r : config.retrievers) {
        runs[r.name].resize(config.datasets.size());
        if (r.kind == RetrieverKind::kHybrid) {
            hybrid::TreeEnsemble model;
            if (r.model) {
                if (!fs::is_regular_file(*r.model)) {
                    throw IoError("hybrid \"" + r.name + "\": missing model file " + r.model->string());
                }
                model = hybrid::TreeEnsemble::load(*r.model);
            } else {
                std::vector<hybrid::QueryGroup> groups;
                for (const auto& name : r.train_datasets) {
                    std::size_t d = 0;
                    while (config.datasets[d].name != name) ++d;
                    std::vector<RetrievalRun> members;
                    for (const auto& m : r.members) members.push_back(runs.at(m)[d]);
                    auto g = hybrid::make_training_groups(members, data[d].qrels, r.pool_depth);
                    for (auto& q : g) q.query_id = name + "/" + q.query_id;
                    std::move(g.begin(), g.end(), std::back_inserter(groups));
                }
                model = hybrid::train_lambdamart(groups, r.members.size() * hybrid::kFeaturesPerIndex, r.ltr);
                model.pool_depth = r.pool_depth;
                model.index_names = r.members;
                auto path = out_dir / "models" / (r.name + ".lmrt");
                model.save(path);
                result.written.push_back(path);
            }
            for (std::size_t d = 0; d < config.datasets.size(); ++d) {
                std::vector<RetrievalRun> members;
                for (const auto& m : r.members) members.push_back(runs.at(m)[d]);
                try {
                    write_run(r, d, hybrid::fuse(members, model, depth, threads));
                } catch (const Error& e) {
                    rethrow_with("hybrid \"" + r.name + "\", dataset \"" + config.datasets[d].name + "\"", e);
                }
            }
            continue;
        }
        for (std::size_t d = 0; d < config.datasets.size(); ++d) {
            const auto& ds = config.datasets[d];
            switch (r.kind) {
                case RetrieverKind::kBm25: write_run(r, d, run_bm25(r, ds, data[d], depth, threads)); break;
                case RetrieverKind::kImpact: write_run(r, d, run_impact(ds, depth, threads)); break;
                case RetrieverKind::kDense: write_run(r, d, run_dense(ds, depth, threads)); break;
                case RetrieverKind::kHybrid: break;
            }
        }
    }

    // Evaluation and reports.
    const std::vector<std::string> metric_names = {
        "ndcg@" + std::to_string(config.ks.ndcg), "mrr@" + std::to_string(config.ks.mrr),
        "recall@" + std::to_string(config.ks.recall), "accuracy@" + std::to_string(config.ks.accuracy)};
    std::vector<metrics::Group> grouping;
    for (const auto& g : config.groups) {
        metrics::Group group{g, {}};
        for (const auto& ds : config.datasets) {
            if (ds.group == g) group.datasets.push_back(ds.name);
        }
        grouping.push_back(std::move(group));
    }

    ojson report;
    report["ks"] = {{"ndcg", config.ks.ndcg},
                    {"mrr", config.ks.mrr},
                    {"recall", config.ks.recall},
                    {"accuracy", config.ks.accuracy}};
    report["depth"] = depth;
    report["excluded"] = std::vector<std::string>(config.excluded.begin(), config.excluded.end());
    ojson retrievers_json = ojson::array();
    for (const auto& r : config.retrievers) {
        ojson entry{{"name", r.name}, {"kind", kind_name(r.kind)}};
        if (r.kind == RetrieverKind::kHybrid) entry["members"] = r.members;
        retrievers_json.push_back(std::move(entry));
    }
    report["retrievers"] = std::move(retrievers_json);
    ojson datasets_json = ojson::object();
    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
        const auto& ds = config.datasets[d];
        ojson entry;
        entry["group"] = ds.group;
        entry["queries"] = data[d].qrels.query_count();
        ojson per_retriever = ojson::object();
        for (const auto& r : config.retrievers) {
            auto m = metrics::evaluate_run(runs.at(r.name)[d], data[d].qrels, config.ks);
            auto path = out_dir / "reports" / r.name / (ds.name + ".json");
            auto out = io::open_out(path);
            out << metrics::to_json(m) << '\n';
            if (!out) throw IoError("write failed: " + path.string());
            result.written.push_back(path);
            per_retriever[r.name] = means_json(m);
            result.metrics[r.name].emplace(ds.name, std::move(m));
        }
        entry["retrievers"] = std::move(per_retriever);
        datasets_json[ds.name] = std::move(entry);
    }
    report["datasets"] = std::move(datasets_json);

    ojson tables = ojson::object();
    std::string text;
    for (const auto& metric : metric_names) {
        std::vector<std::pair<std::string, metrics::GroupTable>> rows;
        ojson table = ojson::object();
        for (const auto& r : config.retrievers) {
            std::map<std::string, double> scores;
            for (const auto& [ds, m] : result.metrics.at(r.name)) scores.emplace(ds, m.means().at(metric));
            auto gt = metrics::aggregate_groups(scores, grouping, config.excluded);
            ojson row;
            ojson groups_json = ojson::object();
            for (const auto& [g, v] : gt.groups) groups_json[g] = optional_json(v);
            row["groups"] = std::move(groups_json);
            row["overall"] = optional_json(gt.overall);
            row["datasets"] = gt.dataset_count;
            table[r.name] = std::move(row);
            if (metric == metric_names.front()) result.ndcg_tables.emplace_back(r.name, gt);
            rows.emplace_back(r.name, std::move(gt));
        }
        tables[metric] = std::move(table);
        text += metric + "\n" + metrics::format_table(rows) + "\n";
    }
    report["tables"] = std::move(tables);

    auto json_path = out_dir / "report.json";
    {
        auto out = io::open_out(json_path);
        out << report.dump(2) << '\n';
        if (!out) throw IoError("write failed: " + json_path.string());
    }
    auto text_path = out_dir / "report.txt";
    {
        auto out = io::open_out(text_path);
        out << text;
        if (!out) throw IoError("write failed: " + text_path.string());
    }
    result.written.push_back(json_path);
    result.written.push_back(text_path);
    return result;
}

// ---------------------------------------------------------------- throughput

std::string ThroughputReport::to_json() const {
    ojson j;
    j["queries"] = queries;
    j["candidates_per_query"] = candidates_per_query;
    j["trees"] = trees;
    j["max_depth"] = max_depth;
    j["threads"] = threads;
    j["single_thread_seconds"] = single_seconds;
    j["single_thread_qps"] = single_qps;
    j["multi_thread_seconds"] = multi_seconds;
    j["multi_thread_qps"] = multi_qps;
    j["reference_qps"] = reference_qps;
    return j.dump();
}

hybrid::TreeEnsemble random_ensemble(std::size_t feature_count, std::size_t n_trees, std::size_t depth,
                                     std::uint64_t seed) {
    if (feature_count == 0) throw InvalidArgument("feature_count must be positive");
    if (depth > 20) throw InvalidArgument("depth above 20 is not supported");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int32_t> pick_feature(0, static_cast<std::int32_t>(feature_count) - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> leaf(0.0, 1.0);
    std::vector<hybrid::RegressionTree> trees;
    const std::size_t internal = (std::size_t{1} << depth) - 1;
    const std::size_t total = (std::size_t{1} << (depth + 1)) - 1;
    for (std::size_t t = 0; t < n_trees; ++t) {
        std::vector<hybrid::TreeNode> nodes(total);
        for (std::size_t i = 0; i < total; ++i) {
            if (i < internal) {
                nodes[i].feature = pick_feature(rng);
                nodes[i].threshold = unit(rng);
                nodes[i].left = static_cast<std::int32_t>(2 * i + 1);
                nodes[i].right = static_cast<std::int32_t>(2 * i + 2);
            } else {
                nodes[i].value = leaf(rng);
            }
        }
        trees.emplace_back(std::move(nodes));
    }
    hybrid::TreeEnsemble ensemble(std::move(trees), feature_count, 0.3);
    ensemble.params.n_trees = n_trees;
    ensemble.params.max_depth = depth;
    return ensemble;
}

ThroughputReport throughput_bench(const hybrid::TreeEnsemble& model, const ThroughputConfig& config) {
    if (config.indexes == 0) throw InvalidArgument("indexes must be positive");
    if (model.feature_count() != config.indexes * hybrid::kFeaturesPerIndex) {
        throw DimensionError("model expects " + std::to_string(model.feature_count() / hybrid::kFeaturesPerIndex) +
                             " indexes, benchmark uses " + std::to_string(config.indexes));
    }
    const std::size_t per_run = config.candidates_per_query / config.indexes;
    hybrid::TreeEnsemble ensemble = model;
    ensemble.pool_depth = std::max<std::size_t>(per_run, 1);

    ThroughputReport report;
    report.queries = config.n_queries;
    report.candidates_per_query = per_run * config.indexes;
    report.trees = ensemble.trees().size();
    for (const auto& t : ensemble.trees()) report.max_depth = std::max(report.max_depth, t.depth());
    report.threads = config.threads ? config.threads : io::thread_count();

    // Synthetic runs are generated up front so only rescoring is timed.
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<RankedList>> queries(config.n_queries, std::vector<RankedList>(config.indexes));
    for (std::size_t q = 0; q < config.n_queries; ++q) {
        for (std::size_t r = 0; r < config.indexes; ++r) {
            auto& list = queries[q][r];
            list.reserve(per_run);
            for (std::size_t i = 0; i < per_run; ++i) {
                list.push_back({"r" + std::to_string(r) + "d" + std::to_string(i), unit(rng)});
            }
            std::sort(list.begin(), list.end(), ranks_before);
        }
    }
    const std::size_t k = std::max<std::size_t>(config.k, 1);
    if (config.n_queries == 0) return report;

    using clock = std::chrono::steady_clock;
    double sink = 0.0;
    for (std::size_t q = 0; q < std::min<std::size_t>(config.n_queries, 32); ++q) {
        sink += static_cast<double>(hybrid::fuse_query(queries[q], ensemble, k).size());
    }
    auto start = clock::now();
    for (const auto& runs : queries) {
        auto fused = hybrid::fuse_query(runs, ensemble, k);
        if (!fused.empty()) sink += fused.front().score;
    }
    report.single_seconds = std::chrono::duration<double>(clock::now() - start).count();

    std::vector<double> sinks(config.n_queries);
    start = clock::now();
    parallel_for(config.n_queries, report.threads, [&](std::size_t q) {
        auto fused = hybrid::fuse_query(queries[q], ensemble, k);
        sinks[q] = fused.empty() ? 0.0 : fused.front().score;
    });
    report.multi_seconds = std::chrono::duration<double>(clock::now() - start).count();

    auto qps = [&](double seconds) { return seconds > 0.0 ? static_cast<double>(config.n_queries) / seconds : 0.0; };
    report.single_qps = qps(report.single_seconds);
    report.multi_qps = qps(report.multi_seconds);
    if (std::isnan(sink)) report.single_qps = 0.0;  // keeps the loop observable
    return report;
}

}  // namespace hybridir::bench
