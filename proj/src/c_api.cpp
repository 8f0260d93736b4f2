#include "hybridir/hybridir.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <thread>
#include <variant>

#include "hybridir/bench.hpp"
#include "hybridir/corpus.hpp"
#include "hybridir/dense.hpp"
#include "hybridir/error.hpp"
#include "hybridir/hybrid.hpp"
#include "hybridir/losses.hpp"
#include "hybridir/metrics.hpp"
#include "hybridir/sparse.hpp"
#include "hybridir/textprep.hpp"
#include "io.hpp"
#include "json.hpp"

using namespace hybridir;

struct hir_index {
    std::variant<sparse::Bm25Index, sparse::ImpactIndex> index;
};
struct hir_dense {
    dense::EmbeddingStore store;
};
struct hir_run {
    RetrievalRun run;
};
struct hir_model {
    hybrid::TreeEnsemble model;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
hir_status guarded(Fn&& fn) {
    g_last_error.clear();
    try {
        fn();
        return HIR_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<hir_status>(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
    } catch (const std::exception& e) {
        g_last_error = e.what();
    } catch (...) {
        g_last_error = "unknown error";
    }
    return HIR_E_INTERNAL;
}

void require(const void* p, const char* name) {
    if (!p) throw InvalidArgument(std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

unsigned resolve_threads(unsigned threads) { return threads ? threads : io::thread_count(); }

std::vector<RetrievalRun> collect_runs(const hir_run* const* runs, size_t n) {
    require(runs, "runs");
    std::vector<RetrievalRun> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        require(runs[i], "runs[i]");
        out.push_back(runs[i]->run);
    }
    return out;
}

}  // namespace

extern "C" {

const char* hir_version(void) { return "0.1.0"; }

const char* hir_last_error(void) { return g_last_error.c_str(); }

const char* hir_status_name(hir_status status) {
    switch (status) {
        case HIR_OK: return "ok";
        case HIR_E_INVALID_ARGUMENT: return "invalid_argument";
        case HIR_E_PARSE: return "parse_error";
        case HIR_E_VALIDATION: return "validation_error";
        case HIR_E_IO: return "io_error";
        case HIR_E_FORMAT: return "format_error";
        case HIR_E_DIMENSION: return "dimension_error";
        case HIR_E_NUMERIC: return "numeric_error";
        case HIR_E_INTERNAL: return "internal_error";
    }
    return "unknown";
}

void hir_string_free(char* s) { std::free(s); }

hir_status hir_bm25_build(const char* corpus_path, const char* stopwords_path, const char* lemmas_path, double k1,
                          double b, hir_index** out) {
    return guarded([&] {
        require(corpus_path, "corpus_path");
        require(out, "out");
        sparse::AnalyzerConfig cfg;
        if (stopwords_path || lemmas_path) {
            cfg = sparse::load_analyzer_config(stopwords_path ? stopwords_path : "", lemmas_path ? lemmas_path : "");
        }
        auto corpus = load_corpus(corpus_path);
        auto index = sparse::Bm25Index::build(corpus, sparse::Analyzer(std::move(cfg)), {k1, b});
        *out = new hir_index{std::move(index)};
    });
}

hir_status hir_impact_build(const char* doc_vectors_path, hir_index** out) {
    return guarded([&] {
        require(doc_vectors_path, "doc_vectors_path");
        require(out, "out");
        *out = new hir_index{sparse::ImpactIndex::build(sparse::load_sparse_vectors(doc_vectors_path))};
    });
}

hir_status hir_index_load(const char* path, hir_index** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        if (sparse::peek_index_kind(path) == sparse::IndexKind::kBm25) {
            *out = new hir_index{sparse::Bm25Index::load(path)};
        } else {
            *out = new hir_index{sparse::ImpactIndex::load(path)};
        }
    });
}

hir_status hir_index_save(const hir_index* index, const char* path) {
    return guarded([&] {
        require(index, "index");
        require(path, "path");
        std::visit([&](const auto& idx) { idx.save(path); }, index->index);
    });
}

hir_status hir_index_doc_count(const hir_index* index, size_t* out) {
    return guarded([&] {
        require(index, "index");
        require(out, "out");
        *out = std::visit([](const auto& idx) { return idx.doc_count(); }, index->index);
    });
}

hir_status hir_index_kind(const hir_index* index, int* out) {
    return guarded([&] {
        require(index, "index");
        require(out, "out");
        *out = static_cast<int>(index->index.index());
    });
}

void hir_index_free(hir_index* index) { delete index; }

hir_status hir_index_search_file(const hir_index* index, const char* queries_path, size_t k, unsigned threads,
                                 hir_run** out) {
    return guarded([&] {
        require(index, "index");
        require(queries_path, "queries_path");
        require(out, "out");
        if (k == 0) throw InvalidArgument("k must be at least 1");
        threads = resolve_threads(threads);
        std::vector<std::string> ids;
        std::vector<RankedList> lists;
        auto parallel = [&](std::size_t n, auto&& fn) {
            lists.resize(n);
            unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<size_t>(n, 1))));
            std::vector<std::exception_ptr> errors(workers);
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t i = w; i < n; i += workers) lists[i] = fn(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        };
        if (const auto* bm25 = std::get_if<sparse::Bm25Index>(&index->index)) {
            auto queries = load_queries(queries_path);
            for (const auto& q : queries) ids.push_back(q.query_id);
            parallel(queries.size(), [&](std::size_t i) { return bm25->search(queries[i].text, k); });
        } else {
            const auto& impact = std::get<sparse::ImpactIndex>(index->index);
            auto queries = sparse::load_sparse_vectors(queries_path);
            for (const auto& q : queries) ids.push_back(q.first);
            parallel(queries.size(), [&](std::size_t i) { return impact.search(queries[i].second, k); });
        }
        auto run = std::make_unique<hir_run>();
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (!run->run.queries.emplace(ids[i], std::move(lists[i])).second) {
                throw ValidationError("duplicate query id \"" + ids[i] + "\" in " + queries_path);
            }
        }
        *out = run.release();
    });
}

hir_status hir_dense_load(const char* vectors_path, const char* ids_path, hir_dense** out) {
    return guarded([&] {
        require(vectors_path, "vectors_path");
        require(ids_path, "ids_path");
        require(out, "out");
        *out = new hir_dense{dense::EmbeddingStore::load(vectors_path, ids_path).normalize()};
    });
}

hir_status hir_dense_search_file(const hir_dense* store, const char* query_vectors_path, const char* query_ids_path,
                                 size_t k, unsigned threads, hir_run** out) {
    return guarded([&] {
        require(store, "store");
        require(query_vectors_path, "query_vectors_path");
        require(query_ids_path, "query_ids_path");
        require(out, "out");
        auto queries = dense::EmbeddingStore::load(query_vectors_path, query_ids_path);
        *out = new hir_run{dense::dense_search_batch(store->store, queries, k, resolve_threads(threads))};
    });
}

void hir_dense_free(hir_dense* store) { delete store; }

hir_status hir_run_load(const char* path, hir_run** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new hir_run{load_trec_run(path)};
    });
}

hir_status hir_run_save(const hir_run* run, const char* path) {
    return guarded([&] {
        require(run, "run");
        require(path, "path");
        save_trec_run(run->run, path);
    });
}

hir_status hir_run_set_tag(hir_run* run, const char* tag) {
    return guarded([&] {
        require(run, "run");
        require(tag, "tag");
        std::string t(tag);
        if (t.empty() || t.find_first_of(" \t\r\n") != std::string::npos) {
            throw InvalidArgument("run tag must be a non-empty token without whitespace");
        }
        run->run.tag = std::move(t);
    });
}

hir_status hir_run_query_count(const hir_run* run, size_t* out) {
    return guarded([&] {
        require(run, "run");
        require(out, "out");
        *out = run->run.queries.size();
    });
}

void hir_run_free(hir_run* run) { delete run; }

void hir_ltr_params_default(hir_ltr_params* params) {
    if (!params) return;
    hybrid::LtrParams p;
    *params = {p.n_trees,     p.max_depth,   p.row_subsample,    p.col_subsample_per_tree, p.learning_rate,
               p.sigma,       p.l2_leaf_reg, p.min_child_weight, p.ndcg_truncation,        p.seed};
}

hir_status hir_model_train(const hir_run* const* runs, const char* const* names, size_t n_runs, const char* qrels_path,
                           const hir_ltr_params* params, size_t pool_depth, hir_model** out) {
    return guarded([&] {
        require(qrels_path, "qrels_path");
        require(out, "out");
        if (n_runs == 0) throw InvalidArgument("need at least one run");
        auto members = collect_runs(runs, n_runs);
        hybrid::LtrParams p;
        if (params) {
            p.n_trees = params->n_trees;
            p.max_depth = params->max_depth;
            p.row_subsample = params->row_subsample;
            p.col_subsample_per_tree = params->col_subsample_per_tree;
            p.learning_rate = params->learning_rate;
            p.sigma = params->sigma;
            p.l2_leaf_reg = params->l2_leaf_reg;
            p.min_child_weight = params->min_child_weight;
            p.ndcg_truncation = params->ndcg_truncation;
            p.seed = params->seed;
        }
        if (pool_depth == 0) pool_depth = hybrid::kDefaultPoolDepth;
        auto qrels = load_qrels(qrels_path);
        auto groups = hybrid::make_training_groups(members, qrels, pool_depth);
        auto model = hybrid::train_lambdamart(groups, n_runs * hybrid::kFeaturesPerIndex, p);
        model.pool_depth = pool_depth;
        if (names) {
            for (size_t i = 0; i < n_runs; ++i) model.index_names.emplace_back(names[i] ? names[i] : "");
        }
        *out = new hir_model{std::move(model)};
    });
}

hir_status hir_model_load(const char* path, hir_model** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new hir_model{hybrid::TreeEnsemble::load(path)};
    });
}

hir_status hir_model_save(const hir_model* model, const char* path) {
    return guarded([&] {
        require(model, "model");
        require(path, "path");
        model->model.save(path);
    });
}

hir_status hir_model_feature_count(const hir_model* model, size_t* out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = model->model.feature_count();
    });
}

void hir_model_free(hir_model* model) { delete model; }

hir_status hir_fuse(const hir_model* model, const hir_run* const* runs, size_t n_runs, size_t k, unsigned threads,
                    hir_run** out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        auto members = collect_runs(runs, n_runs);
        *out = new hir_run{hybrid::fuse(members, model->model, k, resolve_threads(threads))};
    });
}

void hir_metric_ks_default(hir_metric_ks* ks) {
    if (!ks) return;
    metrics::MetricKs d;
    *ks = {d.ndcg, d.mrr, d.recall, d.accuracy};
}

hir_status hir_evaluate(const hir_run* run, const char* qrels_path, const hir_metric_ks* ks, char** json_out) {
    return guarded([&] {
        require(run, "run");
        require(qrels_path, "qrels_path");
        require(json_out, "json_out");
        metrics::MetricKs k;
        if (ks) k = {ks->ndcg, ks->mrr, ks->recall, ks->accuracy};
        if (!k.ndcg || !k.mrr || !k.recall || !k.accuracy) throw InvalidArgument("metric cutoffs must be at least 1");
        auto qrels = load_qrels(qrels_path);
        *json_out = dup_string(metrics::to_json(metrics::evaluate_run(run->run, qrels, k)));
    });
}

hir_status hir_validate(const char* corpus_path, const char* queries_path, const char* qrels_path, char** json_out) {
    return guarded([&] {
        require(corpus_path, "corpus_path");
        require(queries_path, "queries_path");
        require(qrels_path, "qrels_path");
        require(json_out, "json_out");
        auto report = validate_dataset_files(corpus_path, queries_path, qrels_path);
        nlohmann::ordered_json j;
        j["missing_docs"] = report.missing_docs;
        j["queries_without_judgments"] = report.queries_without_judgments;
        j["duplicate_ids"] = report.duplicate_ids;
        j["unknown_queries"] = report.unknown_queries;
        j["clean"] = report.clean();
        *json_out = dup_string(j.dump());
    });
}

hir_status hir_preprocess(const char* input_path, const char* config_path, const char* output_path, size_t* read,
                          size_t* kept) {
    return guarded([&] {
        require(input_path, "input_path");
        require(output_path, "output_path");
        textprep::PrepConfig cfg;
        if (config_path) cfg = textprep::load_config(config_path);
        cfg.finalize();
        auto stats = textprep::preprocess_file(input_path, cfg, output_path);
        if (read) *read = stats.read;
        if (kept) *kept = stats.kept;
    });
}

hir_status hir_bench_throughput(const char* model_path, size_t n_queries, size_t candidates_per_query,
                                unsigned threads, uint64_t seed, char** json_out) {
    return guarded([&] {
        require(json_out, "json_out");
        bench::ThroughputConfig cfg;
        cfg.n_queries = n_queries;
        cfg.candidates_per_query = candidates_per_query;
        cfg.threads = resolve_threads(threads);
        cfg.seed = seed;
        hybrid::TreeEnsemble model;
        if (model_path) {
            model = hybrid::TreeEnsemble::load(model_path);
            cfg.indexes = model.feature_count() / hybrid::kFeaturesPerIndex;
        } else {
            model = bench::random_ensemble(cfg.indexes * hybrid::kFeaturesPerIndex, 100, 6, seed);
        }
        *json_out = dup_string(bench::throughput_bench(model, cfg).to_json());
    });
}

hir_status hir_losses_check(uint64_t seed, size_t points, double step, char** json_out) {
    return guarded([&] {
        require(json_out, "json_out");
        if (points == 0) throw InvalidArgument("points must be at least 1");
        if (!(step > 0.0)) throw InvalidArgument("step must be positive");
        auto report = losses::gradient_check(seed, points, step);

        // Queries orthogonal to every passage: all scores are 0 and the loss is ln 2.
        losses::ContrastiveBatch batch;
        batch.queries = losses::Matrix(2, 4);
        batch.positives = losses::Matrix(2, 4);
        batch.queries(0, 0) = batch.queries(1, 1) = 1.0;
        batch.positives(0, 2) = batch.positives(1, 3) = 1.0;
        batch.negatives = batch.positives;
        double hand = losses::mnr_loss(batch).loss;

        nlohmann::ordered_json j;
        j["points"] = report.points;
        j["step"] = step;
        j["margin_mse_max_rel_error"] = report.margin_mse_max_rel_error;
        j["mnr_max_rel_error"] = report.mnr_max_rel_error;
        j["distill_mse_max_rel_error"] = report.distill_max_rel_error;
        j["tolerance"] = 1e-4;
        j["gradients_ok"] = report.max_rel_error() < 1e-4;
        j["mnr_zero_score_loss"] = hand;
        j["mnr_zero_score_expected"] = std::log(2.0);
        j["mnr_zero_score_ok"] = std::abs(hand - std::log(2.0)) < 1e-9;
        *json_out = dup_string(j.dump());
    });
}

hir_status hir_benchmark(const char* config_path, const char* out_dir, unsigned threads, char** json_out) {
    return guarded([&] {
        require(config_path, "config_path");
        require(out_dir, "out_dir");
        auto cfg = bench::load_benchmark_config(config_path);
        auto result = bench::run_benchmark(cfg, out_dir, resolve_threads(threads));
        if (json_out) {
            nlohmann::ordered_json j;
            nlohmann::ordered_json tables = nlohmann::ordered_json::object();
            for (const auto& [name, table] : result.ndcg_tables) {
                tables[name] = table.overall ? nlohmann::ordered_json(*table.overall) : nlohmann::ordered_json(nullptr);
            }
            j["ndcg_overall"] = std::move(tables);
            j["files_written"] = result.written.size();
            j["report"] = (std::filesystem::path(out_dir) / "report.json").string();
            *json_out = dup_string(j.dump());
        }
    });
}

}  // extern "C"
