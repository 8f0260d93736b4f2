// Command-line front end. Talks to the engine only through hybridir.h.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hybridir/hybridir.h"
#include "json.hpp"

namespace {

struct Failure {
    hir_status status;
    std::string message;
};

void check(hir_status status) {
    if (status != HIR_OK) throw Failure{status, hir_last_error()};
}

const char* opt(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

std::string take(char* s) {
    std::string out(s ? s : "");
    hir_string_free(s);
    return out;
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using RunPtr = std::unique_ptr<hir_run, Deleter<hir_run, hir_run_free>>;
using IndexPtr = std::unique_ptr<hir_index, Deleter<hir_index, hir_index_free>>;
using DensePtr = std::unique_ptr<hir_dense, Deleter<hir_dense, hir_dense_free>>;
using ModelPtr = std::unique_ptr<hir_model, Deleter<hir_model, hir_model_free>>;

std::vector<RunPtr> load_runs(const std::vector<std::string>& paths) {
    std::vector<RunPtr> runs;
    for (const auto& p : paths) {
        hir_run* r = nullptr;
        check(hir_run_load(p.c_str(), &r));
        runs.emplace_back(r);
    }
    return runs;
}

std::vector<const hir_run*> raw(const std::vector<RunPtr>& runs) {
    std::vector<const hir_run*> out;
    for (const auto& r : runs) out.push_back(r.get());
    return out;
}

void print_error(hir_status status, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = hir_status_name(status);
    j["code"] = static_cast<int>(status);
    j["message"] = message;
    std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybridir: sparse, dense and hybrid retrieval with evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(hir_version()));
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0: HYBRIDIR_THREADS or all cores)");

    // index
    auto* index = app.add_subcommand("index", "Build a BM25 or impact index");
    std::string index_kind = "bm25", index_out;
    std::optional<std::string> corpus, vectors, stopwords, lemmas;
    double k1 = 0.9, b = 0.4;
    index->add_option("--kind", index_kind)->check(CLI::IsMember({"bm25", "impact"}));
    index->add_option("--corpus", corpus, "corpus.jsonl (bm25)");
    index->add_option("--vectors", vectors, "document sparse vectors JSONL (impact)");
    index->add_option("--stopwords", stopwords);
    index->add_option("--lemmas", lemmas, "TSV of form<TAB>lemma");
    index->add_option("--k1", k1);
    index->add_option("--b", b);
    index->add_option("--out", index_out)->required();

    // search
    auto* search = app.add_subcommand("search", "Retrieve the top k documents per query");
    std::optional<std::string> search_index, dense_vectors, dense_ids, search_queries, query_vectors, query_ids;
    std::string search_out, search_tag = "hybridir";
    std::size_t search_k = 100;
    search->add_option("--index", search_index, "SPIX1 index file");
    search->add_option("--dense-vectors", dense_vectors, "EMB1 document embeddings");
    search->add_option("--dense-ids", dense_ids);
    search->add_option("--queries", search_queries, "queries.jsonl (bm25) or sparse query vectors (impact)");
    search->add_option("--query-vectors", query_vectors, "EMB1 query embeddings (dense)");
    search->add_option("--query-ids", query_ids);
    search->add_option("--k", search_k)->check(CLI::PositiveNumber);
    search->add_option("--tag", search_tag);
    search->add_option("--out", search_out)->required();

    // fuse-train
    auto* train = app.add_subcommand("fuse-train", "Train a LambdaMART fusion model on member runs");
    std::vector<std::string> train_runs, train_names;
    std::string train_qrels, train_out;
    hir_ltr_params params;
    hir_ltr_params_default(&params);
    std::size_t pool_depth = 100;
    train->add_option("--runs", train_runs)->required();
    train->add_option("--names", train_names, "Member names, one per run");
    train->add_option("--qrels", train_qrels)->required();
    train->add_option("--out", train_out)->required();
    train->add_option("--trees", params.n_trees);
    train->add_option("--depth", params.max_depth);
    train->add_option("--row-subsample", params.row_subsample);
    train->add_option("--col-subsample", params.col_subsample_per_tree);
    train->add_option("--learning-rate", params.learning_rate);
    train->add_option("--sigma", params.sigma);
    train->add_option("--l2", params.l2_leaf_reg);
    train->add_option("--min-child-weight", params.min_child_weight);
    train->add_option("--ndcg-truncation", params.ndcg_truncation);
    train->add_option("--seed", params.seed);
    train->add_option("--pool-depth", pool_depth);

    // fuse
    auto* fuse = app.add_subcommand("fuse", "Rescore member runs with a fusion model");
    std::string fuse_model, fuse_out, fuse_tag = "hybrid";
    std::vector<std::string> fuse_runs;
    std::size_t fuse_k = 100;
    fuse->add_option("--model", fuse_model)->required();
    fuse->add_option("--runs", fuse_runs)->required();
    fuse->add_option("--k", fuse_k)->check(CLI::PositiveNumber);
    fuse->add_option("--tag", fuse_tag);
    fuse->add_option("--out", fuse_out)->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score a TREC run against qrels");
    std::string eval_run, eval_qrels;
    std::optional<std::string> eval_out;
    hir_metric_ks ks;
    hir_metric_ks_default(&ks);
    evaluate->add_option("--run", eval_run)->required();
    evaluate->add_option("--qrels", eval_qrels)->required();
    evaluate->add_option("--ndcg-k", ks.ndcg);
    evaluate->add_option("--mrr-k", ks.mrr);
    evaluate->add_option("--recall-k", ks.recall);
    evaluate->add_option("--accuracy-k", ks.accuracy);
    evaluate->add_option("--out", eval_out, "Write the full JSON report here");

    // preprocess
    auto* prep = app.add_subcommand("preprocess", "Clean question-answer pairs");
    std::string prep_in, prep_out;
    std::optional<std::string> prep_config;
    prep->add_option("--input", prep_in)->required();
    prep->add_option("--output", prep_out)->required();
    prep->add_option("--config", prep_config, "JSON dictionary config");

    // bench-throughput
    auto* tput = app.add_subcommand("bench-throughput", "Measure fusion rescoring speed");
    std::optional<std::string> tput_model;
    std::size_t tput_queries = 2000, tput_candidates = 200;
    std::uint64_t tput_seed = 7;
    tput->add_option("--model", tput_model, "Default: random 100 trees of depth 6");
    tput->add_option("--queries", tput_queries);
    tput->add_option("--candidates", tput_candidates);
    tput->add_option("--seed", tput_seed);

    // losses check
    auto* losses = app.add_subcommand("losses", "Loss kernel utilities");
    losses->require_subcommand(1);
    auto* losses_check = losses->add_subcommand("check", "Finite-difference gradient check");
    std::uint64_t loss_seed = 1234;
    std::size_t loss_points = 20;
    double loss_step = 1e-5;
    losses_check->add_option("--seed", loss_seed);
    losses_check->add_option("--points", loss_points);
    losses_check->add_option("--step", loss_step);

    // validate
    auto* validate = app.add_subcommand("validate", "Check a dataset for consistency");
    std::string val_corpus, val_queries, val_qrels;
    validate->add_option("--corpus", val_corpus)->required();
    validate->add_option("--queries", val_queries)->required();
    validate->add_option("--qrels", val_qrels)->required();

    // benchmark
    auto* benchmark = app.add_subcommand("benchmark", "Run a full benchmark config");
    std::string bench_config, bench_out;
    benchmark->add_option("--config", bench_config)->required();
    benchmark->add_option("--out", bench_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        print_error(HIR_E_INVALID_ARGUMENT, e.what());
        return static_cast<int>(HIR_E_INVALID_ARGUMENT);
    }

    try {
        if (index->parsed()) {
            hir_index* raw_index = nullptr;
            if (index_kind == "bm25") {
                if (!corpus) throw Failure{HIR_E_INVALID_ARGUMENT, "--corpus is required for a bm25 index"};
                check(hir_bm25_build(corpus->c_str(), opt(stopwords), opt(lemmas), k1, b, &raw_index));
            } else {
                if (!vectors) throw Failure{HIR_E_INVALID_ARGUMENT, "--vectors is required for an impact index"};
                check(hir_impact_build(vectors->c_str(), &raw_index));
            }
            IndexPtr idx(raw_index);
            check(hir_index_save(idx.get(), index_out.c_str()));
            std::size_t docs = 0;
            check(hir_index_doc_count(idx.get(), &docs));
            std::cout << nlohmann::ordered_json{{"kind", index_kind}, {"documents", docs}, {"out", index_out}}.dump()
                      << "\n";
        } else if (search->parsed()) {
            hir_run* raw_run = nullptr;
            if (search_index) {
                if (!search_queries) throw Failure{HIR_E_INVALID_ARGUMENT, "--queries is required with --index"};
                hir_index* raw_index = nullptr;
                check(hir_index_load(search_index->c_str(), &raw_index));
                IndexPtr idx(raw_index);
                check(hir_index_search_file(idx.get(), search_queries->c_str(), search_k, threads, &raw_run));
            } else if (dense_vectors && dense_ids) {
                if (!query_vectors || !query_ids) {
                    throw Failure{HIR_E_INVALID_ARGUMENT, "--query-vectors and --query-ids are required for dense search"};
                }
                hir_dense* raw_dense = nullptr;
                check(hir_dense_load(dense_vectors->c_str(), dense_ids->c_str(), &raw_dense));
                DensePtr store(raw_dense);
                check(hir_dense_search_file(store.get(), query_vectors->c_str(), query_ids->c_str(), search_k, threads,
                                            &raw_run));
            } else {
                throw Failure{HIR_E_INVALID_ARGUMENT, "give --index or --dense-vectors with --dense-ids"};
            }
            RunPtr run(raw_run);
            check(hir_run_set_tag(run.get(), search_tag.c_str()));
            check(hir_run_save(run.get(), search_out.c_str()));
            std::size_t n = 0;
            check(hir_run_query_count(run.get(), &n));
            std::cout << nlohmann::ordered_json{{"queries", n}, {"out", search_out}}.dump() << "\n";
        } else if (train->parsed()) {
            if (!train_names.empty() && train_names.size() != train_runs.size()) {
                throw Failure{HIR_E_INVALID_ARGUMENT, "--names must list one name per run"};
            }
            auto runs = load_runs(train_runs);
            auto ptrs = raw(runs);
            std::vector<const char*> names;
            for (const auto& n : train_names) names.push_back(n.c_str());
            hir_model* raw_model = nullptr;
            check(hir_model_train(ptrs.data(), names.empty() ? nullptr : names.data(), ptrs.size(),
                                  train_qrels.c_str(), &params, pool_depth, &raw_model));
            ModelPtr model(raw_model);
            check(hir_model_save(model.get(), train_out.c_str()));
            std::size_t features = 0;
            check(hir_model_feature_count(model.get(), &features));
            std::cout << nlohmann::ordered_json{{"features", features}, {"trees", params.n_trees}, {"out", train_out}}
                             .dump()
                      << "\n";
        } else if (fuse->parsed()) {
            hir_model* raw_model = nullptr;
            check(hir_model_load(fuse_model.c_str(), &raw_model));
            ModelPtr model(raw_model);
            auto runs = load_runs(fuse_runs);
            auto ptrs = raw(runs);
            hir_run* raw_run = nullptr;
            check(hir_fuse(model.get(), ptrs.data(), ptrs.size(), fuse_k, threads, &raw_run));
            RunPtr run(raw_run);
            check(hir_run_set_tag(run.get(), fuse_tag.c_str()));
            check(hir_run_save(run.get(), fuse_out.c_str()));
            std::size_t n = 0;
            check(hir_run_query_count(run.get(), &n));
            std::cout << nlohmann::ordered_json{{"queries", n}, {"out", fuse_out}}.dump() << "\n";
        } else if (evaluate->parsed()) {
            auto runs = load_runs({eval_run});
            char* out = nullptr;
            check(hir_evaluate(runs.front().get(), eval_qrels.c_str(), &ks, &out));
            auto report = nlohmann::ordered_json::parse(take(out));
            if (eval_out) {
                std::ofstream f(*eval_out);
                f << report.dump(2) << "\n";
                if (!f) throw Failure{HIR_E_IO, "cannot write " + *eval_out};
            }
            std::cout << report["means"].dump() << "\n";
        } else if (prep->parsed()) {
            std::size_t read = 0, kept = 0;
            check(hir_preprocess(prep_in.c_str(), opt(prep_config), prep_out.c_str(), &read, &kept));
            std::cout << nlohmann::ordered_json{{"read", read}, {"kept", kept}, {"dropped", read - kept}}.dump()
                      << "\n";
        } else if (tput->parsed()) {
            char* out = nullptr;
            check(hir_bench_throughput(opt(tput_model), tput_queries, tput_candidates, threads, tput_seed, &out));
            std::cout << take(out) << "\n";
        } else if (losses_check->parsed()) {
            char* out = nullptr;
            check(hir_losses_check(loss_seed, loss_points, loss_step, &out));
            auto report = nlohmann::ordered_json::parse(take(out));
            std::cout << report.dump() << "\n";
            if (!report["gradients_ok"].get<bool>() || !report["mnr_zero_score_ok"].get<bool>()) return 1;
        } else if (validate->parsed()) {
            char* out = nullptr;
            check(hir_validate(val_corpus.c_str(), val_queries.c_str(), val_qrels.c_str(), &out));
            auto report = nlohmann::ordered_json::parse(take(out));
            std::cout << report.dump() << "\n";
            if (!report["clean"].get<bool>()) return 1;
        } else if (benchmark->parsed()) {
            char* out = nullptr;
            check(hir_benchmark(bench_config.c_str(), bench_out.c_str(), threads, &out));
            std::cout << take(out) << "\n";
        }
    } catch (const Failure& f) {
        print_error(f.status, f.message);
        return static_cast<int>(f.status);
    }
    return 0;
}
