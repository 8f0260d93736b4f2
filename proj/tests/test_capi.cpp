#include <gtest/gtest.h>

#include <string>

#include "hybridir/hybridir.h"
#include "json.hpp"
#include "support.hpp"
#include "toy_benchmark.hpp"

using testing_support::TempDir;
using testing_support::write_file;

namespace {

std::string take(char* s) {
    std::string out = s ? s : "";
    hir_string_free(s);
    return out;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
    EXPECT_FALSE(std::string(hir_version()).empty());
    EXPECT_STREQ(hir_status_name(HIR_OK), "ok");
    EXPECT_STREQ(hir_status_name(HIR_E_IO), "io_error");
}

TEST(CApi, NullArgumentsAreRejected) {
    hir_index* index = nullptr;
    EXPECT_EQ(hir_bm25_build(nullptr, nullptr, nullptr, 0.9, 0.4, &index), HIR_E_INVALID_ARGUMENT);
    EXPECT_EQ(index, nullptr);
    EXPECT_FALSE(std::string(hir_last_error()).empty());
    size_t n = 0;
    EXPECT_EQ(hir_index_doc_count(nullptr, &n), HIR_E_INVALID_ARGUMENT);
    hir_index_free(nullptr);
    hir_run_free(nullptr);
    hir_model_free(nullptr);
    hir_dense_free(nullptr);
    hir_string_free(nullptr);
}

TEST(CApi, ErrorCodesFollowErrorKinds) {
    TempDir dir;
    hir_run* run = nullptr;
    EXPECT_EQ(hir_run_load((dir / "missing.trec").c_str(), &run), HIR_E_IO);
    EXPECT_NE(std::string(hir_last_error()).find("missing.trec"), std::string::npos);
    write_file(dir / "bad.trec", "q1 Q0 d1 1\n");
    EXPECT_EQ(hir_run_load((dir / "bad.trec").c_str(), &run), HIR_E_PARSE);
    write_file(dir / "bad.lmrt", "nope");
    hir_model* model = nullptr;
    EXPECT_EQ(hir_model_load((dir / "bad.lmrt").c_str(), &model), HIR_E_FORMAT);
    EXPECT_EQ(model, nullptr);
}

TEST(CApi, IndexSearchTrainFuseEvaluate) {
    TempDir dir;
    toy::write_toy_benchmark(dir.path(), false);
    auto ds = dir / "ds1";

    hir_index* bm25 = nullptr;
    ASSERT_EQ(hir_bm25_build((ds / "corpus.jsonl").c_str(), nullptr, nullptr, 0.9, 0.4, &bm25), HIR_OK)
        << hir_last_error();
    size_t docs = 0;
    ASSERT_EQ(hir_index_doc_count(bm25, &docs), HIR_OK);
    EXPECT_EQ(docs, 3u);
    int kind = -1;
    ASSERT_EQ(hir_index_kind(bm25, &kind), HIR_OK);
    EXPECT_EQ(kind, 0);
    ASSERT_EQ(hir_index_save(bm25, (dir / "bm25.spix").c_str()), HIR_OK);
    hir_index* loaded = nullptr;
    ASSERT_EQ(hir_index_load((dir / "bm25.spix").c_str(), &loaded), HIR_OK);

    hir_run* sparse_run = nullptr;
    ASSERT_EQ(hir_index_search_file(loaded, (ds / "queries.jsonl").c_str(), 10, 1, &sparse_run), HIR_OK);
    size_t queries = 0;
    ASSERT_EQ(hir_run_query_count(sparse_run, &queries), HIR_OK);
    EXPECT_EQ(queries, 2u);

    hir_dense* store = nullptr;
    ASSERT_EQ(hir_dense_load((ds / "docs.emb").c_str(), (ds / "docs.ids.jsonl").c_str(), &store), HIR_OK);
    hir_run* dense_run = nullptr;
    ASSERT_EQ(hir_dense_search_file(store, (ds / "queries.emb").c_str(), (ds / "queries.ids.jsonl").c_str(), 10, 1,
                                    &dense_run),
              HIR_OK);

    char* json = nullptr;
    ASSERT_EQ(hir_evaluate(sparse_run, (ds / "qrels.tsv").c_str(), nullptr, &json), HIR_OK);
    auto report = nlohmann::json::parse(take(json));
    EXPECT_NEAR(report["means"]["ndcg@10"].get<double>(), toy::expected_bm25().ds1, 1e-12);

    const hir_run* members[] = {sparse_run, dense_run};
    const char* names[] = {"bm25", "dense"};
    hir_ltr_params params;
    hir_ltr_params_default(&params);
    EXPECT_EQ(params.n_trees, 100u);
    EXPECT_EQ(params.max_depth, 6u);
    params.n_trees = 5;
    hir_model* model = nullptr;
    ASSERT_EQ(hir_model_train(members, names, 2, (ds / "qrels.tsv").c_str(), &params, 100, &model), HIR_OK)
        << hir_last_error();
    size_t features = 0;
    ASSERT_EQ(hir_model_feature_count(model, &features), HIR_OK);
    EXPECT_EQ(features, 8u);

    hir_run* fused = nullptr;
    ASSERT_EQ(hir_fuse(model, members, 2, 10, 1, &fused), HIR_OK);
    EXPECT_EQ(hir_fuse(model, members, 1, 10, 1, &fused), HIR_E_DIMENSION);
    ASSERT_EQ(hir_run_set_tag(fused, "mine"), HIR_OK);
    ASSERT_EQ(hir_run_save(fused, (dir / "fused.trec").c_str()), HIR_OK);
    EXPECT_NE(testing_support::read_file(dir / "fused.trec").find(" mine\n"), std::string::npos);

    hir_run_free(fused);
    hir_model_free(model);
    hir_run_free(dense_run);
    hir_dense_free(store);
    hir_run_free(sparse_run);
    hir_index_free(loaded);
    hir_index_free(bm25);
}

TEST(CApi, ChecksAndBenchmarks) {
    char* json = nullptr;
    ASSERT_EQ(hir_losses_check(1234, 5, 1e-5, &json), HIR_OK);
    auto losses = nlohmann::json::parse(take(json));
    EXPECT_TRUE(losses["gradients_ok"].get<bool>());
    EXPECT_TRUE(losses["mnr_zero_score_ok"].get<bool>());

    ASSERT_EQ(hir_bench_throughput(nullptr, 20, 200, 1, 7, &json), HIR_OK);
    auto speed = nlohmann::json::parse(take(json));
    EXPECT_EQ(speed["queries"].get<int>(), 20);
    EXPECT_EQ(speed["trees"].get<int>(), 100);

    TempDir dir;
    auto config = toy::write_toy_benchmark(dir.path(), false);
    ASSERT_EQ(hir_benchmark(config.c_str(), (dir / "out").c_str(), 1, &json), HIR_OK) << hir_last_error();
    auto bench = nlohmann::json::parse(take(json));
    EXPECT_FALSE(bench.empty());
    EXPECT_EQ(hir_benchmark((dir / "nope.json").c_str(), (dir / "out").c_str(), 1, &json), HIR_E_IO);
}
