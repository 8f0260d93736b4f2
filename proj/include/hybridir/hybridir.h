/* C interface to the hybridir retrieval engine.
 *
 * Every function returns HIR_OK (0) or an error code; on error the message
 * is available from hir_last_error() on the calling thread until the next
 * call. Handles are opaque and owned by the caller, who releases them with
 * the matching *_free function. Strings returned through char** are
 * released with hir_string_free. A `threads` argument of 0 means
 * HYBRIDIR_THREADS, or the hardware concurrency when that is unset.
 */
#ifndef HYBRIDIR_H
#define HYBRIDIR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HIR_API __declspec(dllexport)
#else
#define HIR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hir_status {
    HIR_OK = 0,
    HIR_E_INVALID_ARGUMENT = 1,
    HIR_E_PARSE = 2,
    HIR_E_VALIDATION = 3,
    HIR_E_IO = 4,
    HIR_E_FORMAT = 5,
    HIR_E_DIMENSION = 6,
    HIR_E_NUMERIC = 7,
    HIR_E_INTERNAL = 99
} hir_status;

typedef struct hir_index hir_index; /* BM25 or impact inverted index */
typedef struct hir_dense hir_dense; /* normalized embedding store */
typedef struct hir_run hir_run;     /* per-query ranked lists */
typedef struct hir_model hir_model; /* LambdaMART fusion model */

typedef struct hir_ltr_params {
    size_t n_trees;
    size_t max_depth;
    double row_subsample;
    double col_subsample_per_tree;
    double learning_rate;
    double sigma;
    double l2_leaf_reg;
    double min_child_weight;
    size_t ndcg_truncation; /* 0 = full list */
    uint64_t seed;
} hir_ltr_params;

typedef struct hir_metric_ks {
    size_t ndcg;
    size_t mrr;
    size_t recall;
    size_t accuracy;
} hir_metric_ks;

HIR_API const char* hir_version(void);
HIR_API const char* hir_last_error(void);
HIR_API const char* hir_status_name(hir_status status);
HIR_API void hir_string_free(char* s);

/* Indexes. stopwords/lemmas may be NULL. */
HIR_API hir_status hir_bm25_build(const char* corpus_path, const char* stopwords_path, const char* lemmas_path,
                                  double k1, double b, hir_index** out);
HIR_API hir_status hir_impact_build(const char* doc_vectors_path, hir_index** out);
HIR_API hir_status hir_index_load(const char* path, hir_index** out);
HIR_API hir_status hir_index_save(const hir_index* index, const char* path);
HIR_API hir_status hir_index_doc_count(const hir_index* index, size_t* out);
/* 0 = bm25, 1 = impact */
HIR_API hir_status hir_index_kind(const hir_index* index, int* out);
HIR_API void hir_index_free(hir_index* index);

/* BM25 reads queries.jsonl; an impact index reads sparse query vectors. */
HIR_API hir_status hir_index_search_file(const hir_index* index, const char* queries_path, size_t k, unsigned threads,
                                         hir_run** out);

HIR_API hir_status hir_dense_load(const char* vectors_path, const char* ids_path, hir_dense** out);
HIR_API hir_status hir_dense_search_file(const hir_dense* store, const char* query_vectors_path,
                                         const char* query_ids_path, size_t k, unsigned threads, hir_run** out);
HIR_API void hir_dense_free(hir_dense* store);

/* Runs in TREC format. */
HIR_API hir_status hir_run_load(const char* path, hir_run** out);
HIR_API hir_status hir_run_save(const hir_run* run, const char* path);
HIR_API hir_status hir_run_set_tag(hir_run* run, const char* tag);
HIR_API hir_status hir_run_query_count(const hir_run* run, size_t* out);
HIR_API void hir_run_free(hir_run* run);

/* Fusion. `names` may be NULL; otherwise n_runs member names stored in the model. */
HIR_API void hir_ltr_params_default(hir_ltr_params* params);
HIR_API hir_status hir_model_train(const hir_run* const* runs, const char* const* names, size_t n_runs,
                                   const char* qrels_path, const hir_ltr_params* params, size_t pool_depth,
                                   hir_model** out);
HIR_API hir_status hir_model_load(const char* path, hir_model** out);
HIR_API hir_status hir_model_save(const hir_model* model, const char* path);
HIR_API hir_status hir_model_feature_count(const hir_model* model, size_t* out);
HIR_API void hir_model_free(hir_model* model);
HIR_API hir_status hir_fuse(const hir_model* model, const hir_run* const* runs, size_t n_runs, size_t k,
                            unsigned threads, hir_run** out);

/* Evaluation; `ks` may be NULL for 10/10/100/1. The JSON holds means and per-query values. */
HIR_API void hir_metric_ks_default(hir_metric_ks* ks);
HIR_API hir_status hir_evaluate(const hir_run* run, const char* qrels_path, const hir_metric_ks* ks, char** json_out);
HIR_API hir_status hir_validate(const char* corpus_path, const char* queries_path, const char* qrels_path,
                                char** json_out);

/* QA-pair cleaning; with a NULL config_path only the length limits apply. */
HIR_API hir_status hir_preprocess(const char* input_path, const char* config_path, const char* output_path,
                                  size_t* read, size_t* kept);

/* model_path may be NULL for a random 100-tree, depth-6 model over two indexes. */
HIR_API hir_status hir_bench_throughput(const char* model_path, size_t n_queries, size_t candidates_per_query,
                                        unsigned threads, uint64_t seed, char** json_out);
HIR_API hir_status hir_losses_check(uint64_t seed, size_t points, double step, char** json_out);
HIR_API hir_status hir_benchmark(const char* config_path, const char* out_dir, unsigned threads, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* HYBRIDIR_H */
