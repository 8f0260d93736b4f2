#pragma once

// Three tiny datasets in two groups (A: ds1, ds2; B: ds3), each with its
// own BEIR files, 2-d embeddings and sparse vectors. Every query has one
// relevant document, so each per-query NDCG@10 is 1 (rank 1), 1/log2(3)
// (rank 2) or 0 (not retrieved). Per-query outcomes:
//
//          bm25          impact        dense
//   ds1    q1 1, q2 0    q1 L, q2 1    q1 1, q2 L
//   ds2    q1 L, q2 1    q1 0, q2 1    q1 L, q2 1
//   ds3    q1 1          q1 L          q1 L
//
// with L = 1/log2(3).

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "hybridir/dense.hpp"
#include "support.hpp"

namespace toy {

inline double rank2() { return 1.0 / std::log2(3.0); }

struct Expected {
    double ds1, ds2, ds3;
    double group_a() const { return (ds1 + ds2) / 2.0; }
    double group_b() const { return ds3; }
    double overall() const { return (ds1 + ds2 + ds3) / 3.0; }
};

inline Expected expected_bm25() { return {0.5, (rank2() + 1.0) / 2.0, 1.0}; }
inline Expected expected_impact() { return {(rank2() + 1.0) / 2.0, 0.5, rank2()}; }
inline Expected expected_dense() { return {(1.0 + rank2()) / 2.0, (rank2() + 1.0) / 2.0, rank2()}; }

struct Doc {
    std::string id;
    std::string text;
    std::vector<float> embedding;
    std::string sparse;  // JSON object of term id -> weight
};

struct Query {
    std::string id;
    std::string text;
    std::string relevant;
    std::vector<float> embedding;
    std::string sparse;
};

inline void write_dataset(const std::filesystem::path& dir, const std::vector<Doc>& docs,
                          const std::vector<Query>& queries) {
    using testing_support::write_file;
    std::string corpus, qtext, qrels = "query-id\tcorpus-id\tscore\n", dsparse, qsparse, dids, qids;
    std::vector<float> dvec, qvec;
    std::vector<std::string> doc_ids, query_ids;
    for (const auto& d : docs) {
        corpus += "{\"_id\": \"" + d.id + "\", \"title\": \"\", \"text\": \"" + d.text + "\"}\n";
        dsparse += "{\"_id\": \"" + d.id + "\", \"vector\": " + d.sparse + "}\n";
        dvec.insert(dvec.end(), d.embedding.begin(), d.embedding.end());
        doc_ids.push_back(d.id);
    }
    for (const auto& q : queries) {
        qtext += "{\"_id\": \"" + q.id + "\", \"text\": \"" + q.text + "\"}\n";
        qrels += q.id + "\t" + q.relevant + "\t1\n";
        qsparse += "{\"_id\": \"" + q.id + "\", \"vector\": " + q.sparse + "}\n";
        qvec.insert(qvec.end(), q.embedding.begin(), q.embedding.end());
        query_ids.push_back(q.id);
    }
    write_file(dir / "corpus.jsonl", corpus);
    write_file(dir / "queries.jsonl", qtext);
    write_file(dir / "qrels.tsv", qrels);
    write_file(dir / "docs.sparse.jsonl", dsparse);
    write_file(dir / "queries.sparse.jsonl", qsparse);
    hybridir::dense::EmbeddingStore::create(2, doc_ids, dvec).save(dir / "docs.emb", dir / "docs.ids.jsonl");
    hybridir::dense::EmbeddingStore::create(2, query_ids, qvec).save(dir / "queries.emb", dir / "queries.ids.jsonl");
}

inline std::string dataset_entry(const std::string& name, const std::string& group) {
    return "{\"name\": \"" + name + "\", \"group\": \"" + group + "\", \"corpus\": \"" + name +
           "/corpus.jsonl\", \"queries\": \"" + name + "/queries.jsonl\", \"qrels\": \"" + name +
           "/qrels.tsv\", \"embeddings\": {\"docs\": \"" + name + "/docs.emb\", \"doc_ids\": \"" + name +
           "/docs.ids.jsonl\", \"queries\": \"" + name + "/queries.emb\", \"query_ids\": \"" + name +
           "/queries.ids.jsonl\"}, \"sparse\": {\"docs\": \"" + name + "/docs.sparse.jsonl\", \"queries\": \"" +
           name + "/queries.sparse.jsonl\"}}";
}

/// Writes the datasets and `config.json` under `dir`; returns the config path.
inline std::filesystem::path write_toy_benchmark(const std::filesystem::path& dir, bool with_hybrid = true,
                                                 const std::string& exclude = "[]") {
    write_dataset(dir / "ds1",
                  {{"a1", "alpha", {1, 0}, "{\"1\": 1}"},
                   {"a2", "beta", {0, 1}, "{\"1\": 2}"},
                   {"a3", "gamma", {1, 1}, "{\"2\": 1}"}},
                  {{"q1", "alpha", "a1", {1, 0}, "{\"1\": 1}"}, {"q2", "beta", "a3", {0, 1}, "{\"2\": 1}"}});
    write_dataset(dir / "ds2",
                  {{"b1", "delta delta", {1, 0}, "{\"1\": 1}"}, {"b2", "delta epsilon epsilon epsilon", {0, 1}, "{\"2\": 1}"}},
                  {{"q1", "delta", "b2", {1, 0}, "{\"1\": 1}"}, {"q2", "epsilon", "b2", {0, 1}, "{\"2\": 1}"}});
    write_dataset(dir / "ds3", {{"c1", "zeta", {1, 0}, "{\"1\": 1}"}, {"c2", "eta", {0, 1}, "{\"2\": 1}"}},
                  {{"q1", "zeta", "c1", {-1, 0}, "{\"1\": 1, \"2\": 2}"}});
    std::string retrievers =
        "{\"name\": \"bm25\", \"kind\": \"bm25\"}, {\"name\": \"impact\", \"kind\": \"impact\"}, "
        "{\"name\": \"dense\", \"kind\": \"dense\"}";
    if (with_hybrid) {
        retrievers +=
            ", {\"name\": \"hybrid\", \"kind\": \"hybrid\", \"members\": [\"bm25\", \"dense\"], "
            "\"train_datasets\": [\"ds1\", \"ds2\"], \"params\": {\"n_trees\": 5, \"seed\": 3}}";
    }
    std::string config = "{\n  \"groups\": [\"A\", \"B\"],\n  \"exclude\": " + exclude + ",\n  \"datasets\": [\n    " +
                          dataset_entry("ds1", "A") + ",\n    " + dataset_entry("ds2", "A") + ",\n    " +
                          dataset_entry("ds3", "B") + "\n  ],\n  \"retrievers\": [" + retrievers + "]\n}\n";
    return testing_support::write_file(dir / "config.json", config);
}

}  // namespace toy
