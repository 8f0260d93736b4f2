#pragma once

// Two simulated indexes over the same queries. Index 0 is reliable on even
// queries and index 1 on odd ones. A reliable run scores relevant documents
// in [6, 10] and the rest in [0, 5]; an unreliable run scores every document
// uniformly in [0, 5], so its order carries no signal.

#include <random>
#include <string>
#include <vector>

#include "hybridir/corpus.hpp"
#include "hybridir/run.hpp"

namespace synthetic {

struct FusionFixture {
    std::vector<std::string> query_ids;
    std::vector<hybridir::RetrievalRun> runs;  // two members
    hybridir::QrelSet qrels;
};

inline std::string query_id(std::size_t i) {
    std::string s = std::to_string(i);
    return "q" + std::string(4 - s.size(), '0') + s;
}

inline FusionFixture make_fusion_fixture(std::size_t n_queries = 200, std::size_t docs_per_query = 40,
                                         std::uint64_t seed = 17) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> low(0.0, 5.0), high(6.0, 10.0);
    std::uniform_int_distribution<int> n_relevant(1, 3);
    FusionFixture f;
    f.runs.resize(2);
    f.runs[0].tag = "index-a";
    f.runs[1].tag = "index-b";
    for (std::size_t q = 0; q < n_queries; ++q) {
        auto qid = query_id(q);
        f.query_ids.push_back(qid);
        int relevant = n_relevant(rng);
        for (std::size_t d = 0; d < docs_per_query; ++d) {
            auto doc = qid + "-d" + std::to_string(d);
            bool is_relevant = static_cast<int>(d) < relevant;
            f.qrels.add(qid, doc, is_relevant ? 1 : 0);
            for (std::size_t member = 0; member < 2; ++member) {
                bool reliable = q % 2 == member;
                double score = reliable && is_relevant ? high(rng) : low(rng);
                f.runs[member].queries[qid].push_back({doc, score});
            }
        }
        for (auto& run : f.runs) hybridir::select_top_k(run.queries[qid], docs_per_query);
    }
    return f;
}

/// Copy of `run` restricted to the given queries.
inline hybridir::RetrievalRun subset(const hybridir::RetrievalRun& run, const std::vector<std::string>& ids) {
    hybridir::RetrievalRun out;
    out.tag = run.tag;
    for (const auto& id : ids) {
        if (const auto* list = run.find(id)) out.queries[id] = *list;
    }
    return out;
}

inline hybridir::QrelSet subset(const hybridir::QrelSet& qrels, const std::vector<std::string>& ids) {
    hybridir::QrelSet out;
    for (const auto& id : ids) {
        if (const auto* j = qrels.find(id)) {
            for (const auto& [doc, grade] : *j) out.add(id, doc, grade);
        }
    }
    return out;
}

}  // namespace synthetic
