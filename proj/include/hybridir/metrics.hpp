#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hybridir/corpus.hpp"
#include "hybridir/run.hpp"

namespace hybridir::metrics {

// Gain is the raw grade, discount log2(rank + 1). A document counts as
// relevant when its grade is > 0; unjudged documents have grade 0.

double dcg_at_k(const RankedList& run, const QueryJudgments& judgments, std::size_t k);
/// 0 when the query has no relevant documents.
double ndcg_at_k(const RankedList& run, const QueryJudgments& judgments, std::size_t k);
double mrr_at_k(const RankedList& run, const QueryJudgments& judgments, std::size_t k);
/// Absent when the query has no relevant documents.
std::optional<double> recall_at_k(const RankedList& run, const QueryJudgments& judgments, std::size_t k);
double accuracy_at_1(const RankedList& run, const QueryJudgments& judgments);

struct MetricKs {
    std::size_t ndcg = 10;
    std::size_t mrr = 10;
    std::size_t recall = 100;
    std::size_t accuracy = 1;
};

struct QueryMetrics {
    double ndcg = 0.0;
    double mrr = 0.0;
    std::optional<double> recall;
    double accuracy = 0.0;
};

/// Dataset-level means over every judged query. Queries missing from the run
/// score as empty rankings; recall skips queries without relevant documents.
struct DatasetMetrics {
    MetricKs ks;
    std::map<std::string, QueryMetrics> per_query;
    double ndcg = 0.0;
    double mrr = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
    std::size_t recall_queries = 0;

    /// Names such as "ndcg@10" mapped to dataset means.
    std::map<std::string, double> means() const;
};

DatasetMetrics evaluate_run(const RetrievalRun& run, const QrelSet& qrels, const MetricKs& ks = {});

/// JSON: {"ks": {...}, "means": {...}, "per_query": {qid: {...}}}.
std::string to_json(const DatasetMetrics& metrics);

struct Group {
    std::string name;
    std::vector<std::string> datasets;
};

struct GroupTable {
    /// Means in group order; absent when every member is excluded.
    std::vector<std::pair<std::string, std::optional<double>>> groups;
    std::optional<double> overall;
    std::size_t dataset_count = 0;
};

/// Unweighted mean per group and over all datasets (not over group means).
/// Throws InvalidArgument if a scored dataset belongs to no group, and
/// ignores datasets listed in `excluded`.
GroupTable aggregate_groups(const std::map<std::string, double>& dataset_scores, const std::vector<Group>& grouping,
                            const std::set<std::string>& excluded = {});

/// Fixed-width table: one row per model, columns Avg. then each group.
/// Missing values print as "*". Values are multiplied by 100.
std::string format_table(const std::vector<std::pair<std::string, GroupTable>>& rows);

}  // namespace hybridir::metrics
