#include "hybridir/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "hybridir/error.hpp"
#include "json.hpp"

namespace hybridir::metrics {

namespace {

int grade_of(const QueryJudgments& judgments, const std::string& doc_id) {
    auto it = judgments.find(doc_id);
    return it == judgments.end() ? 0 : it->second;
}

double discount(std::size_t rank) { return 1.0 / std::log2(static_cast<double>(rank) + 1.0); }

std::size_t relevant_count(const QueryJudgments& judgments) {
    return static_cast<std::size_t>(
        std::count_if(judgments.begin(), judgments.end(), [](const auto& kv) { return kv.second > 0; }));
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

}  // namespace

double dcg_at_k(const RankedList& run, const QueryJudgments& judgments, std::size_t k) {
    double dcg = 0.0;
    std::size_t limit = std::min(k, run.size());
    for (std::size_t i = 0; i < limit; ++i) {
        int grade = grade_of(judgments, run[i].doc_id);
        if (grade > 0) dcg += grade * discount(i + 1);
    }
    return dcg;
}

double ndcg_at_k(const RankedList& run, const QueryJudgments& judgments, std::size_t k) {
    std::vector<int> grades;
    for (const auto& [doc, grade] : judgments) {
        if (grade > 0) grades.push_back(grade);
    }
    if (grades.empty()) return 0.0;
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double ideal = 0.0;
    for (std::size_t i = 0; i < std::min(k, grades.size()); ++i) ideal += grades[i] * discount(i + 1);
    return dcg_at_k(run, judgments, k) / ideal;
}

double mrr_at_k(const RankedList& run, const QueryJudgments& judgments, std::size_t k) {
    std::size_t limit = std::min(k, run.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (grade_of(judgments, run[i].doc_id) > 0) return 1.0 / static_cast<double>(i + 1);
    }
    return 0.0;
}

std::optional<double> recall_at_k(const RankedList& run, const QueryJudgments& judgments, std::size_t k) {
    auto relevant = relevant_count(judgments);
    if (relevant == 0) return std::nullopt;
    std::size_t hits = 0;
    std::size_t limit = std::min(k, run.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (grade_of(judgments, run[i].doc_id) > 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(relevant);
}

double accuracy_at_1(const RankedList& run, const QueryJudgments& judgments) {
    if (run.empty()) return 0.0;
    return grade_of(judgments, run.front().doc_id) > 0 ? 1.0 : 0.0;
}

std::map<std::string, double> DatasetMetrics::means() const {
    return {{"ndcg@" + std::to_string(ks.ndcg), ndcg},
            {"mrr@" + std::to_string(ks.mrr), mrr},
            {"recall@" + std::to_string(ks.recall), recall},
            {"accuracy@" + std::to_string(ks.accuracy), accuracy}};
}

DatasetMetrics evaluate_run(const RetrievalRun& run, const QrelSet& qrels, const MetricKs& ks) {
    if (ks.ndcg == 0 || ks.mrr == 0 || ks.recall == 0 || ks.accuracy == 0) {
        throw InvalidArgument("metric cutoffs must be at least 1");
    }
    DatasetMetrics out;
    out.ks = ks;
    const RankedList empty;
    std::vector<double> ndcg, mrr, recall, acc;
    for (const auto& [query_id, judgments] : qrels.judgments()) {
        const RankedList* ranked = run.find(query_id);
        const RankedList& list = ranked ? *ranked : empty;
        QueryMetrics m;
        m.ndcg = ndcg_at_k(list, judgments, ks.ndcg);
        m.mrr = mrr_at_k(list, judgments, ks.mrr);
        m.recall = recall_at_k(list, judgments, ks.recall);
        // Accuracy@k generalizes Accuracy@1: a relevant doc anywhere in the
        // top k.
        m.accuracy = ks.accuracy == 1 ? accuracy_at_1(list, judgments) : (mrr_at_k(list, judgments, ks.accuracy) > 0.0 ? 1.0 : 0.0);
        ndcg.push_back(m.ndcg);
        mrr.push_back(m.mrr);
        acc.push_back(m.accuracy);
        if (m.recall) recall.push_back(*m.recall);
        out.per_query.emplace(query_id, m);
    }
    out.ndcg = mean(ndcg);
    out.mrr = mean(mrr);
    out.recall = mean(recall);
    out.accuracy = mean(acc);
    out.recall_queries = recall.size();
    return out;
}

std::string to_json(const DatasetMetrics& metrics) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["ks"] = {{"ndcg", metrics.ks.ndcg}, {"mrr", metrics.ks.mrr}, {"recall", metrics.ks.recall},
                 {"accuracy", metrics.ks.accuracy}};
    doc["queries"] = metrics.per_query.size();
    doc["means"] = ordered_json::object();
    for (const auto& [name, value] : metrics.means()) doc["means"][name] = value;
    doc["per_query"] = ordered_json::object();
    for (const auto& [qid, m] : metrics.per_query) {
        ordered_json q{{"ndcg", m.ndcg}, {"mrr", m.mrr}};
        q["recall"] = m.recall ? ordered_json(*m.recall) : ordered_json(nullptr);
        q["accuracy"] = m.accuracy;
        doc["per_query"][qid] = std::move(q);
    }
    return doc.dump(2);
}

GroupTable aggregate_groups(const std::map<std::string, double>& dataset_scores, const std::vector<Group>& grouping,
                            const std::set<std::string>& excluded) {
    std::map<std::string, std::string> owner;
    for (const auto& group : grouping) {
        for (const auto& ds : group.datasets) {
            auto [it, inserted] = owner.emplace(ds, group.name);
            if (!inserted && it->second != group.name) {
                throw InvalidArgument("dataset \"" + ds + "\" belongs to groups \"" + it->second + "\" and \"" +
                                      group.name + "\"");
            }
        }
    }
    for (const auto& [ds, score] : dataset_scores) {
        if (!owner.count(ds)) throw InvalidArgument("dataset \"" + ds + "\" is not assigned to any group");
    }
    GroupTable table;
    std::vector<double> all;
    for (const auto& group : grouping) {
        std::vector<double> values;
        for (const auto& ds : group.datasets) {
            if (excluded.count(ds)) continue;
            auto it = dataset_scores.find(ds);
            if (it == dataset_scores.end()) continue;
            values.push_back(it->second);
            all.push_back(it->second);
        }
        table.groups.emplace_back(group.name, values.empty() ? std::nullopt : std::optional<double>(mean(values)));
    }
    table.dataset_count = all.size();
    if (!all.empty()) table.overall = mean(all);
    return table;
}

std::string format_table(const std::vector<std::pair<std::string, GroupTable>>& rows) {
    std::vector<std::string> headers{"Model", "Avg."};
    if (!rows.empty()) {
        for (const auto& [name, value] : rows.front().second.groups) headers.push_back(name);
    }
    std::vector<std::vector<std::string>> cells;
    auto fmt = [](const std::optional<double>& v) {
        if (!v) return std::string("*");
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(2) << *v * 100.0;
        return ss.str();
    };
    for (const auto& [model, table] : rows) {
        std::vector<std::string> row{model, fmt(table.overall)};
        for (const auto& [name, value] : table.groups) row.push_back(fmt(value));
        cells.push_back(std::move(row));
    }
    std::vector<std::size_t> widths(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        widths[c] = headers[c].size();
        for (const auto& row : cells) {
            if (c < row.size()) widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << " | ";
            if (c == 0) {
                out << std::left << std::setw(static_cast<int>(widths[c])) << row[c];
            } else {
                out << std::right << std::setw(static_cast<int>(widths[c])) << row[c];
            }
        }
        out << '\n';
    };
    line(headers);
    std::size_t total = 0;
    for (auto w : widths) total += w;
    out << std::string(total + 3 * (widths.size() - 1), '-') << '\n';
    for (const auto& row : cells) line(row);
    return out.str();
}

}  // namespace hybridir::metrics
