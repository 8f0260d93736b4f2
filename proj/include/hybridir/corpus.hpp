#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hybridir {

struct CorpusRecord {
    std::string doc_id;
    std::optional<std::string> title;
    std::string text;
};

struct QueryRecord {
    std::string query_id;
    std::string text;
};

/// Documents in file order with id lookup. Immutable once built.
class CorpusStore {
   public:
    CorpusStore() = default;

    /// Throws ValidationError on duplicate or empty ids, or when both title
    /// and text are empty.
    static CorpusStore from_records(std::vector<CorpusRecord> records);

    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const CorpusRecord& operator[](std::size_t i) const { return records_[i]; }
    const CorpusRecord* find(const std::string& doc_id) const;
    bool contains(const std::string& doc_id) const { return find(doc_id) != nullptr; }

    auto begin() const noexcept { return records_.begin(); }
    auto end() const noexcept { return records_.end(); }

   private:
    std::vector<CorpusRecord> records_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

class QuerySet {
   public:
    QuerySet() = default;

    static QuerySet from_records(std::vector<QueryRecord> records);

    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const QueryRecord& operator[](std::size_t i) const { return records_[i]; }
    const QueryRecord* find(const std::string& query_id) const;

    auto begin() const noexcept { return records_.begin(); }
    auto end() const noexcept { return records_.end(); }

   private:
    std::vector<QueryRecord> records_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// query id -> doc id -> grade. Ordered maps keep iteration deterministic.
using QueryJudgments = std::map<std::string, int>;

class QrelSet {
   public:
    /// Throws ValidationError if the pair is already judged or grade < 0.
    void add(const std::string& query_id, const std::string& doc_id, int grade);

    const QueryJudgments* find(const std::string& query_id) const;
    std::size_t query_count() const noexcept { return judgments_.size(); }
    std::size_t judgment_count() const noexcept;

    const std::map<std::string, QueryJudgments>& judgments() const noexcept { return judgments_; }

   private:
    std::map<std::string, QueryJudgments> judgments_;
};

struct ValidationReport {
    std::size_t missing_docs = 0;
    std::size_t queries_without_judgments = 0;
    std::vector<std::string> duplicate_ids;
    // Query ids that appear in qrels but not in the query set.
    std::size_t unknown_queries = 0;

    bool clean() const noexcept {
        return missing_docs == 0 && queries_without_judgments == 0 && duplicate_ids.empty() &&
               unknown_queries == 0;
    }
};

/// JSONL with fields `_id`, optional `title`, `text`. Blank lines are skipped.
CorpusStore load_corpus(const std::filesystem::path& path);
/// JSONL with fields `_id`, `text`.
QuerySet load_queries(const std::filesystem::path& path);
/// Tab-separated query-id, doc-id, integer grade; an optional header row.
QrelSet load_qrels(const std::filesystem::path& path);

ValidationReport validate_dataset(const CorpusStore& corpus, const QuerySet& queries, const QrelSet& qrels);

/// File-level validation. Unlike the loaders, duplicate corpus and query ids
/// are collected into `duplicate_ids` (first occurrence wins) instead of
/// failing; malformed lines still throw ParseError.
ValidationReport validate_dataset_files(const std::filesystem::path& corpus,
                                        const std::filesystem::path& queries,
                                        const std::filesystem::path& qrels);

}  // namespace hybridir
