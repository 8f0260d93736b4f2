#include "hybridir/corpus.hpp"

#include <charconv>
#include <set>

#include "io.hpp"
#include "json.hpp"

namespace hybridir {

namespace {

using nlohmann::json;

json parse_json_line(const std::filesystem::path& path, std::string_view line, std::size_t number) {
    json record;
    try {
        record = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), number, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(path.string(), number, "expected a JSON object");
    return record;
}

std::string string_field(const json& record, const char* key, const std::filesystem::path& path, std::size_t number,
                         bool required) {
    auto it = record.find(key);
    if (it == record.end() || it->is_null()) {
        if (required) throw ParseError(path.string(), number, std::string("missing field \"") + key + "\"");
        return {};
    }
    if (!it->is_string()) throw ParseError(path.string(), number, std::string("field \"") + key + "\" must be a string");
    return it->get<std::string>();
}

bool is_blank(std::string_view line) { return line.find_first_not_of(" \t\r\n") == std::string_view::npos; }

CorpusRecord parse_corpus_line(const std::filesystem::path& path, std::string_view line, std::size_t number) {
    auto record = parse_json_line(path, line, number);
    CorpusRecord doc;
    doc.doc_id = string_field(record, "_id", path, number, true);
    if (record.contains("title") && !record["title"].is_null()) {
        doc.title = string_field(record, "title", path, number, false);
    }
    doc.text = string_field(record, "text", path, number, true);
    if (doc.doc_id.empty()) throw ValidationError(path.string() + ":" + std::to_string(number) + ": empty _id");
    if (doc.text.empty() && (!doc.title || doc.title->empty())) {
        throw ValidationError(path.string() + ":" + std::to_string(number) + ": document \"" + doc.doc_id +
                              "\" has neither title nor text");
    }
    return doc;
}

QueryRecord parse_query_line(const std::filesystem::path& path, std::string_view line, std::size_t number) {
    auto record = parse_json_line(path, line, number);
    QueryRecord query;
    query.query_id = string_field(record, "_id", path, number, true);
    query.text = string_field(record, "text", path, number, true);
    if (query.query_id.empty()) throw ValidationError(path.string() + ":" + std::to_string(number) + ": empty _id");
    if (is_blank(query.text)) {
        throw ValidationError(path.string() + ":" + std::to_string(number) + ": query \"" + query.query_id +
                              "\" has blank text");
    }
    return query;
}

bool looks_numeric(std::string_view field) {
    if (field.empty()) return false;
    char c = field.front();
    return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.';
}

}  // namespace

CorpusStore CorpusStore::from_records(std::vector<CorpusRecord> records) {
    CorpusStore store;
    store.by_id_.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.doc_id.empty()) throw ValidationError("document at position " + std::to_string(i) + " has an empty id");
        if (r.text.empty() && (!r.title || r.title->empty())) {
            throw ValidationError("document \"" + r.doc_id + "\" has neither title nor text");
        }
        if (!store.by_id_.emplace(r.doc_id, i).second) {
            throw ValidationError("duplicate document id \"" + r.doc_id + "\"");
        }
    }
    store.records_ = std::move(records);
    return store;
}

const CorpusRecord* CorpusStore::find(const std::string& doc_id) const {
    auto it = by_id_.find(doc_id);
    return it == by_id_.end() ? nullptr : &records_[it->second];
}

QuerySet QuerySet::from_records(std::vector<QueryRecord> records) {
    QuerySet set;
    set.by_id_.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.query_id.empty()) throw ValidationError("query at position " + std::to_string(i) + " has an empty id");
        if (is_blank(r.text)) throw ValidationError("query \"" + r.query_id + "\" has blank text");
        if (!set.by_id_.emplace(r.query_id, i).second) {
            throw ValidationError("duplicate query id \"" + r.query_id + "\"");
        }
    }
    set.records_ = std::move(records);
    return set;
}

const QueryRecord* QuerySet::find(const std::string& query_id) const {
    auto it = by_id_.find(query_id);
    return it == by_id_.end() ? nullptr : &records_[it->second];
}

void QrelSet::add(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 0) throw ValidationError("negative grade for (" + query_id + ", " + doc_id + ")");
    if (!judgments_[query_id].emplace(doc_id, grade).second) {
        throw ValidationError("duplicate judgment for (" + query_id + ", " + doc_id + ")");
    }
}

const QueryJudgments* QrelSet::find(const std::string& query_id) const {
    auto it = judgments_.find(query_id);
    return it == judgments_.end() ? nullptr : &it->second;
}

std::size_t QrelSet::judgment_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [q, docs] : judgments_) n += docs.size();
    return n;
}

CorpusStore load_corpus(const std::filesystem::path& path) {
    std::vector<CorpusRecord> records;
    std::unordered_map<std::string, std::size_t> seen;
    io::for_each_line(path, [&](std::string_view line, std::size_t number) {
        if (is_blank(line)) return;
        auto doc = parse_corpus_line(path, line, number);
        auto [it, inserted] = seen.emplace(doc.doc_id, number);
        if (!inserted) {
            throw ValidationError(path.string() + ":" + std::to_string(number) + ": duplicate _id \"" + doc.doc_id +
                                  "\" (first seen on line " + std::to_string(it->second) + ")");
        }
        records.push_back(std::move(doc));
    });
    return CorpusStore::from_records(std::move(records));
}

QuerySet load_queries(const std::filesystem::path& path) {
    std::vector<QueryRecord> records;
    std::unordered_map<std::string, std::size_t> seen;
    io::for_each_line(path, [&](std::string_view line, std::size_t number) {
        if (is_blank(line)) return;
        auto query = parse_query_line(path, line, number);
        auto [it, inserted] = seen.emplace(query.query_id, number);
        if (!inserted) {
            throw ValidationError(path.string() + ":" + std::to_string(number) + ": duplicate _id \"" +
                                  query.query_id + "\" (first seen on line " + std::to_string(it->second) + ")");
        }
        records.push_back(std::move(query));
    });
    return QuerySet::from_records(std::move(records));
}

QrelSet load_qrels(const std::filesystem::path& path) {
    QrelSet qrels;
    bool first = true;
    io::for_each_line(path, [&](std::string_view line, std::size_t number) {
        if (is_blank(line)) return;
        auto fields = io::split(line, '\t');
        bool header_candidate = first;
        first = false;
        if (fields.size() != 3) {
            throw ParseError(path.string(), number, "expected 3 tab-separated columns, got " + std::to_string(fields.size()));
        }
        if (header_candidate && !looks_numeric(fields[2])) return;
        int grade = 0;
        auto grade_field = fields[2];
        auto [ptr, ec] = std::from_chars(grade_field.data(), grade_field.data() + grade_field.size(), grade);
        if (ec != std::errc() || ptr != grade_field.data() + grade_field.size()) {
            throw ParseError(path.string(), number, "grade \"" + std::string(grade_field) + "\" is not an integer");
        }
        if (grade < 0) throw ParseError(path.string(), number, "negative grade " + std::to_string(grade));
        if (fields[0].empty() || fields[1].empty()) throw ParseError(path.string(), number, "empty query or doc id");
        try {
            qrels.add(std::string(fields[0]), std::string(fields[1]), grade);
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    });
    return qrels;
}

ValidationReport validate_dataset(const CorpusStore& corpus, const QuerySet& queries, const QrelSet& qrels) {
    ValidationReport report;
    std::set<std::string> missing;
    for (const auto& [query_id, docs] : qrels.judgments()) {
        if (!queries.find(query_id)) ++report.unknown_queries;
        for (const auto& [doc_id, grade] : docs) {
            if (!corpus.contains(doc_id)) missing.insert(doc_id);
        }
    }
    report.missing_docs = missing.size();
    for (const auto& query : queries) {
        auto judged = qrels.find(query.query_id);
        if (!judged || judged->empty()) ++report.queries_without_judgments;
    }
    return report;
}

ValidationReport validate_dataset_files(const std::filesystem::path& corpus_path,
                                        const std::filesystem::path& queries_path,
                                        const std::filesystem::path& qrels_path) {
    std::vector<std::string> duplicates;
    std::set<std::string> seen_docs;
    std::vector<CorpusRecord> docs;
    io::for_each_line(corpus_path, [&](std::string_view line, std::size_t number) {
        if (is_blank(line)) return;
        auto doc = parse_corpus_line(corpus_path, line, number);
        if (!seen_docs.insert(doc.doc_id).second) {
            duplicates.push_back(doc.doc_id);
            return;
        }
        docs.push_back(std::move(doc));
    });
    std::set<std::string> seen_queries;
    std::vector<QueryRecord> queries;
    io::for_each_line(queries_path, [&](std::string_view line, std::size_t number) {
        if (is_blank(line)) return;
        auto query = parse_query_line(queries_path, line, number);
        if (!seen_queries.insert(query.query_id).second) {
            duplicates.push_back(query.query_id);
            return;
        }
        queries.push_back(std::move(query));
    });
    auto report = validate_dataset(CorpusStore::from_records(std::move(docs)),
                                   QuerySet::from_records(std::move(queries)), load_qrels(qrels_path));
    report.duplicate_ids = std::move(duplicates);
    return report;
}

}  // namespace hybridir
