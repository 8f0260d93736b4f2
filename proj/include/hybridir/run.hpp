#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hybridir {

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Canonical ranking order: descending score, then ascending doc id.
inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

using RankedList = std::vector<ScoredDoc>;

/// Keeps the best `k` entries of `docs` in canonical order.
void select_top_k(RankedList& docs, std::size_t k);

/// Per-query ranked lists plus the system tag written to TREC files.
struct RetrievalRun {
    std::string tag = "hybridir";
    std::map<std::string, RankedList> queries;

    const RankedList* find(const std::string& query_id) const {
        auto it = queries.find(query_id);
        return it == queries.end() ? nullptr : &it->second;
    }
};

/// TREC run format, one line per entry: `qid Q0 docid rank score tag`.
/// Scores are written in shortest round-trip form.
void save_trec_run(const RetrievalRun& run, const std::filesystem::path& path);

/// Lines are re-sorted into canonical order per query; duplicate (qid, docid)
/// entries are a ParseError. The tag of the first line becomes the run tag.
RetrievalRun load_trec_run(const std::filesystem::path& path);

}  // namespace hybridir
