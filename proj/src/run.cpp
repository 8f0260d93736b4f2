#include "hybridir/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "hybridir/error.hpp"
#include "io.hpp"

namespace hybridir {

void select_top_k(RankedList& docs, std::size_t k) {
    if (k < docs.size()) {
        std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(k), docs.end(), ranks_before);
        docs.resize(k);
    } else {
        std::sort(docs.begin(), docs.end(), ranks_before);
    }
}

void save_trec_run(const RetrievalRun& run, const std::filesystem::path& path) {
    auto out = io::open_out(path);
    const std::string tag = run.tag.empty() ? std::string("hybridir") : run.tag;
    for (const auto& [query_id, docs] : run.queries) {
        std::size_t rank = 1;
        for (const auto& doc : docs) {
            out << query_id << " Q0 " << doc.doc_id << ' ' << rank++ << ' ' << io::format_double(doc.score) << ' '
                << tag << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

RetrievalRun load_trec_run(const std::filesystem::path& path) {
    RetrievalRun run;
    bool tagged = false;
    std::set<std::pair<std::string, std::string>> seen;
    io::for_each_line(path, [&](std::string_view line, std::size_t number) {
        auto fields = io::split_ws(line);
        if (fields.empty()) return;
        if (fields.size() != 6) {
            throw ParseError(path.string(), number, "expected 6 whitespace-separated fields, got " +
                                                        std::to_string(fields.size()));
        }
        double score = 0.0;
        auto sf = fields[4];
        auto [ptr, ec] = std::from_chars(sf.data(), sf.data() + sf.size(), score);
        if (ec != std::errc() || ptr != sf.data() + sf.size() || !std::isfinite(score)) {
            throw ParseError(path.string(), number, "invalid score \"" + std::string(sf) + "\"");
        }
        std::string query_id(fields[0]);
        std::string doc_id(fields[2]);
        if (!seen.emplace(query_id, doc_id).second) {
            throw ParseError(path.string(), number, "duplicate entry for (" + query_id + ", " + doc_id + ")");
        }
        if (!tagged) {
            run.tag = std::string(fields[5]);
            tagged = true;
        }
        run.queries[query_id].push_back({std::move(doc_id), score});
    });
    for (auto& [query_id, docs] : run.queries) std::sort(docs.begin(), docs.end(), ranks_before);
    return run;
}

}  // namespace hybridir
