#include "hybridir/sparse.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "hybridir/error.hpp"
#include "hybridir/utf8.hpp"
#include "io.hpp"
#include "json.hpp"

namespace hybridir::sparse {

namespace {

constexpr std::string_view kMagic = "SPIX1";

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::vector<std::string> out;
    io::for_each_line(path, [&](std::string_view line, std::size_t) {
        auto b = line.find_first_not_of(" \t");
        if (b == std::string_view::npos || line[b] == '#') return;
        auto e = line.find_last_not_of(" \t");
        out.emplace_back(line.substr(b, e - b + 1));
    });
    return out;
}

void write_header(io::BinaryWriter& w, IndexKind kind, const std::vector<std::string>& doc_ids) {
    w.bytes(kMagic.data(), kMagic.size());
    w.put<std::uint8_t>(static_cast<std::uint8_t>(kind));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(doc_ids.size()));
    for (const auto& id : doc_ids) w.str(id);
}

std::vector<std::string> read_header(io::BinaryReader& r, IndexKind expected) {
    r.expect_magic(kMagic);
    auto kind = r.get<std::uint8_t>();
    if (kind != static_cast<std::uint8_t>(expected)) {
        throw FormatError("index kind " + std::to_string(kind) + " does not match the requested kind " +
                          std::to_string(static_cast<int>(expected)));
    }
    auto n = r.get<std::uint32_t>();
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) ids.push_back(r.str());
    return ids;
}

std::unordered_map<std::string, std::uint32_t> lookup_for(const std::vector<std::string>& ids) {
    std::unordered_map<std::string, std::uint32_t> lookup;
    lookup.reserve(ids.size());
    for (std::uint32_t i = 0; i < ids.size(); ++i) {
        if (!lookup.emplace(ids[i], i).second) throw FormatError("duplicate document id \"" + ids[i] + "\" in index");
    }
    return lookup;
}

}  // namespace

Analyzer::Analyzer(AnalyzerConfig config) : config_(std::move(config)) {}

std::vector<std::string> Analyzer::analyze(std::string_view text) const {
    std::vector<std::string> tokens;
    for (auto& word : utf8::words(utf8::decode(text))) {
        auto token = utf8::encode(config_.lowercase ? utf8::to_lower(word) : word);
        if (config_.stopwords.count(token)) continue;
        auto it = config_.lemmas.find(token);
        tokens.push_back(it == config_.lemmas.end() ? std::move(token) : it->second);
    }
    return tokens;
}

AnalyzerConfig load_analyzer_config(const std::filesystem::path& stopwords, const std::filesystem::path& lemmas,
                                    bool lowercase) {
    AnalyzerConfig config;
    config.lowercase = lowercase;
    if (!stopwords.empty()) {
        for (auto& w : read_lines(stopwords)) config.stopwords.insert(lowercase ? utf8::to_lower(w) : w);
    }
    if (!lemmas.empty()) {
        io::for_each_line(lemmas, [&](std::string_view line, std::size_t number) {
            if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#') return;
            auto fields = io::split(line, '\t');
            if (fields.size() != 2) throw ParseError(lemmas.string(), number, "expected surface<TAB>lemma");
            std::string surface(fields[0]);
            std::string lemma(fields[1]);
            if (lowercase) {
                surface = utf8::to_lower(surface);
                lemma = utf8::to_lower(lemma);
            }
            config.lemmas.emplace(std::move(surface), std::move(lemma));
        });
    }
    return config;
}

// ---------------------------------------------------------------- BM25

Bm25Index Bm25Index::build(const CorpusStore& corpus, Analyzer analyzer, Bm25Params params) {
    if (corpus.empty()) throw InvalidArgument("cannot build a BM25 index over an empty corpus");
    if (!(params.k1 >= 0.0) || !(params.b >= 0.0 && params.b <= 1.0)) {
        throw InvalidArgument("BM25 parameters out of range: need k1 >= 0 and 0 <= b <= 1");
    }
    Bm25Index index;
    index.analyzer_ = std::move(analyzer);
    index.params_ = params;
    index.doc_ids_.reserve(corpus.size());
    index.doc_lengths_.reserve(corpus.size());
    std::uint64_t total_length = 0;
    for (const auto& doc : corpus) {
        auto doc_no = static_cast<std::uint32_t>(index.doc_ids_.size());
        index.doc_ids_.push_back(doc.doc_id);
        std::string content = doc.title ? *doc.title + " " + doc.text : doc.text;
        auto tokens = index.analyzer_.analyze(content);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_length += tokens.size();
        std::map<std::string, std::uint32_t> counts;
        for (auto& t : tokens) ++counts[t];
        for (auto& [term, tf] : counts) index.postings_[term].push_back({doc_no, tf});
    }
    index.doc_lookup_ = lookup_for(index.doc_ids_);
    index.avg_doc_length_ = static_cast<double>(total_length) / static_cast<double>(corpus.size());
    return index;
}

std::uint32_t Bm25Index::internal_doc(std::string_view doc_id) const {
    auto it = doc_lookup_.find(std::string(doc_id));
    if (it == doc_lookup_.end()) throw InvalidArgument("unknown document id \"" + std::string(doc_id) + "\"");
    return it->second;
}

std::uint32_t Bm25Index::doc_length(std::string_view doc_id) const { return doc_lengths_[internal_doc(doc_id)]; }

std::size_t Bm25Index::document_frequency(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    return it == postings_.end() ? 0 : it->second.size();
}

std::uint32_t Bm25Index::term_frequency(std::string_view term, std::string_view doc_id) const {
    auto doc = internal_doc(doc_id);
    auto it = postings_.find(std::string(term));
    if (it == postings_.end()) return 0;
    const auto& list = it->second;
    auto pos = std::lower_bound(list.begin(), list.end(), doc, [](const Posting& p, std::uint32_t d) { return p.doc < d; });
    return (pos != list.end() && pos->doc == doc) ? pos->tf : 0;
}

double Bm25Index::idf(std::string_view term) const {
    auto df = static_cast<double>(document_frequency(term));
    auto n = static_cast<double>(doc_count());
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double Bm25Index::term_weight(double idf, std::uint32_t tf, std::uint32_t doc) const {
    double f = tf;
    double norm = avg_doc_length_ > 0.0 ? static_cast<double>(doc_lengths_[doc]) / avg_doc_length_ : 1.0;
    return idf * f / (f + params_.k1 * (1.0 - params_.b + params_.b * norm));
}

double Bm25Index::score(std::span<const std::string> query_terms, std::string_view doc_id) const {
    auto doc = internal_doc(doc_id);
    double total = 0.0;
    for (const auto& term : query_terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& list = it->second;
        auto pos = std::lower_bound(list.begin(), list.end(), doc,
                                    [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (pos == list.end() || pos->doc != doc) continue;
        total += term_weight(idf(term), pos->tf, doc);
    }
    return total;
}

RankedList Bm25Index::search(std::string_view query_text, std::size_t k) const {
    auto terms = analyzer_.analyze(query_text);
    return search_terms(terms, k);
}

RankedList Bm25Index::search_terms(std::span<const std::string> query_terms, std::size_t k) const {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    std::vector<double> acc(doc_count(), 0.0);
    std::vector<char> touched(doc_count(), 0);
    std::vector<std::uint32_t> hits;
    for (const auto& term : query_terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        double term_idf = idf(term);
        for (const auto& p : it->second) {
            acc[p.doc] += term_weight(term_idf, p.tf, p.doc);
            if (!touched[p.doc]) {
                touched[p.doc] = 1;
                hits.push_back(p.doc);
            }
        }
    }
    RankedList out;
    out.reserve(hits.size());
    for (auto doc : hits) out.push_back({doc_ids_[doc], acc[doc]});
    select_top_k(out, k);
    return out;
}

void Bm25Index::save(const std::filesystem::path& path) const {
    auto out = io::open_out(path, true);
    io::BinaryWriter w(out);
    write_header(w, IndexKind::kBm25, doc_ids_);
    w.put<double>(params_.k1);
    w.put<double>(params_.b);
    const auto& cfg = analyzer_.config();
    w.put<std::uint8_t>(cfg.lowercase ? 1 : 0);
    std::vector<std::string> stop(cfg.stopwords.begin(), cfg.stopwords.end());
    std::sort(stop.begin(), stop.end());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(stop.size()));
    for (const auto& s : stop) w.str(s);
    std::map<std::string, std::string> lemmas(cfg.lemmas.begin(), cfg.lemmas.end());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(lemmas.size()));
    for (const auto& [surface, lemma] : lemmas) {
        w.str(surface);
        w.str(lemma);
    }
    for (auto len : doc_lengths_) w.put<std::uint32_t>(len);
    std::vector<const std::string*> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, list] : postings_) terms.push_back(&term);
    std::sort(terms.begin(), terms.end(), [](const std::string* a, const std::string* b) { return *a < *b; });
    w.put<std::uint32_t>(static_cast<std::uint32_t>(terms.size()));
    for (const auto* term : terms) {
        const auto& list = postings_.at(*term);
        w.str(*term);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(list.size()));
        for (const auto& p : list) {
            w.put<std::uint32_t>(p.doc);
            w.put<std::uint32_t>(p.tf);
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
    auto in = io::open_in(path, true);
    io::BinaryReader r(in, path.string());
    Bm25Index index;
    index.doc_ids_ = read_header(r, IndexKind::kBm25);
    index.doc_lookup_ = lookup_for(index.doc_ids_);
    index.params_.k1 = r.get<double>();
    index.params_.b = r.get<double>();
    AnalyzerConfig cfg;
    cfg.lowercase = r.get<std::uint8_t>() != 0;
    auto n_stop = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_stop; ++i) cfg.stopwords.insert(r.str());
    auto n_lemma = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_lemma; ++i) {
        auto surface = r.str();
        cfg.lemmas.emplace(std::move(surface), r.str());
    }
    index.analyzer_ = Analyzer(std::move(cfg));
    const auto n_docs = static_cast<std::uint32_t>(index.doc_ids_.size());
    std::uint64_t total = 0;
    index.doc_lengths_.resize(n_docs);
    for (auto& len : index.doc_lengths_) {
        len = r.get<std::uint32_t>();
        total += len;
    }
    index.avg_doc_length_ = n_docs ? static_cast<double>(total) / n_docs : 0.0;
    auto n_terms = r.get<std::uint32_t>();
    for (std::uint32_t t = 0; t < n_terms; ++t) {
        auto term = r.str();
        auto n = r.get<std::uint32_t>();
        std::vector<Posting> list(n);
        for (auto& p : list) {
            p.doc = r.get<std::uint32_t>();
            p.tf = r.get<std::uint32_t>();
            if (p.doc >= n_docs) throw FormatError(path.string() + ": posting refers to document " + std::to_string(p.doc));
        }
        index.postings_.emplace(std::move(term), std::move(list));
    }
    r.expect_end();
    return index;
}

// ---------------------------------------------------------------- impact

SparseVector SparseVector::from_entries(std::vector<std::pair<TermId, float>> entries) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& [term, weight] = entries[i];
        if (!std::isfinite(weight) || weight < 0.0f) {
            throw InvalidArgument("term " + std::to_string(term) + " has invalid weight " + std::to_string(weight) +
                                  " (weights must be finite and non-negative)");
        }
        if (i > 0 && entries[i - 1].first == term) throw InvalidArgument("duplicate term " + std::to_string(term));
    }
    SparseVector v;
    v.entries_ = std::move(entries);
    return v;
}

double SparseVector::dot(const SparseVector& other) const {
    double total = 0.0;
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() && b != other.entries_.end()) {
        if (a->first < b->first) {
            ++a;
        } else if (b->first < a->first) {
            ++b;
        } else {
            total += static_cast<double>(a->second) * static_cast<double>(b->second);
            ++a;
            ++b;
        }
    }
    return total;
}

SparseVector SparseVector::scaled(float factor) const {
    auto entries = entries_;
    for (auto& e : entries) e.second *= factor;
    return from_entries(std::move(entries));
}

NamedSparseVectors load_sparse_vectors(const std::filesystem::path& path) {
    using nlohmann::json;
    NamedSparseVectors out;
    io::for_each_line(path, [&](std::string_view line, std::size_t number) {
        if (line.find_first_not_of(" \t") == std::string_view::npos) return;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(path.string(), number, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object() || !record.contains("_id") || !record["_id"].is_string() ||
            !record.contains("vector") || !record["vector"].is_object()) {
            throw ParseError(path.string(), number, "expected {\"_id\": str, \"vector\": {term: weight}}");
        }
        std::vector<std::pair<TermId, float>> entries;
        for (const auto& [key, value] : record["vector"].items()) {
            TermId term = 0;
            auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), term);
            if (ec != std::errc() || ptr != key.data() + key.size()) {
                throw ParseError(path.string(), number, "term id \"" + key + "\" is not a non-negative integer");
            }
            if (!value.is_number()) throw ParseError(path.string(), number, "weight for term " + key + " is not a number");
            entries.emplace_back(term, value.get<float>());
        }
        try {
            out.emplace_back(record["_id"].get<std::string>(), SparseVector::from_entries(std::move(entries)));
        } catch (const InvalidArgument& e) {
            throw ParseError(path.string(), number, e.what());
        }
    });
    return out;
}

void save_sparse_vectors(const NamedSparseVectors& vectors, const std::filesystem::path& path) {
    auto out = io::open_out(path);
    for (const auto& [id, vec] : vectors) {
        out << "{\"_id\":" << nlohmann::json(id).dump() << ",\"vector\":{";
        bool first = true;
        for (const auto& [term, weight] : vec.entries()) {
            if (!first) out << ',';
            first = false;
            out << '"' << term << "\":" << io::format_double(static_cast<double>(weight));
        }
        out << "}}\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

ImpactIndex ImpactIndex::build(const NamedSparseVectors& docs) {
    ImpactIndex index;
    index.doc_ids_.reserve(docs.size());
    for (const auto& [id, vec] : docs) {
        auto doc_no = static_cast<std::uint32_t>(index.doc_ids_.size());
        index.doc_ids_.push_back(id);
        for (const auto& [term, weight] : vec.entries()) {
            if (!std::isfinite(weight) || weight < 0.0f) {
                throw InvalidArgument("document \"" + id + "\" has a negative or non-finite weight");
            }
            index.postings_[term].push_back({doc_no, weight});
        }
    }
    try {
        index.doc_lookup_ = lookup_for(index.doc_ids_);
    } catch (const FormatError& e) {
        throw InvalidArgument(e.what());
    }
    return index;
}

std::size_t ImpactIndex::posting_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [term, list] : postings_) n += list.size();
    return n;
}

RankedList ImpactIndex::search(const SparseVector& query, std::size_t k) const {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    std::vector<double> acc(doc_count(), 0.0);
    std::vector<char> touched(doc_count(), 0);
    std::vector<std::uint32_t> hits;
    for (const auto& [term, q_weight] : query.entries()) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        for (const auto& p : it->second) {
            acc[p.doc] += static_cast<double>(q_weight) * static_cast<double>(p.weight);
            if (!touched[p.doc]) {
                touched[p.doc] = 1;
                hits.push_back(p.doc);
            }
        }
    }
    RankedList out;
    out.reserve(hits.size());
    for (auto doc : hits) {
        if (acc[doc] > 0.0) out.push_back({doc_ids_[doc], acc[doc]});
    }
    select_top_k(out, k);
    return out;
}

SparseVector ImpactIndex::reconstruct(std::string_view doc_id) const {
    auto it = doc_lookup_.find(std::string(doc_id));
    if (it == doc_lookup_.end()) throw InvalidArgument("unknown document id \"" + std::string(doc_id) + "\"");
    std::vector<std::pair<TermId, float>> entries;
    for (const auto& [term, list] : postings_) {
        auto pos = std::lower_bound(list.begin(), list.end(), it->second,
                                    [](const ImpactPosting& p, std::uint32_t d) { return p.doc < d; });
        if (pos != list.end() && pos->doc == it->second) entries.emplace_back(term, pos->weight);
    }
    return SparseVector::from_entries(std::move(entries));
}

void ImpactIndex::save(const std::filesystem::path& path) const {
    auto out = io::open_out(path, true);
    io::BinaryWriter w(out);
    write_header(w, IndexKind::kImpact, doc_ids_);
    std::vector<TermId> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, list] : postings_) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(terms.size()));
    for (auto term : terms) {
        const auto& list = postings_.at(term);
        w.put<std::uint32_t>(term);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(list.size()));
        for (const auto& p : list) {
            w.put<std::uint32_t>(p.doc);
            w.put<float>(p.weight);
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

ImpactIndex ImpactIndex::load(const std::filesystem::path& path) {
    auto in = io::open_in(path, true);
    io::BinaryReader r(in, path.string());
    ImpactIndex index;
    index.doc_ids_ = read_header(r, IndexKind::kImpact);
    index.doc_lookup_ = lookup_for(index.doc_ids_);
    const auto n_docs = static_cast<std::uint32_t>(index.doc_ids_.size());
    auto n_terms = r.get<std::uint32_t>();
    for (std::uint32_t t = 0; t < n_terms; ++t) {
        auto term = r.get<std::uint32_t>();
        auto n = r.get<std::uint32_t>();
        std::vector<ImpactPosting> list(n);
        for (auto& p : list) {
            p.doc = r.get<std::uint32_t>();
            p.weight = r.get<float>();
            if (p.doc >= n_docs) throw FormatError(path.string() + ": posting refers to document " + std::to_string(p.doc));
        }
        index.postings_.emplace(term, std::move(list));
    }
    r.expect_end();
    return index;
}

IndexKind peek_index_kind(const std::filesystem::path& path) {
    auto in = io::open_in(path, true);
    io::BinaryReader r(in, path.string());
    r.expect_magic(kMagic);
    auto kind = r.get<std::uint8_t>();
    if (kind > 1) throw FormatError(path.string() + ": unknown index kind " + std::to_string(kind));
    return static_cast<IndexKind>(kind);
}

}  // namespace hybridir::sparse
