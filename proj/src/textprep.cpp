#include "hybridir/textprep.hpp"

#include <algorithm>
#include <regex>

#include "hybridir/error.hpp"
#include "hybridir/utf8.hpp"
#include "io.hpp"
#include "json.hpp"

namespace hybridir::textprep {

namespace {

using nlohmann::json;

const std::regex& email_pattern() {
    static const std::regex re(R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,})");
    return re;
}

const std::regex& url_pattern() {
    static const std::regex re(R"((https?://|www\.)\S*)", std::regex::icase);
    return re;
}

const std::regex& numbering_pattern() {
    static const std::regex re(R"(^\s*[0-9]+[.)]\s+)");
    return re;
}

bool is_trailing_url_punct(char c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == ')' || c == '"' ||
           c == '\'';
}

// Replaces every match with a space. URL matches give back trailing
// punctuation that belongs to the surrounding sentence.
std::string blank_matches(const std::string& text, const std::regex& re, bool give_back_punct) {
    std::string out;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
        auto begin = static_cast<std::size_t>(it->position());
        auto end = begin + static_cast<std::size_t>(it->length());
        if (give_back_punct) {
            while (end > begin + 1 && is_trailing_url_punct(text[end - 1])) --end;
        }
        out.append(text, last, begin - last);
        out.push_back(' ');
        last = end;
    }
    out.append(text, last, std::string::npos);
    return out;
}

bool kept_char(char32_t cp) {
    return utf8::is_letter(cp) || utf8::is_digit(cp) || utf8::is_space(cp) ||
           kKeptPunctuation.find(cp) != std::u32string_view::npos;
}

bool is_word_char(char32_t cp) { return utf8::is_letter(cp) || utf8::is_digit(cp); }

std::u32string trim_spaces(std::u32string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && utf8::is_space(s[b])) ++b;
    while (e > b && utf8::is_space(s[e - 1])) --e;
    return std::u32string(s.substr(b, e - b));
}

std::string trim_ascii(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n\f\v");
    return std::string(s.substr(b, e - b + 1));
}

bool is_leading_junk(char32_t cp) {
    return utf8::is_space(cp) || cp == U'.' || cp == U',' || cp == U':' || cp == U';' || cp == U'!' || cp == U'?' ||
           cp == U'-';
}

bool is_trailing_junk(char32_t cp) {
    return utf8::is_space(cp) || cp == U',' || cp == U':' || cp == U';' || cp == U'-';
}

bool is_phrase_tail(char32_t cp) { return is_leading_junk(cp); }

bool hits_any(const std::vector<std::string>& tokens, std::initializer_list<const std::unordered_set<std::string>*> dicts) {
    for (const auto& token : tokens) {
        for (const auto* dict : dicts) {
            if (dict->count(token)) return true;
        }
    }
    return false;
}

// Lowercased surface forms plus their lemmas.
std::vector<std::string> surface_and_lemmas(std::string_view text, const PrepConfig& config) {
    std::vector<std::string> out;
    for (const auto& word : utf8::words(utf8::decode(text))) {
        auto surface = utf8::encode(utf8::to_lower(word));
        auto it = config.lemmas.find(surface);
        if (it != config.lemmas.end() && it->second != surface) out.push_back(it->second);
        out.push_back(std::move(surface));
    }
    return out;
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
    std::vector<std::string> out;
    io::for_each_line(path, [&](std::string_view line, std::size_t) {
        auto entry = trim_ascii(line);
        if (entry.empty() || entry.front() == '#') return;
        out.push_back(std::move(entry));
    });
    return out;
}

}  // namespace

void PrepConfig::finalize() {
    if (min_question_chars == 0 || min_answer_chars == 0 || low_quality_min_answer_chars == 0) {
        throw InvalidArgument("minimum lengths must be positive");
    }
    auto lower_set = [](std::unordered_set<std::string>& set) {
        std::unordered_set<std::string> out;
        for (const auto& w : set) out.insert(utf8::to_lower(w));
        set = std::move(out);
    };
    lower_set(first_names);
    lower_set(surnames);
    lower_set(contact_words);
    lower_set(image_words);
    lower_set(abbreviations);
    for (auto& p : boilerplate_phrases) p = utf8::to_lower(p);
    std::unordered_map<std::string, std::string> lowered;
    for (const auto& [surface, lemma] : lemmas) lowered.emplace(utf8::to_lower(surface), utf8::to_lower(lemma));
    lemmas = std::move(lowered);
    // Longest phrase first so "dzień dobry panie" wins over "dzień dobry".
    std::stable_sort(boilerplate_phrases.begin(), boilerplate_phrases.end(),
                     [](const std::string& a, const std::string& b) { return utf8::length(a) > utf8::length(b); });
    boilerplate_phrases.erase(std::remove(boilerplate_phrases.begin(), boilerplate_phrases.end(), std::string()),
                              boilerplate_phrases.end());
}

PrepConfig load_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(io::read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), 1, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError(path.string(), 1, "config must be a JSON object");
    const auto base = path.parent_path();
    auto list = [&](const char* key) -> std::vector<std::string> {
        if (!doc.contains(key)) return {};
        const auto& v = doc[key];
        if (v.is_string()) return read_word_list(base / v.get<std::string>());
        if (v.is_array()) return v.get<std::vector<std::string>>();
        throw InvalidArgument(std::string("config key \"") + key + "\" must be a file name or a list");
    };
    PrepConfig config;
    for (auto& w : list("first_names")) config.first_names.insert(std::move(w));
    for (auto& w : list("surnames")) config.surnames.insert(std::move(w));
    for (auto& w : list("contact_words")) config.contact_words.insert(std::move(w));
    for (auto& w : list("image_words")) config.image_words.insert(std::move(w));
    config.boilerplate_phrases = list("boilerplate_phrases");
    if (doc.contains("abbreviations")) {
        config.abbreviations.clear();
        for (auto& w : list("abbreviations")) config.abbreviations.insert(std::move(w));
    }
    if (doc.contains("lemmas")) {
        auto file = base / doc["lemmas"].get<std::string>();
        io::for_each_line(file, [&](std::string_view line, std::size_t number) {
            if (trim_ascii(line).empty() || line.front() == '#') return;
            auto fields = io::split(line, '\t');
            if (fields.size() != 2) throw ParseError(file.string(), number, "expected surface<TAB>lemma");
            config.lemmas.emplace(trim_ascii(fields[0]), trim_ascii(fields[1]));
        });
    }
    auto source_set = [&](const char* key, std::set<std::string>& out) {
        if (doc.contains(key)) {
            for (auto& v : doc[key].get<std::vector<std::string>>()) out.insert(std::move(v));
        }
    };
    config.min_question_chars = doc.value("min_question_chars", config.min_question_chars);
    config.min_answer_chars = doc.value("min_answer_chars", config.min_answer_chars);
    config.low_quality_min_answer_chars = doc.value("low_quality_min_answer_chars", config.low_quality_min_answer_chars);
    source_set("low_quality_sources", config.low_quality_sources);
    source_set("numbering_sources", config.numbering_sources);
    source_set("image_filter_sources", config.image_filter_sources);
    config.finalize();
    return config;
}

std::string normalize_text(std::string_view raw) {
    std::string text(raw);
    text = blank_matches(text, email_pattern(), false);
    text = blank_matches(text, url_pattern(), true);
    std::u32string out;
    bool pending_space = false;
    for (char32_t cp : utf8::decode(text)) {
        if (!kept_char(cp)) continue;
        if (utf8::is_space(cp)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(U' ');
        pending_space = false;
        out.push_back(cp);
    }
    return utf8::encode(out);
}

std::unordered_set<std::string> default_abbreviations() {
    return {"tel", "nr", "np", "ul", "al", "godz", "tzw", "tj", "ok", "prof", "dr", "mgr", "inż", "św", "ws", "wg"};
}

std::vector<std::string> split_sentences(std::string_view text, const std::unordered_set<std::string>& abbreviations) {
    auto cps = utf8::decode(text);
    std::vector<std::string> out;
    std::size_t start = 0;
    auto emit = [&](std::size_t end) {
        auto sentence = trim_spaces(std::u32string_view(cps).substr(start, end - start));
        if (!sentence.empty()) out.push_back(utf8::encode(sentence));
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        char32_t c = cps[i];
        if (c != U'.' && c != U'!' && c != U'?') continue;
        if (c == U'.' && !abbreviations.empty()) {
            std::size_t w = i;
            while (w > start && utf8::is_letter(cps[w - 1])) --w;
            if (w < i && (w == start || !is_word_char(cps[w - 1])) &&
                abbreviations.count(utf8::encode(utf8::to_lower(cps.substr(w, i - w))))) {
                continue;
            }
        }
        std::size_t j = i + 1;
        if (j >= cps.size() || !utf8::is_space(cps[j])) continue;
        while (j < cps.size() && utf8::is_space(cps[j])) ++j;
        if (j < cps.size() && (utf8::is_upper(cps[j]) || utf8::is_digit(cps[j]))) {
            emit(i + 1);
            start = j;
            i = j - 1;
        }
    }
    emit(cps.size());
    return out;
}

std::vector<std::string> lemmatize(std::string_view text, const PrepConfig& config) {
    std::vector<std::string> out;
    for (const auto& word : utf8::words(utf8::decode(text))) {
        auto surface = utf8::encode(utf8::to_lower(word));
        auto it = config.lemmas.find(surface);
        out.push_back(it == config.lemmas.end() ? std::move(surface) : it->second);
    }
    return out;
}

std::string remove_personal_info(std::string_view text, const PrepConfig& config) {
    auto sentences = split_sentences(text, config.abbreviations);
    std::string out;
    bool dropped = false;
    for (const auto& sentence : sentences) {
        auto tokens = surface_and_lemmas(sentence, config);
        if (hits_any(tokens, {&config.first_names, &config.surnames, &config.contact_words})) {
            dropped = true;
            continue;
        }
        if (!out.empty()) out.push_back(' ');
        out += sentence;
    }
    return dropped ? out : std::string(text);
}

std::string strip_boilerplate_phrases(std::string_view text, const PrepConfig& config) {
    auto t = utf8::decode(text);
    std::vector<std::u32string> phrases;
    phrases.reserve(config.boilerplate_phrases.size());
    for (const auto& p : config.boilerplate_phrases) phrases.push_back(utf8::decode(p));

    bool changed = true;
    bool touched = false;
    while (changed && !t.empty()) {
        changed = false;
        auto lower = utf8::to_lower(t);
        for (const auto& phrase : phrases) {
            if (phrase.size() > lower.size() || lower.compare(0, phrase.size(), phrase) != 0) continue;
            if (phrase.size() < lower.size() && is_word_char(lower[phrase.size()]) && is_word_char(phrase.back())) {
                continue;
            }
            std::size_t cut = phrase.size();
            while (cut < t.size() && is_leading_junk(t[cut])) ++cut;
            t.erase(0, cut);
            changed = true;
            break;
        }
        if (changed) {
            touched = true;
            continue;
        }
        std::size_t core_end = lower.size();
        while (core_end > 0 && is_phrase_tail(lower[core_end - 1])) --core_end;
        for (const auto& phrase : phrases) {
            if (phrase.size() > core_end) continue;
            std::size_t start = core_end - phrase.size();
            if (lower.compare(start, phrase.size(), phrase) != 0) continue;
            if (start > 0 && is_word_char(lower[start - 1]) && is_word_char(phrase.front())) continue;
            std::size_t cut = start;
            while (cut > 0 && is_trailing_junk(t[cut - 1])) --cut;
            t.erase(cut);
            changed = true;
            touched = true;
            break;
        }
    }
    return touched ? utf8::encode(trim_spaces(t)) : std::string(text);
}

std::string strip_leading_numbering(std::string_view question) {
    std::string text(question);
    std::smatch m;
    if (std::regex_search(text, m, numbering_pattern())) return text.substr(static_cast<std::size_t>(m.length(0)));
    return text;
}

bool is_image_question(std::string_view question, const PrepConfig& config) {
    return hits_any(surface_and_lemmas(question, config), {&config.image_words});
}

std::optional<QaPair> preprocess_pair(const QaPair& pair, const PrepConfig& config) {
    auto applies = [&](const std::set<std::string>& sources) { return sources.empty() || sources.count(pair.source); };
    const bool strip_numbers = applies(config.numbering_sources);
    auto clean = [&](const std::string& text, bool question) {
        auto t = normalize_text(text);
        t = remove_personal_info(t, config);
        t = strip_boilerplate_phrases(t, config);
        if (question && strip_numbers) t = strip_leading_numbering(t);
        return t;
    };
    QaPair out{pair.question, pair.answer, pair.source};
    // Each step only deletes text, so iterating to a fixpoint terminates and
    // makes the pipeline idempotent (e.g. numbering that hid a greeting).
    while (true) {
        auto q = clean(out.question, true);
        auto a = clean(out.answer, false);
        if (q == out.question && a == out.answer) break;
        out.question = std::move(q);
        out.answer = std::move(a);
    }
    if (applies(config.image_filter_sources) && is_image_question(out.question, config)) return std::nullopt;
    std::size_t min_answer =
        config.low_quality_sources.count(pair.source) ? config.low_quality_min_answer_chars : config.min_answer_chars;
    if (utf8::length(out.question) < config.min_question_chars) return std::nullopt;
    if (utf8::length(out.answer) < min_answer) return std::nullopt;
    return out;
}

PrepStats preprocess_file(const std::filesystem::path& input, const PrepConfig& config,
                          const std::filesystem::path& output) {
    std::vector<QaPair> pairs;
    io::for_each_line(input, [&](std::string_view line, std::size_t number) {
        if (trim_ascii(line).empty()) return;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(input.string(), number, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object() || !record.contains("question") || !record.contains("answer") ||
            !record["question"].is_string() || !record["answer"].is_string()) {
            throw ParseError(input.string(), number, "expected string fields \"question\" and \"answer\"");
        }
        pairs.push_back({record["question"].get<std::string>(), record["answer"].get<std::string>(),
                         record.value("source", std::string())});
    });
    PrepStats stats;
    stats.read = pairs.size();
    auto out = io::open_out(output);
    for (const auto& pair : pairs) {
        auto cleaned = preprocess_pair(pair, config);
        if (!cleaned) continue;
        ++stats.kept;
        nlohmann::ordered_json record{{"question", cleaned->question}, {"answer", cleaned->answer}, {"source", cleaned->source}};
        out << record.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
    }
    if (!out) throw IoError("write failed: " + output.string());
    return stats;
}

}  // namespace hybridir::textprep
