#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hybridir::textprep {

/// Dictionaries and thresholds for cleaning question-answer pairs. All
/// dictionary entries are stored lowercase.
std::unordered_set<std::string> default_abbreviations();

struct PrepConfig {
    std::unordered_set<std::string> first_names;
    std::unordered_set<std::string> surnames;
    std::unordered_set<std::string> contact_words;
    std::vector<std::string> boilerplate_phrases;
    std::unordered_set<std::string> image_words;
    /// Words whose trailing period does not end a sentence ("tel.", "np.").
    std::unordered_set<std::string> abbreviations = default_abbreviations();
    std::unordered_map<std::string, std::string> lemmas;

    std::size_t min_question_chars = 10;
    std::size_t min_answer_chars = 50;
    /// Sources whose answers must reach `low_quality_min_answer_chars`.
    std::set<std::string> low_quality_sources;
    std::size_t low_quality_min_answer_chars = 200;
    /// Sources where numbering removal and the image filter apply; an empty
    /// set applies them to every source.
    std::set<std::string> numbering_sources;
    std::set<std::string> image_filter_sources;

    /// Lowercases every entry and checks the thresholds; throws
    /// InvalidArgument on a zero minimum length.
    void finalize();
};

/// Reads a JSON config. Dictionary entries name one-entry-per-line UTF-8
/// files (lemmas: `surface<TAB>lemma`), resolved relative to the config's
/// directory. Keys: first_names, surnames, contact_words, boilerplate_phrases,
/// image_words, abbreviations, lemmas, min_question_chars, min_answer_chars,
/// low_quality_sources, low_quality_min_answer_chars, numbering_sources,
/// image_filter_sources.
PrepConfig load_config(const std::filesystem::path& path);

struct QaPair {
    std::string question;
    std::string answer;
    std::string source;

    friend bool operator==(const QaPair&, const QaPair&) = default;
};

/// Punctuation that survives normalization, besides letters, digits and
/// whitespace.
inline constexpr std::u32string_view kKeptPunctuation = U".,:;?!()-\"'%";

std::string normalize_text(std::string_view raw);
std::string remove_personal_info(std::string_view text, const PrepConfig& config);
std::string strip_boilerplate_phrases(std::string_view text, const PrepConfig& config);
std::string strip_leading_numbering(std::string_view question);
bool is_image_question(std::string_view question, const PrepConfig& config);

/// Splits on `.`, `!` or `?` followed by whitespace and an uppercase letter
/// or digit. A period right after a word listed in `abbreviations`
/// (lowercase, without the dot) does not end a sentence. Sentences keep
/// their terminator and are trimmed.
std::vector<std::string> split_sentences(std::string_view text,
                                         const std::unordered_set<std::string>& abbreviations = {});

/// Lowercased, lemmatized word tokens.
std::vector<std::string> lemmatize(std::string_view text, const PrepConfig& config);

/// Full cleaning chain; absent when the pair is filtered out.
std::optional<QaPair> preprocess_pair(const QaPair& pair, const PrepConfig& config);

struct PrepStats {
    std::size_t read = 0;
    std::size_t kept = 0;
};

/// JSONL in/out with fields question, answer, source.
PrepStats preprocess_file(const std::filesystem::path& input, const PrepConfig& config,
                          const std::filesystem::path& output);

}  // namespace hybridir::textprep
