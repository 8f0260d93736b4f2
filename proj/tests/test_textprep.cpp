#include <gtest/gtest.h>

#include <regex>

#include "hybridir/error.hpp"
#include "hybridir/textprep.hpp"
#include "support.hpp"

using namespace hybridir::textprep;
using testing_support::read_file;
using testing_support::source_dir;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

PrepConfig small_config() {
    PrepConfig c;
    c.first_names = {"jan", "anna"};
    c.surnames = {"kowalski"};
    c.contact_words = {"tel", "mail"};
    c.boilerplate_phrases = {"dzień dobry", "witam", "pozdrawiam", "z góry dziękuję"};
    c.image_words = {"zdjęcie", "obrazek"};
    c.lemmas = {{"kowalskiego", "kowalski"}, {"zdjęciu", "zdjęcie"}, {"obrazku", "obrazek"}};
    c.finalize();
    return c;
}

const std::string kLongAnswer =
    "To jest dostatecznie długa odpowiedź, która ma zdecydowanie więcej niż pięćdziesiąt znaków.";

}  // namespace

TEST(NormalizeText, RemovesEmailAndCollapsesSpaces) {
    EXPECT_EQ(normalize_text("Napisz  do nas:  jan@x.pl  dziś"), "Napisz do nas: dziś");
    EXPECT_EQ(normalize_text("abc"), "abc");
    EXPECT_EQ(normalize_text("a\t\n b"), "a b");
}

TEST(NormalizeText, RemovesWebAddressesKeepingSentencePunctuation) {
    EXPECT_EQ(normalize_text("Zobacz www.example.pl/a?b=1 teraz"), "Zobacz teraz");
    EXPECT_EQ(normalize_text("Strona: https://x.pl/y."), "Strona: .");
    EXPECT_EQ(normalize_text("HTTP://X.PL koniec"), "koniec");
}

TEST(NormalizeText, DropsSpecialCharactersOnly) {
    EXPECT_EQ(normalize_text("Cena: 5% (ok) - \"tak\" 'nie'; już?!"), "Cena: 5% (ok) - \"tak\" 'nie'; już?!");
    EXPECT_EQ(normalize_text("a★b ☺ c#d @e"), "ab cd e");
    EXPECT_EQ(normalize_text("  \x01 x \x7f "), "x");
    EXPECT_EQ(normalize_text(""), "");
}

TEST(NormalizeText, OutputHasNoEmail) {
    const std::regex email(R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+\.[A-Za-z]{2,})");
    for (const char* raw : {"a@b.pl", "x a.b@c.d.com, y", "mail:jan.kowalski@firma.com.pl.", "@@a@b.co"}) {
        EXPECT_FALSE(std::regex_search(normalize_text(raw), email)) << raw;
    }
}

TEST(RemovePersonalInfo, DropsSentencesWithNamesOrContacts) {
    auto c = small_config();
    EXPECT_EQ(remove_personal_info("To jest porada. Jan Kowalski, tel 123.", c), "To jest porada.");
    EXPECT_EQ(remove_personal_info("Nic tu nie ma. Zupełnie nic.", c), "Nic tu nie ma. Zupełnie nic.");
    EXPECT_EQ(remove_personal_info("Jan odpowie.", c), "");
}

TEST(RemovePersonalInfo, MatchesThroughLemmas) {
    auto c = small_config();
    EXPECT_EQ(remove_personal_info("Pytaj o Kowalskiego. Reszta zostaje.", c), "Reszta zostaje.");
}

TEST(RemovePersonalInfo, AbbreviationDoesNotEndSentence) {
    auto c = small_config();
    EXPECT_EQ(remove_personal_info("Dzwoń śmiało. Tel. 600 700 800. Reszta zostaje.", c), "Dzwoń śmiało. Reszta zostaje.");
}

TEST(SplitSentences, SplitsBeforeUppercaseOrDigit) {
    auto s = split_sentences("Ala ma kota. Kot ma Alę! 3 psy? tak. nie");
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0], "Ala ma kota.");
    EXPECT_EQ(s[1], "Kot ma Alę!");
    EXPECT_EQ(s[2], "3 psy? tak. nie");
    EXPECT_EQ(split_sentences("Zażółć. Łódź.").size(), 2u);
}

TEST(StripBoilerplate, LeadingTrailingAndStacked) {
    auto c = small_config();
    EXPECT_EQ(strip_boilerplate_phrases("Dzień dobry, mam pytanie", c), "mam pytanie");
    EXPECT_EQ(strip_boilerplate_phrases("Mówię dzień dobry sąsiadom", c), "Mówię dzień dobry sąsiadom");
    EXPECT_EQ(strip_boilerplate_phrases("Pozdrawiam", c), "");
    EXPECT_EQ(strip_boilerplate_phrases("Dzień dobry, witam! Treść pytania. Z góry dziękuję, pozdrawiam.", c),
              "Treść pytania.");
}

TEST(StripBoilerplate, RespectsWordBoundaries) {
    auto c = small_config();
    EXPECT_EQ(strip_boilerplate_phrases("Witamina C pomaga", c), "Witamina C pomaga");
    EXPECT_EQ(strip_boilerplate_phrases("Słowo przywitam", c), "Słowo przywitam");
}

TEST(StripLeadingNumbering, Patterns) {
    EXPECT_EQ(strip_leading_numbering("3. Co to jest atom?"), "Co to jest atom?");
    EXPECT_EQ(strip_leading_numbering("Co to jest atom?"), "Co to jest atom?");
    EXPECT_EQ(strip_leading_numbering("12) Dlaczego?"), "Dlaczego?");
    EXPECT_EQ(strip_leading_numbering("2020 rok był trudny"), "2020 rok był trudny");
    EXPECT_EQ(strip_leading_numbering("1. 2. Dwa"), "2. Dwa");
}

TEST(IsImageQuestion, DictionaryAndLemmaHits) {
    auto c = small_config();
    EXPECT_TRUE(is_image_question("Co przedstawia zdjęcie?", c));
    EXPECT_TRUE(is_image_question("Co jest na obrazku?", c));
    EXPECT_FALSE(is_image_question("Ile wynosi 2+2?", c));
    EXPECT_FALSE(is_image_question("", c));
}

TEST(PreprocessPair, LengthFilters) {
    auto c = small_config();
    EXPECT_FALSE(preprocess_pair({"Dziewięć?", kLongAnswer, "s"}, c).has_value());
    EXPECT_TRUE(preprocess_pair({"Dziesięć??", kLongAnswer, "s"}, c).has_value());
    EXPECT_FALSE(preprocess_pair({"Całkiem poprawne pytanie?", "Za krótko.", "s"}, c).has_value());
}

TEST(PreprocessPair, CleanPairUnchanged) {
    auto c = small_config();
    QaPair pair{"Jak działa silnik spalinowy w samochodzie?", std::string(), "s"};
    for (int i = 0; i < 6; ++i) pair.answer += "Silnik zamienia energię chemiczną paliwa na ruch tłoków. ";
    pair.answer.pop_back();
    auto out = preprocess_pair(pair, c);
    ASSERT_TRUE(out.has_value());
    EXPECT_EQ(*out, pair);
}

TEST(PreprocessPair, AnswerShrinksBelowMinimumAfterAnonymization) {
    auto c = small_config();
    QaPair pair{"Kto naprawi mi kran w kuchni?",
                "Polecam fachowca. Jan Kowalski naprawia krany szybko, solidnie i w rozsądnej cenie, tel 123 456 789.",
                "s"};
    EXPECT_FALSE(preprocess_pair(pair, c).has_value());
}

TEST(PreprocessPair, LowQualitySourcesNeedLongerAnswers) {
    auto c = small_config();
    c.low_quality_sources = {"abczdrowie"};
    QaPair pair{"Czy to poważna choroba?", kLongAnswer, "abczdrowie"};
    EXPECT_FALSE(preprocess_pair(pair, c).has_value());
    pair.source = "inne";
    EXPECT_TRUE(preprocess_pair(pair, c).has_value());
}

TEST(PreprocessPair, SourceScopedImageFilterAndNumbering) {
    auto c = small_config();
    c.image_filter_sources = {"techpedia"};
    c.numbering_sources = {"egzaminy"};
    QaPair image{"Co widać na tym zdjęciu?", kLongAnswer, "techpedia"};
    EXPECT_FALSE(preprocess_pair(image, c).has_value());
    image.source = "inne";
    EXPECT_TRUE(preprocess_pair(image, c).has_value());

    QaPair numbered{"5. Ile to kosztuje?", kLongAnswer, "egzaminy"};
    EXPECT_EQ(preprocess_pair(numbered, c)->question, "Ile to kosztuje?");
    numbered.source = "inne";
    EXPECT_EQ(preprocess_pair(numbered, c)->question, "5. Ile to kosztuje?");
}

TEST(PreprocessPair, Idempotent) {
    auto c = small_config();
    std::vector<QaPair> pairs = {
        {"Dzień dobry. 4. Jaka jest stolica Polski?", "Witam! " + kLongAnswer + " Pozdrawiam", "s"},
        {"  7)  Witam!!  Pytanie   o www.x.pl podatki?", kLongAnswer + " Jan napisze.", "s"},
        {"Czy a@b.pl to dobry adres do kontaktu?", kLongAnswer, "s"},
    };
    for (const auto& p : pairs) {
        auto once = preprocess_pair(p, c);
        ASSERT_TRUE(once.has_value()) << p.question;
        auto twice = preprocess_pair(*once, c);
        ASSERT_TRUE(twice.has_value());
        EXPECT_EQ(*once, *twice);
    }
}

TEST(PrepConfig, FinalizeLowercasesAndRejectsZeroMinimum) {
    PrepConfig c;
    c.first_names = {"JAN"};
    c.boilerplate_phrases = {"Dzień Dobry", "Dzień Dobry Panie"};
    c.finalize();
    EXPECT_TRUE(c.first_names.count("jan"));
    EXPECT_EQ(c.boilerplate_phrases.front(), "dzień dobry panie");
    c.min_answer_chars = 0;
    EXPECT_THROW(c.finalize(), hybridir::InvalidArgument);
}

TEST(LoadConfig, FilesAndInlineLists) {
    TempDir dir;
    write_file(dir / "names.txt", "# comment\nJan\n\nAnna\n");
    write_file(dir / "lemmas.tsv", "Kowalskiego\tkowalski\n");
    auto path = write_file(dir / "prep.json",
                           R"({"first_names": "names.txt", "surnames": ["Kowalski"], "lemmas": "lemmas.tsv",
                               "min_question_chars": 12, "low_quality_sources": ["x"]})");
    auto c = load_config(path);
    EXPECT_TRUE(c.first_names.count("jan"));
    EXPECT_TRUE(c.first_names.count("anna"));
    EXPECT_TRUE(c.surnames.count("kowalski"));
    EXPECT_EQ(c.lemmas.at("kowalskiego"), "kowalski");
    EXPECT_EQ(c.min_question_chars, 12u);
    EXPECT_TRUE(c.low_quality_sources.count("x"));
}

TEST(PreprocessFile, ShippedDictionariesProcessFixture) {
    TempDir dir;
    auto config = load_config(source_dir() / "data/prep/prep.json");
    auto stats = preprocess_file(source_dir() / "tests/data/prep/input.jsonl", config, dir / "out.jsonl");
    EXPECT_EQ(stats.read, 30u);
    EXPECT_GT(stats.kept, 0u);
    EXPECT_LT(stats.kept, stats.read);
}

TEST(PreprocessFile, MalformedInputNamesLine) {
    TempDir dir;
    auto in = write_file(dir / "in.jsonl", "{\"question\":\"a\",\"answer\":\"b\"}\n{\"question\": 3}\n");
    try {
        preprocess_file(in, small_config(), dir / "out.jsonl");
        FAIL();
    } catch (const hybridir::ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(PreprocessFile, GoldenOutputAndIdempotence) {
    TempDir dir;
    auto fixtures = source_dir() / "tests/data/prep";
    auto config = load_config(fixtures / "config.json");
    auto stats = preprocess_file(fixtures / "input.jsonl", config, dir / "out.jsonl");
    EXPECT_EQ(stats.read, 30u);
    EXPECT_EQ(read_file(dir / "out.jsonl"), read_file(fixtures / "expected.jsonl"));
    auto again = preprocess_file(dir / "out.jsonl", config, dir / "again.jsonl");
    EXPECT_EQ(again.kept, again.read);
    EXPECT_EQ(read_file(dir / "again.jsonl"), read_file(dir / "out.jsonl"));
}
