#include <gtest/gtest.h>

#include "hybridir/corpus.hpp"
#include "hybridir/error.hpp"
#include "hybridir/run.hpp"
#include "support.hpp"

using namespace hybridir;
using testing_support::TempDir;
using testing_support::write_file;

TEST(LoadCorpus, ReadsRecordsInFileOrder) {
    TempDir dir;
    auto path = write_file(dir / "corpus.jsonl",
                           "{\"_id\": \"d2\", \"title\": \"T\", \"text\": \"beta\"}\n"
                           "{\"_id\": \"d1\", \"text\": \"alpha\"}\n"
                           "{\"_id\": \"d3\", \"title\": \"\", \"text\": \"gamma\"}\n");
    auto corpus = load_corpus(path);
    ASSERT_EQ(corpus.size(), 3u);
    EXPECT_EQ(corpus[0].doc_id, "d2");
    EXPECT_EQ(corpus[1].doc_id, "d1");
    EXPECT_EQ(corpus[2].doc_id, "d3");
    ASSERT_TRUE(corpus[0].title.has_value());
    EXPECT_EQ(*corpus[0].title, "T");
    EXPECT_FALSE(corpus[1].title.has_value());
    ASSERT_NE(corpus.find("d1"), nullptr);
    EXPECT_EQ(corpus.find("d1")->text, "alpha");
    EXPECT_EQ(corpus.find("nope"), nullptr);
}

TEST(LoadCorpus, EmptyFileGivesEmptyStore) {
    TempDir dir;
    auto corpus = load_corpus(write_file(dir / "c.jsonl", ""));
    EXPECT_TRUE(corpus.empty());
}

TEST(LoadCorpus, DuplicateIdNamesIdAndLine) {
    TempDir dir;
    auto path = write_file(dir / "c.jsonl",
                           "{\"_id\": \"d1\", \"text\": \"a\"}\n"
                           "{\"_id\": \"d2\", \"text\": \"b\"}\n"
                           "{\"_id\": \"d3\", \"text\": \"c\"}\n"
                           "{\"_id\": \"d1\", \"text\": \"d\"}\n");
    try {
        load_corpus(path);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("\"d1\""), std::string::npos) << msg;
        EXPECT_NE(msg.find("4"), std::string::npos) << msg;
    }
}

TEST(LoadCorpus, MalformedLineReportsLineNumber) {
    TempDir dir;
    auto path = write_file(dir / "c.jsonl", "{\"_id\": \"d1\", \"text\": \"a\"}\n{not json\n");
    try {
        load_corpus(path);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(LoadCorpus, EmptyTextNeedsTitle) {
    TempDir dir;
    EXPECT_THROW(load_corpus(write_file(dir / "c.jsonl", "{\"_id\": \"d1\", \"text\": \"\"}\n")), ValidationError);
    auto ok = load_corpus(write_file(dir / "c2.jsonl", "{\"_id\": \"d1\", \"title\": \"t\", \"text\": \"\"}\n"));
    EXPECT_EQ(ok.size(), 1u);
}

TEST(LoadQueries, CountsAndRejectsBlankText) {
    TempDir dir;
    auto qs = load_queries(write_file(dir / "q.jsonl", "{\"_id\": \"q1\", \"text\": \"a\"}\n{\"_id\": \"q2\", \"text\": \"b\"}\n"));
    EXPECT_EQ(qs.size(), 2u);
    EXPECT_THROW(load_queries(write_file(dir / "q2.jsonl", "{\"_id\": \"q1\", \"text\": \"\"}\n")), ValidationError);
}

TEST(LoadQueries, PolishDiacriticsRoundTripByteForByte) {
    TempDir dir;
    const std::string text = "Zażółć gęślą jaźń — ĄĆĘŁŃÓŚŹŻ";
    auto qs = load_queries(write_file(dir / "q.jsonl", "{\"_id\": \"q1\", \"text\": \"" + text + "\"}\n"));
    ASSERT_EQ(qs.size(), 1u);
    EXPECT_EQ(qs[0].text, text);
}

TEST(LoadQrels, ParsesGradesAndSkipsHeader) {
    TempDir dir;
    auto plain = load_qrels(write_file(dir / "a.tsv", "q1\td1\t1\n"));
    ASSERT_NE(plain.find("q1"), nullptr);
    EXPECT_EQ(plain.find("q1")->at("d1"), 1);

    auto with_header = load_qrels(write_file(dir / "b.tsv", "query-id\tcorpus-id\tscore\nq1\td1\t2\nq1\td2\t0\n"));
    EXPECT_EQ(with_header.query_count(), 1u);
    EXPECT_EQ(with_header.judgment_count(), 2u);
    EXPECT_EQ(with_header.find("q1")->at("d1"), 2);
}

TEST(LoadQrels, RejectsBadGrades) {
    TempDir dir;
    EXPECT_THROW(load_qrels(write_file(dir / "a.tsv", "q1\td1\t-1\n")), Error);
    EXPECT_THROW(load_qrels(write_file(dir / "b.tsv", "q1\td1\t1\nq1\td2\t1.5\n")), ParseError);
    EXPECT_THROW(load_qrels(write_file(dir / "c.tsv", "q1\td1\n")), ParseError);
    EXPECT_THROW(load_qrels(write_file(dir / "d.tsv", "q1\td1\t1\nq1\td1\t0\n")), Error);
}

TEST(LoadQrels, IdsAreOpaqueStrings) {
    TempDir dir;
    auto qrels = load_qrels(write_file(dir / "a.tsv", "01\td1\t1\n1\td1\t0\n"));
    EXPECT_EQ(qrels.query_count(), 2u);
    EXPECT_EQ(qrels.find("01")->at("d1"), 1);
    EXPECT_EQ(qrels.find("1")->at("d1"), 0);
}

namespace {

struct Triple {
    CorpusStore corpus;
    QuerySet queries;
    QrelSet qrels;
};

Triple consistent() {
    Triple t;
    t.corpus = CorpusStore::from_records({{"d1", std::nullopt, "a"}, {"d2", std::nullopt, "b"}});
    t.queries = QuerySet::from_records({{"q1", "x"}, {"q2", "y"}});
    t.qrels.add("q1", "d1", 1);
    t.qrels.add("q2", "d2", 1);
    return t;
}

}  // namespace

TEST(ValidateDataset, ConsistentTripleIsClean) {
    auto t = consistent();
    auto r = validate_dataset(t.corpus, t.queries, t.qrels);
    EXPECT_EQ(r.missing_docs, 0u);
    EXPECT_EQ(r.queries_without_judgments, 0u);
    EXPECT_TRUE(r.duplicate_ids.empty());
    EXPECT_TRUE(r.clean());
}

TEST(ValidateDataset, CountsMissingDocsAndUnjudgedQueries) {
    auto t = consistent();
    t.qrels.add("q1", "dX", 1);
    EXPECT_EQ(validate_dataset(t.corpus, t.queries, t.qrels).missing_docs, 1u);

    auto u = consistent();
    u.queries = QuerySet::from_records({{"q1", "x"}, {"q2", "y"}, {"q9", "z"}});
    EXPECT_EQ(validate_dataset(u.corpus, u.queries, u.qrels).queries_without_judgments, 1u);
}

// Lookup of every judged doc succeeds exactly when the report says no docs
// are missing.
TEST(ValidateDataset, MissingDocsMatchesLookupFailures) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<CorpusRecord> docs;
        int n_docs = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n_docs; ++i) docs.push_back({"d" + std::to_string(i), std::nullopt, "t"});
        auto corpus = CorpusStore::from_records(docs);
        QrelSet qrels;
        for (int j = 0; j < 4; ++j) qrels.add("q1", "d" + std::to_string(rng() % 9) + "_" + std::to_string(j), 1);
        QrelSet plain;
        for (int j = 0; j < 4; ++j) {
            std::string doc = "d" + std::to_string(rng() % 8);
            if (!plain.find("q1") || !plain.find("q1")->count(doc)) plain.add("q1", doc, 1);
        }
        auto queries = QuerySet::from_records({{"q1", "x"}});
        bool all_found = true;
        for (const auto& [doc, g] : *plain.find("q1")) all_found = all_found && corpus.contains(doc);
        EXPECT_EQ(validate_dataset(corpus, queries, plain).missing_docs == 0, all_found);
        EXPECT_GT(validate_dataset(corpus, queries, qrels).missing_docs, 0u);
    }
}

TEST(ValidateDatasetFiles, CollectsDuplicateIds) {
    TempDir dir;
    auto c = write_file(dir / "c.jsonl", "{\"_id\":\"d1\",\"text\":\"a\"}\n{\"_id\":\"d1\",\"text\":\"b\"}\n");
    auto q = write_file(dir / "q.jsonl", "{\"_id\":\"q1\",\"text\":\"a\"}\n");
    auto r = write_file(dir / "r.tsv", "q1\td1\t1\n");
    auto report = validate_dataset_files(c, q, r);
    ASSERT_EQ(report.duplicate_ids.size(), 1u);
    EXPECT_EQ(report.duplicate_ids[0], "d1");
    EXPECT_EQ(report.missing_docs, 0u);
}

TEST(LoadCorpus, DeterministicAcrossLoads) {
    TempDir dir;
    auto path = write_file(dir / "c.jsonl", "{\"_id\":\"b\",\"text\":\"1\"}\n\n{\"_id\":\"a\",\"text\":\"2\"}\n");
    auto x = load_corpus(path);
    auto y = load_corpus(path);
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].doc_id, y[i].doc_id);
}

TEST(TrecRun, SaveLoadRoundTrip) {
    TempDir dir;
    RetrievalRun run;
    run.tag = "sys";
    run.queries["q1"] = {{"d2", 0.1 + 0.2}, {"d1", 0.1 + 0.2}, {"d3", -1e-300}};
    std::sort(run.queries["q1"].begin(), run.queries["q1"].end(), ranks_before);
    run.queries["q2"] = {{"x", 5.0}};
    save_trec_run(run, dir / "r.trec");
    auto back = load_trec_run(dir / "r.trec");
    EXPECT_EQ(back.tag, "sys");
    EXPECT_EQ(back.queries, run.queries);
    EXPECT_EQ(back.queries["q1"][0].doc_id, "d1");
}

TEST(TrecRun, RejectsDuplicatesAndShortLines) {
    TempDir dir;
    EXPECT_THROW(load_trec_run(write_file(dir / "a", "q1 Q0 d1 1 1.0 t\nq1 Q0 d1 2 0.5 t\n")), ParseError);
    EXPECT_THROW(load_trec_run(write_file(dir / "b", "q1 Q0 d1 1 1.0\n")), ParseError);
}

TEST(SelectTopK, CanonicalOrder) {
    RankedList docs{{"c", 1.0}, {"a", 2.0}, {"b", 1.0}, {"d", 0.5}};
    select_top_k(docs, 3);
    ASSERT_EQ(docs.size(), 3u);
    EXPECT_EQ(docs[0].doc_id, "a");
    EXPECT_EQ(docs[1].doc_id, "b");
    EXPECT_EQ(docs[2].doc_id, "c");
}
