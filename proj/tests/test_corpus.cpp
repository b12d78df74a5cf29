#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace conceptscope;
using testutil::scratch;
using testutil::write_file;

TEST(Ingest, OneRecordRoundTrips) {
    const auto dir = scratch("one_record");
    write_file(dir / "c.jsonl", R"({"id":"p1","year":1981,"title":"Widget","abstract":"A widget."})" "\n");
    const auto r = ingest_documents(dir / "c.jsonl", CorpusFormat::jsonl);
    ASSERT_EQ(r.documents.size(), 1u);
    EXPECT_EQ(r.documents[0].id, "p1");
    EXPECT_EQ(r.documents[0].year, 1981);
    EXPECT_EQ(r.documents[0].title, "Widget");
    EXPECT_EQ(r.documents[0].abstract, "A widget.");
    EXPECT_EQ(r.report.skipped, 0u);
}

TEST(Ingest, EmptyFileIsEmptyStream) {
    const auto dir = scratch("empty");
    write_file(dir / "c.jsonl", "");
    const auto r = ingest_documents(dir / "c.jsonl", CorpusFormat::jsonl);
    EXPECT_TRUE(r.documents.empty());
    EXPECT_EQ(r.report.skipped, 0u);
    EXPECT_TRUE(r.report.diagnostics.empty());
}

TEST(Ingest, MissingYearIsSkippedWithDiagnostic) {
    const auto r = ingest_documents(std::filesystem::path(CONCEPTSCOPE_FIXTURES) / "mixed.jsonl", CorpusFormat::jsonl);
    EXPECT_EQ(r.documents.size(), 3u);
    EXPECT_EQ(r.report.accepted, 3u);
    EXPECT_EQ(r.report.skipped, 1u);
    ASSERT_EQ(r.report.diagnostics.size(), 1u);
    EXPECT_NE(r.report.diagnostics[0].find("3"), std::string::npos);
}

TEST(Ingest, UnreadableFileIsFatal) {
    EXPECT_THROW(ingest_documents("/nonexistent/corpus.jsonl", CorpusFormat::jsonl), IoError);
}

TEST(Ingest, CsvWithQuotedFieldsAndAnyColumnOrder) {
    const auto dir = scratch("csv");
    write_file(dir / "c.csv",
               "year,id,abstract,title\r\n"
               "1990,a,\"First, with comma.\",T1\r\n"
               "1991,b,\"Says \"\"hi\"\"\nover two lines.\",T2\r\n"
               ",c,No year.,T3\r\n");
    const auto r = ingest_documents(dir / "c.csv", CorpusFormat::csv);
    ASSERT_EQ(r.documents.size(), 2u);
    EXPECT_EQ(r.documents[0].abstract, "First, with comma.");
    EXPECT_EQ(r.documents[1].abstract, "Says \"hi\"\nover two lines.");
    EXPECT_EQ(r.documents[1].year, 1991);
    EXPECT_EQ(r.report.skipped, 1u);
}

TEST(Ingest, DuplicateIdsAndOutOfRangeYearsAreSkipped) {
    const auto dir = scratch("dups");
    write_file(dir / "c.jsonl",
               R"({"id":"a","year":1980,"title":"","abstract":""})" "\n"
               R"({"id":"a","year":1981,"title":"","abstract":""})" "\n"
               R"({"id":"b","year":1970,"title":"","abstract":""})" "\n"
               "not json\n");
    IngestOptions opt;
    opt.year_min = 1975;
    const auto r = ingest_documents(dir / "c.jsonl", CorpusFormat::jsonl, opt);
    ASSERT_EQ(r.documents.size(), 1u);
    EXPECT_EQ(r.documents[0].year, 1980);
    EXPECT_EQ(r.report.skipped, 3u);
}

TEST(Ingest, WrittenJsonlReadsBackIdentically) {
    const auto dir = scratch("roundtrip");
    std::vector<Document> docs{{"x1", 2001, "Title \"q\"", "Line one.\nLine two \xC3\xA9."}, {"x2", 2002, "", ""}};
    {
        std::ofstream out(dir / "d.jsonl", std::ios::binary);
        write_documents_jsonl(out, docs);
    }
    const auto r = ingest_documents(dir / "d.jsonl", CorpusFormat::jsonl);
    ASSERT_EQ(r.documents.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(r.documents[i].id, docs[i].id);
        EXPECT_EQ(r.documents[i].year, docs[i].year);
        EXPECT_EQ(r.documents[i].title, docs[i].title);
        EXPECT_EQ(r.documents[i].abstract, docs[i].abstract);
    }
}

TEST(CorpusFormat, NamesAndGuessing) {
    EXPECT_EQ(corpus_format_from_string("csv"), CorpusFormat::csv);
    EXPECT_EQ(corpus_format_from_string("jsonl"), CorpusFormat::jsonl);
    EXPECT_THROW(corpus_format_from_string("xml"), InvalidArgument);
    EXPECT_EQ(guess_corpus_format("a/b.csv"), CorpusFormat::csv);
    EXPECT_EQ(guess_corpus_format("a/b.jsonl"), CorpusFormat::jsonl);
}
