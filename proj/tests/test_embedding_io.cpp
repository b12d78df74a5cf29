#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace conceptscope;
using testutil::scratch;
using testutil::write_file;

namespace {
void expect_same(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    ASSERT_EQ(a.size(), b.size());
    ASSERT_EQ(a.dimension(), b.dimension());
    for (ConceptId i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.term(i), b.term(i));
        for (std::size_t k = 0; k < a.dimension(); ++k) EXPECT_NEAR(a.row(i)[k], b.row(i)[k], 1e-12);
    }
}
}  // namespace

TEST(LoadEmbeddings, TsvThreeByFour) {
    const auto dir = scratch("tsv34");
    write_file(dir / "v.tsv", "laser\t1\t0\t0\t0\nneural network\t0\t1\t0\t0\nbeam\t0.5\t0.5\t-0.5\t0.25\n");
    const auto m = load_embeddings(dir / "v.tsv", EmbeddingFormat::tsv);
    EXPECT_EQ(m.size(), 3u);
    EXPECT_EQ(m.dimension(), 4u);
    EXPECT_EQ(m.term(1), "neural network");
    EXPECT_EQ(m.vocabulary().entry(1).gram_length, 2);
    EXPECT_FLOAT_EQ(m.row(2)[3], 0.25f);
}

TEST(LoadEmbeddings, RaggedRowsNameTheLine) {
    const auto dir = scratch("ragged");
    write_file(dir / "v.tsv", "a\t1\t2\t3\t4\nb\t1\t2\t3\t4\t5\n");
    try {
        load_embeddings(dir / "v.tsv", EmbeddingFormat::tsv);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(LoadEmbeddings, DuplicateTermsAreFatal) {
    const auto dir = scratch("dup");
    write_file(dir / "v.tsv", "a\t1\t2\na\t3\t4\n");
    EXPECT_THROW(load_embeddings(dir / "v.tsv", EmbeddingFormat::tsv), DataError);
}

TEST(LoadEmbeddings, MissingFileIsIoError) {
    EXPECT_THROW(load_embeddings("/nonexistent/v.tsv", EmbeddingFormat::tsv), IoError);
}

TEST(SaveEmbeddings, TsvRoundTripIsExact) {
    const auto dir = scratch("rt_tsv");
    const auto m = testutil::random_unit_matrix(25, 7, 3);
    save_embeddings(dir / "v.tsv", m, EmbeddingFormat::tsv);
    expect_same(m, load_embeddings(dir / "v.tsv", EmbeddingFormat::tsv));
}

TEST(SaveEmbeddings, BinaryRoundTripIsExactWithAndWithoutMapping) {
    const auto dir = scratch("rt_bin");
    const auto m = testutil::random_unit_matrix(25, 7, 4);
    save_embeddings(dir / "v.bin", m, EmbeddingFormat::binary);
    LoadOptions mapped;
    mapped.memory_map = true;
    expect_same(m, load_embeddings(dir / "v.bin", EmbeddingFormat::binary));
    expect_same(m, load_embeddings(dir / "v.bin", EmbeddingFormat::binary, mapped));
}

TEST(LoadEmbeddings, BadMagicIsRejected) {
    const auto dir = scratch("magic");
    write_file(dir / "v.bin", std::string(64, 'x'));
    EXPECT_THROW(load_embeddings(dir / "v.bin", EmbeddingFormat::binary), DataError);
}

TEST(LoadEmbeddings, NormalizeOptionGivesUnitRows) {
    const auto dir = scratch("norm");
    write_file(dir / "v.tsv", "a\t3\t4\nb\t0\t-2\n");
    LoadOptions opt;
    opt.normalize = true;
    const auto m = load_embeddings(dir / "v.tsv", EmbeddingFormat::tsv, opt);
    EXPECT_TRUE(m.unit_normalized());
    EXPECT_FLOAT_EQ(m.row(0)[1], 0.8f);
}

TEST(EmbeddingFormat, NamesAndGuessing) {
    EXPECT_EQ(embedding_format_from_string("tsv"), EmbeddingFormat::tsv);
    EXPECT_EQ(embedding_format_from_string("binary"), EmbeddingFormat::binary);
    EXPECT_THROW(embedding_format_from_string("npy"), InvalidArgument);
    EXPECT_EQ(guess_embedding_format("x.tsv"), EmbeddingFormat::tsv);
    EXPECT_EQ(guess_embedding_format("x.bin"), EmbeddingFormat::binary);
}
