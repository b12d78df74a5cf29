#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace conceptscope;

namespace {
FirstAppearance years(std::initializer_list<std::optional<Year>> ys) { return FirstAppearance{std::vector(ys)}; }

DocumentConcepts doc(Year y, std::vector<std::pair<ConceptId, std::uint32_t>> c) { return {"d", y, std::move(c)}; }
}  // namespace

TEST(FirstAppearance, MinimumAndSingleton) {
    const std::vector<DocumentConcepts> docs{doc(1983, {{0, 1}}), doc(1981, {{0, 2}}), doc(1990, {{1, 1}})};
    const auto fa = first_appearance_years(docs, 3);
    EXPECT_EQ(fa.year[0], 1981);
    EXPECT_EQ(fa.year[1], 1990);
    EXPECT_FALSE(fa.year[2]);
    EXPECT_EQ(fa.unobserved(), std::vector<ConceptId>{2});
}

TEST(FirstAppearance, OrderOfDocumentsDoesNotMatter) {
    Rng rng(4);
    std::vector<DocumentConcepts> docs;
    for (int i = 0; i < 300; ++i)
        docs.push_back(doc(1970 + static_cast<Year>(rng.below(40)), {{static_cast<ConceptId>(rng.below(50)), 1}}));
    auto sorted = docs;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.year < b.year; });
    std::vector<DocumentConcepts> shuffled = docs;
    std::reverse(shuffled.begin(), shuffled.end());
    EXPECT_EQ(first_appearance_years(sorted, 50).year, first_appearance_years(shuffled, 50).year);
}

TEST(BuildTimeline, AllBaselineMeansNoNewConcepts) {
    FirstAppearance fa{std::vector<std::optional<Year>>(10, 1978)};
    const auto t = build_timeline(fa, testutil::numbered_vocabulary(10), 1980, 1985);
    EXPECT_EQ(t.baseline().size(), 10u);
    for (Year y : t.analysis_years()) {
        EXPECT_TRUE(t.new_concepts(y).empty());
        EXPECT_EQ(t.new_share(y), 0.0);
    }
}

TEST(BuildTimeline, HandPartition) {
    const auto t = build_timeline(years({1979, 1981, 1981, 1982}), testutil::numbered_vocabulary(4), 1980, 1982);
    EXPECT_EQ(t.baseline().size(), 1u);
    EXPECT_EQ(t.new_concepts(1981).size(), 2u);
    EXPECT_EQ(t.new_concepts(1982).size(), 1u);
    EXPECT_EQ(t.cumulative(1982).size(), 4u);
    EXPECT_EQ(t.prior(1982).size(), 3u);
    EXPECT_EQ(t.analysis_start(), 1981);
}

TEST(BuildTimeline, EmptyBaselineIsAnError) {
    EXPECT_THROW(build_timeline(years({1981, 1982}), testutil::numbered_vocabulary(2), 1980, 1982), DataError);
}

TEST(BuildTimeline, BaselineMustPrecedeAnalysisEnd) {
    EXPECT_THROW(build_timeline(years({1979}), testutil::numbered_vocabulary(1), 1980, 1980), Error);
}

TEST(BuildTimeline, LateAndUnobservedConceptsAreSetAside) {
    const auto t = build_timeline(years({1979, 1995, std::nullopt, 1981}), testutil::numbered_vocabulary(4), 1980, 1985);
    EXPECT_EQ(t.excluded().size(), 1u);
    EXPECT_EQ(t.excluded()[0], 1u);
    EXPECT_EQ(t.unobserved().size(), 1u);
    EXPECT_EQ(t.cumulative(1985).size(), 2u);
}

TEST(BuildTimeline, YearOutsideAnalysisRangeIsRejected) {
    const auto t = build_timeline(years({1979, 1981}), testutil::numbered_vocabulary(2), 1980, 1982);
    EXPECT_THROW(t.new_concepts(1980), InvalidArgument);
    EXPECT_THROW(t.new_concepts(1983), InvalidArgument);
}

TEST(BuildTimeline, PartitionInvariantsOnRandomData) {
    Rng rng(12);
    std::vector<std::optional<Year>> ys;
    for (int i = 0; i < 500; ++i) ys.push_back(1976 + static_cast<Year>(rng.below(20)));
    const auto t = build_timeline(FirstAppearance{ys}, testutil::numbered_vocabulary(500), 1980, 1990);
    std::size_t previous = t.baseline().size();
    std::set<ConceptId> seen(t.baseline().begin(), t.baseline().end());
    for (Year y : t.analysis_years()) {
        const auto fresh = t.new_concepts(y);
        EXPECT_EQ(t.prior(y).size(), previous);
        EXPECT_EQ(t.cumulative(y).size(), previous + fresh.size());
        for (ConceptId c : fresh) {
            EXPECT_EQ(*ys[c], y);
            EXPECT_TRUE(seen.insert(c).second);
        }
        previous = t.cumulative(y).size();
    }
}

TEST(NewShare, TwoOfThirtySeven) {
    std::vector<std::optional<Year>> ys(35, 1980);
    ys.push_back(1981);
    ys.push_back(1981);
    const auto t = build_timeline(FirstAppearance{ys}, testutil::numbered_vocabulary(37), 1980, 1981);
    EXPECT_NEAR(t.new_share(1981), 0.0541, 1e-4);
    EXPECT_DOUBLE_EQ(t.new_share(1981), 2.0 / 37.0);
}

TEST(BaselineCoverage, CountsOccurrences) {
    const auto t = build_timeline(years({1979, 1979, 1982}), testutil::numbered_vocabulary(3), 1980, 1985);
    const std::vector<DocumentConcepts> docs{doc(1979, {{0, 2}}), doc(1982, {{1, 1}, {2, 1}})};
    EXPECT_DOUBLE_EQ(baseline_coverage(t, docs), 0.75);
    const std::vector<DocumentConcepts> only_baseline{doc(1979, {{0, 2}, {1, 3}})};
    EXPECT_DOUBLE_EQ(baseline_coverage(t, only_baseline), 1.0);
}

TEST(TimelineTsv, RoundTripAndUnknownTerms) {
    const auto vocab = testutil::numbered_vocabulary(3);
    const auto fa = years({1979, std::nullopt, 1984});
    std::stringstream io;
    write_timeline_tsv(io, fa, vocab);
    io << "zzz\t1990\n";
    const auto back = read_timeline_tsv(io, vocab);
    EXPECT_EQ(back.first.year, fa.year);
    EXPECT_EQ(back.unknown_terms, 1u);
}

TEST(TimelineTsv, MalformedLineIsAnError) {
    std::istringstream in("c0000\t1979\textra\n");
    EXPECT_THROW(read_timeline_tsv(in, testutil::numbered_vocabulary(1)), DataError);
}
