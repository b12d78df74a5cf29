#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace conceptscope;
using testutil::read_file;
using testutil::scratch;

namespace {

SyntheticSpec small_spec(Drift drift) {
    SyntheticSpec s;
    s.drift = drift;
    s.years = 8;
    s.baseline_years = 3;
    s.docs_per_year = 60;
    s.baseline_vocab_size = 300;
    s.new_per_year = 20;
    s.concepts_per_doc = 10;
    s.dimension = 64;
    s.seed = 5;
    return s;
}

// Mean over each year's new concepts of the max cosine to every concept introduced earlier.
std::map<Year, double> measured_max_similarity(const SyntheticCorpus& c) {
    std::map<Year, std::pair<double, int>> acc;
    for (ConceptId x = 0; x < c.vectors.size(); ++x) {
        const Year y = c.first_year[x];
        if (y <= c.schedule.front().year - 1) continue;
        double best = -1;
        for (ConceptId p = 0; p < c.vectors.size(); ++p)
            if (c.first_year[p] < y) best = std::max(best, cosine_similarity(x, p, c.vectors));
        acc[y].first += best;
        ++acc[y].second;
    }
    std::map<Year, double> out;
    for (auto& [y, v] : acc) out[y] = v.first / v.second;
    return out;
}

}  // namespace

TEST(SyntheticSchedule, StationaryIsConstant) {
    auto spec = small_spec(Drift::none);
    const auto s = synthetic_schedule(spec);
    ASSERT_EQ(s.size(), 8u);
    for (const auto& e : s) {
        EXPECT_EQ(e.expected_max_similarity, s.front().expected_max_similarity);
        EXPECT_EQ(e.centroid_weight, s.front().centroid_weight);
    }
    EXPECT_EQ(drift_from_string("stationary"), Drift::none);
}

TEST(SyntheticSchedule, ConvergingRisesFromStartToEnd) {
    SyntheticSpec spec;
    const auto s = synthetic_schedule(spec);
    ASSERT_EQ(s.size(), 20u);
    EXPECT_EQ(s.front().year, 1981);
    EXPECT_DOUBLE_EQ(s.front().expected_max_similarity, 0.3);
    EXPECT_DOUBLE_EQ(s.back().expected_max_similarity, 0.8);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GT(s[i].expected_max_similarity, s[i - 1].expected_max_similarity);
    spec.drift = Drift::diverging;
    EXPECT_DOUBLE_EQ(synthetic_schedule(spec).front().expected_max_similarity, 0.8);
}

TEST(GenerateSynthetic, MeasuredSimilarityTracksSchedule) {
    SyntheticSpec spec;  // 20 converging years, 0.3 -> 0.8
    spec.docs_per_year = 200;
    const auto c = generate_synthetic(spec);
    const auto measured = measured_max_similarity(c);
    ASSERT_EQ(measured.size(), c.schedule.size());
    for (const auto& e : c.schedule) EXPECT_NEAR(measured.at(e.year), e.expected_max_similarity, 0.05) << e.year;
}

TEST(GenerateSynthetic, SameSeedGivesByteIdenticalFiles) {
    const auto spec = small_spec(Drift::converging);
    const auto a = write_synthetic(spec, generate_synthetic(spec), scratch("gen_a"));
    const auto b = write_synthetic(spec, generate_synthetic(spec), scratch("gen_b"));
    EXPECT_EQ(read_file(a.corpus), read_file(b.corpus));
    EXPECT_EQ(read_file(a.vectors), read_file(b.vectors));
    EXPECT_EQ(read_file(a.truth), read_file(b.truth));
    auto other = spec;
    other.seed = 6;
    const auto c = write_synthetic(other, generate_synthetic(other), scratch("gen_c"));
    EXPECT_NE(read_file(a.corpus), read_file(c.corpus));
}

TEST(GenerateSynthetic, TextReproducesGroundTruthFirstYears) {
    const auto spec = small_spec(Drift::converging);
    const auto c = generate_synthetic(spec);
    EXPECT_EQ(c.documents.size(), spec.docs_per_year * (spec.years + spec.baseline_years));
    const auto concepts = extract_all(c.documents, c.vectors.vocabulary());
    const auto fa = first_appearance_years(concepts, c.vectors.size());
    for (ConceptId i = 0; i < c.vectors.size(); ++i) {
        ASSERT_TRUE(fa.year[i]) << c.vectors.term(i);
        EXPECT_EQ(*fa.year[i], c.first_year[i]) << c.vectors.term(i);
    }
    const auto t = build_timeline(fa, c.vectors.vocabulary(), spec.baseline_end(), spec.analysis_end());
    EXPECT_EQ(t.baseline().size(), spec.baseline_vocab_size);
    for (Year y : t.analysis_years()) EXPECT_EQ(t.new_concepts(y).size(), spec.new_per_year);
}

TEST(GenerateSynthetic, TermsSurviveTokenizingUnchanged) {
    const auto c = generate_synthetic(small_spec(Drift::none));
    bool any_bigram = false;
    for (const auto& e : c.vectors.vocabulary().entries()) {
        const auto s = text::lemmatized_sentences(e.term);
        ASSERT_EQ(s.size(), 1u);
        std::string joined;
        for (const auto& t : s[0].tokens) joined += (joined.empty() ? "" : " ") + t;
        EXPECT_EQ(joined, e.term);
        any_bigram = any_bigram || e.gram_length == 2;
    }
    EXPECT_TRUE(any_bigram);
}

TEST(GenerateSynthetic, VectorsAreUnitLength) {
    const auto c = generate_synthetic(small_spec(Drift::diverging));
    for (ConceptId i = 0; i < c.vectors.size(); ++i) EXPECT_NEAR(1.0 / c.vectors.inverse_norm(i), 1.0, 1e-6);
}

TEST(GenerateSynthetic, TruthSidecarContents) {
    const auto spec = small_spec(Drift::none);
    const auto files = write_synthetic(spec, generate_synthetic(spec), scratch("truth"));
    const auto truth = nlohmann::json::parse(read_file(files.truth));
    EXPECT_EQ(truth["drift"], "none");
    EXPECT_EQ(truth["baseline_end"], spec.baseline_end());
    EXPECT_EQ(truth["schedule"].size(), 8u);
    EXPECT_EQ(truth["first_year"].size(), spec.baseline_vocab_size + 8 * spec.new_per_year);
}

TEST(SyntheticSpec, ValidationRejectsImpossibleShapes) {
    auto spec = small_spec(Drift::none);
    spec.years = 1;
    EXPECT_THROW(generate_synthetic(spec), InvalidArgument);
    spec = small_spec(Drift::none);
    spec.baseline_vocab_size = 100000;
    EXPECT_THROW(generate_synthetic(spec), InvalidArgument);
    spec = small_spec(Drift::none);
    spec.sim_end = 1.0;
    EXPECT_THROW(generate_synthetic(spec), InvalidArgument);
    EXPECT_THROW(drift_from_string("sideways"), InvalidArgument);
}
