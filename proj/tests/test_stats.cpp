#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace conceptscope;

namespace {

// sup |F_a - F_b| over every observed value, counting each CDF point directly.
double brute_ks(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    auto cdf = [](const std::vector<double>& s, double t) {
        std::size_t c = 0;
        for (double v : s) c += v <= t;
        return static_cast<double>(c) / static_cast<double>(s.size());
    };
    for (const auto* s : {&a, &b})
        for (double t : *s) d = std::max(d, std::abs(cdf(a, t) - cdf(b, t)));
    return d;
}

std::vector<double> fuzz_sample(Rng& rng, bool integer_valued) {
    std::vector<double> s(1 + rng.below(60));
    for (auto& v : s) v = integer_valued ? static_cast<double>(rng.below(10)) : rng.normal() + rng.uniform();
    return s;
}

}  // namespace

TEST(KolmogorovSurvival, ReferenceValues) {
    // scipy.special.kolmogorov
    EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-9);
    EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-9);
    EXPECT_NEAR(kolmogorov_survival(1.36), 0.049485876755377876, 1e-9);
    EXPECT_NEAR(kolmogorov_survival(2.0), 0.0006709252557796953, 1e-12);
    EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(KolmogorovSurvival, ContinuousAcrossSeriesSwitch) {
    EXPECT_NEAR(kolmogorov_survival(1.18 - 1e-9), kolmogorov_survival(1.18 + 1e-9), 1e-8);
}

TEST(KsTwoSample, IdenticalSamples) {
    const std::vector<double> a{1, 2, 3};
    const auto r = ks_two_sample(a, a);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
}

TEST(KsTwoSample, DisjointSupports) {
    const std::vector<double> a{0, 1, 2}, b{10, 11, 12};
    EXPECT_EQ(ks_two_sample(a, b).statistic, 1.0);
}

TEST(KsTwoSample, ShiftedByOne) {
    const std::vector<double> a{1, 2, 3, 4}, b{2, 3, 4, 5};
    const auto r = ks_two_sample(a, b);
    EXPECT_EQ(r.statistic, 0.25);
    EXPECT_EQ(r.statistic, brute_ks(a, b));
    EXPECT_NEAR(r.p_value, kolmogorov_survival(std::sqrt(2.0) * 0.25), 1e-15);
    EXPECT_EQ(r.n1, 4u);
    EXPECT_EQ(r.n2, 4u);
}

TEST(KsTwoSample, MatchesBruteForceOnFuzzedPairs) {
    Rng rng(606);
    for (int trial = 0; trial < 1000; ++trial) {
        const bool ties = trial % 2 == 0;
        const auto a = fuzz_sample(rng, ties), b = fuzz_sample(rng, ties);
        const auto r = ks_two_sample(a, b);
        ASSERT_NEAR(r.statistic, brute_ks(a, b), 1e-12) << "trial " << trial;
        ASSERT_GE(r.p_value, 0.0);
        ASSERT_LE(r.p_value, 1.0);
        ASSERT_EQ(r.statistic, ks_two_sample(b, a).statistic);
    }
}

TEST(KsTwoSample, InvariantUnderMonotoneTransform) {
    Rng rng(7);
    auto a = fuzz_sample(rng, false), b = fuzz_sample(rng, false);
    const double d = ks_two_sample(a, b).statistic;
    for (auto* s : {&a, &b})
        for (auto& v : *s) v = std::exp(3 * v);
    EXPECT_EQ(ks_two_sample(a, b).statistic, d);
}

TEST(KsTwoSample, FarSeparatedSamplesAreSignificant) {
    Rng rng(1);
    std::vector<double> a(100), b(100);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = 10 + rng.normal();
    const auto r = ks_two_sample(a, b);
    EXPECT_EQ(r.statistic, 1.0);
    EXPECT_LT(r.p_value, 0.05);
    EXPECT_NEAR(r.p_value, kolmogorov_survival(std::sqrt(50.0)), 1e-15);
}

TEST(KsTwoSample, EmptySampleIsAnError) {
    const std::vector<double> a{1}, none;
    EXPECT_THROW(ks_two_sample(a, none), InvalidArgument);
}

TEST(PoolPeriods, FiveYearsOfHundredBecomeFiveHundred) {
    std::map<Year, std::vector<double>> yearly;
    for (Year y = 1981; y <= 1985; ++y) yearly[y] = std::vector<double>(100, y);
    const auto pooled = pool_periods(yearly, 5);
    ASSERT_EQ(pooled.size(), 1u);
    EXPECT_EQ(pooled[0].first, "1981-1985");
    EXPECT_EQ(pooled[0].second.size(), 500u);
}

TEST(PoolPeriods, TrailingPartialPeriodKeepsItsOwnLabel) {
    std::map<Year, std::vector<double>> yearly;
    for (Year y = 2006; y <= 2016; ++y) yearly[y] = {double(y)};
    const auto pooled = pool_periods(yearly, 5);
    ASSERT_EQ(pooled.size(), 3u);
    EXPECT_EQ(pooled[0].first, "2006-2010");
    EXPECT_EQ(pooled[1].first, "2011-2015");
    EXPECT_EQ(pooled[2].first, "2016");
    EXPECT_EQ(pooled[2].second, std::vector<double>{2016});
}

TEST(KsMatrix, SharedSampleIsNeverSignificant) {
    const std::vector<double> s{0.1, 0.5, 0.2, 0.9};
    const auto m = ks_matrix({{"a", s}, {"b", s}, {"c", s}});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_EQ(m.at(i, j).statistic, 0.0);
            EXPECT_FALSE(m.significant(i, j));
        }
}

TEST(KsMatrix, SymmetricWithSeparatedGroup) {
    Rng rng(3);
    LabeledSamples samples;
    for (int k = 0; k < 4; ++k) {
        std::vector<double> v(100);
        for (auto& x : v) x = (k == 3 ? 10.0 : 0.0) + rng.normal();
        samples.emplace_back("s" + std::to_string(k), v);
    }
    const auto m = ks_matrix(samples, 0.05);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_EQ(m.at(i, j).statistic, m.at(j, i).statistic);
            EXPECT_EQ(m.at(i, j).p_value, m.at(j, i).p_value);
        }
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(m.significant(i, 3));
}

TEST(KsMatrix, NeedsTwoSamples) { EXPECT_THROW(ks_matrix({{"a", {1.0}}}), InvalidArgument); }

TEST(KsMatrix, CsvWriters) {
    const auto m = ks_matrix({{"x", {0, 1, 2}}, {"y", {10, 11, 12}}});
    std::ostringstream ks, sig;
    write_ks_matrix_csv(ks, m);
    write_significance_csv(sig, m);
    EXPECT_EQ(sig.str(), ",x,y\r\nx,0,0\r\ny,0,0\r\n");  // p = Q(sqrt(1.5)) = 0.10
    EXPECT_EQ(ks.str().substr(0, 7), ",x,y\r\nx");
    EXPECT_NE(ks.str().find("1:"), std::string::npos);
}

TEST(Spearman, MonotoneAndTies) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{2, 4, 8, 16, 32}), 1.0);
    EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{5, 4, 3, 2, 1}), -1.0);
    // ranks of y with ties: 1.5 1.5 3 4 5 -> rho = 0.974679...
    EXPECT_NEAR(spearman(x, std::vector<double>{1, 1, 2, 3, 4}), 0.9746794344808963, 1e-12);
    EXPECT_EQ(spearman(x, std::vector<double>{7, 7, 7, 7, 7}), 0.0);
    EXPECT_THROW(spearman(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
}
