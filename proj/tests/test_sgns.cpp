#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace conceptscope;

namespace {

// Relative error between the analytic gradient and central differences of the loss,
// taken over the full parameter vector (center, context, negatives).
double gradient_relative_error(Rng& rng, std::size_t d, std::size_t k) {
    std::vector<std::vector<double>> params(2 + k, std::vector<double>(d));
    for (auto& p : params)
        for (auto& x : p) x = rng.normal() * 0.5;
    auto eval = [&] {
        std::vector<std::span<const double>> negs(params.begin() + 2, params.end());
        return sgns::loss<double>(params[0], params[1], negs);
    };
    std::vector<std::vector<double>> grads(2 + k, std::vector<double>(d));
    {
        std::vector<std::span<const double>> negs(params.begin() + 2, params.end());
        std::vector<std::span<double>> gnegs(grads.begin() + 2, grads.end());
        sgns::gradient<double>(params[0], params[1], negs, grads[0], grads[1], gnegs);
    }
    const double h = 1e-5;
    double diff = 0, na = 0, nn = 0;
    for (std::size_t p = 0; p < params.size(); ++p)
        for (std::size_t i = 0; i < d; ++i) {
            const double saved = params[p][i];
            params[p][i] = saved + h;
            const double up = eval();
            params[p][i] = saved - h;
            const double down = eval();
            params[p][i] = saved;
            const double numeric = (up - down) / (2 * h);
            diff += (numeric - grads[p][i]) * (numeric - grads[p][i]);
            na += grads[p][i] * grads[p][i];
            nn += numeric * numeric;
        }
    return std::sqrt(diff) / std::max(std::sqrt(std::max(na, nn)), 1e-300);
}

std::vector<std::vector<ConceptId>> two_cluster_corpus(std::size_t sentences, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<ConceptId>> out;
    for (std::size_t s = 0; s < sentences; ++s) {
        const ConceptId base = (s % 2) ? 5 : 0;
        std::vector<ConceptId> sentence;
        for (int i = 0; i < 10; ++i) sentence.push_back(base + static_cast<ConceptId>(rng.below(5)));
        out.push_back(std::move(sentence));
    }
    return out;
}

}  // namespace

TEST(SgnsGradient, MatchesFiniteDifferences) {
    Rng rng(2024);
    for (int point = 0; point < 100; ++point) EXPECT_LT(gradient_relative_error(rng, 10, 5), 1e-4);
}

TEST(SgnsLoss, PositivePairWithNoNegativesIsNegLogSigmoid) {
    const std::vector<double> c{1.0, 0.0}, w{2.0, 0.0};
    EXPECT_NEAR(sgns::loss<double>(c, w, {}), std::log1p(std::exp(-2.0)), 1e-15);
}

TEST(Sigmoid, StableAtExtremes) {
    EXPECT_EQ(sgns::sigmoid(1000.0), 1.0);
    EXPECT_EQ(sgns::sigmoid(-1000.0), 0.0);
    EXPECT_TRUE(std::isfinite(sgns::neg_log_sigmoid(-1000.0)));
    EXPECT_NEAR(sgns::neg_log_sigmoid(-1000.0), 1000.0, 1e-9);
}

TEST(TrainSgns, ZeroEpochsLeavesInitialization) {
    const auto vocab = testutil::numbered_vocabulary(10);
    TrainConfig cfg;
    cfg.dimension = 8;
    cfg.epochs = 0;
    const auto m = train_sgns(two_cluster_corpus(20, 1), vocab, cfg);
    const auto init = initial_embeddings(10, 8, cfg.seed);
    ASSERT_EQ(m.values().size(), init.size());
    for (std::size_t i = 0; i < init.size(); ++i) EXPECT_EQ(m.values()[i], init[i]);
}

TEST(TrainSgns, TwoClustersSeparate) {
    const auto vocab = testutil::numbered_vocabulary(10);
    TrainConfig cfg;
    cfg.dimension = 16;
    cfg.epochs = 5;
    const auto m = train_sgns(two_cluster_corpus(1000, 7), vocab, cfg);
    double intra = 0, inter = 0;
    int ni = 0, nx = 0;
    for (ConceptId a = 0; a < 10; ++a)
        for (ConceptId b = a + 1; b < 10; ++b) {
            const double s = cosine_similarity(a, b, m);
            if ((a < 5) == (b < 5)) intra += s, ++ni;
            else inter += s, ++nx;
        }
    EXPECT_GE(intra / ni - inter / nx, 0.1);
}

TEST(TrainSgns, DeterministicModeIsReproducible) {
    const auto vocab = testutil::numbered_vocabulary(10);
    TrainConfig cfg;
    cfg.dimension = 8;
    cfg.epochs = 2;
    const auto corpus = two_cluster_corpus(200, 3);
    const auto a = train_sgns(corpus, vocab, cfg), b = train_sgns(corpus, vocab, cfg);
    EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST(TrainSgns, ThreadedModeProducesFiniteVectors) {
    const auto vocab = testutil::numbered_vocabulary(10);
    TrainConfig cfg;
    cfg.dimension = 8;
    cfg.deterministic = false;
    cfg.threads = 4;
    const auto m = train_sgns(two_cluster_corpus(400, 3), vocab, cfg);
    for (float v : m.values()) ASSERT_TRUE(std::isfinite(v));
}

TEST(TrainSgns, EmptyStreamAndUnknownIdsAreErrors) {
    const auto vocab = testutil::numbered_vocabulary(3);
    TrainConfig cfg;
    cfg.dimension = 4;
    EXPECT_THROW(train_sgns({}, vocab, cfg), DataError);
    EXPECT_THROW(train_sgns({{}, {}}, vocab, cfg), DataError);
    EXPECT_THROW(train_sgns({{0, 1, 3}}, vocab, cfg), DataError);
}

TEST(TrainSgns, InvalidConfigIsRejected) {
    TrainConfig cfg;
    cfg.lr_end = cfg.lr_start;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.dimension = 1;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(NegativeSampler, FollowsThreeQuarterPower) {
    const std::vector<std::uint64_t> counts{1, 16, 0};
    const sgns::NegativeSampler sampler(counts);
    Rng rng(8);
    std::vector<int> hits(3, 0);
    const int draws = 90000;
    for (int i = 0; i < draws; ++i) ++hits[sampler.draw(rng)];
    // weights 1 : 8 : 0
    EXPECT_EQ(hits[2], 0);
    EXPECT_NEAR(hits[0] / double(draws), 1.0 / 9.0, 0.01);
}
