#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "conceptscope/common.hpp"
#include "conceptscope/embedding.hpp"
#include "conceptscope/random.hpp"
#include "conceptscope/vocabulary.hpp"

namespace conceptscope {

struct TrainConfig {
    std::size_t dimension = 300;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    double lr_start = 0.025;
    double lr_end = 0.0001;
    std::uint64_t seed = 1;
    std::uint64_t min_count = 1;
    // Deterministic mode runs one thread with sequential updates. Fast mode runs `threads`
    // workers with unsynchronized (Hogwild-style) updates; its result is NOT reproducible.
    bool deterministic = true;
    unsigned threads = 1;

    void validate() const {
        require(dimension >= 2, "train: dimension must be >= 2");
        require(window >= 1, "train: window must be >= 1");
        require(negatives >= 1, "train: negatives must be >= 1");
        require(epochs >= 0, "train: epochs must be >= 0");
        require(lr_start > lr_end && lr_end > 0.0, "train: learning rates must satisfy start > end > 0");
    }
};

namespace sgns {

inline double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// -log(sigmoid(x)), stable for large |x|
inline double neg_log_sigmoid(double x) { return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

template <typename T>
double dot(std::span<const T> a, std::span<const T> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<double>(a[k]) * static_cast<double>(b[k]);
    return s;
}

/// SGNS loss for one (center, context) pair:
///   -log sigma(u_c . v_w) - sum_i log sigma(-u_{n_i} . v_w)
template <typename T>
double loss(std::span<const T> center, std::span<const T> context, std::span<const std::span<const T>> negatives) {
    double l = neg_log_sigmoid(dot(context, center));
    for (const auto& n : negatives) l += neg_log_sigmoid(-dot(n, center));
    return l;
}

/// Analytic gradient of loss() with respect to the center (input) vector, the context
/// (output) vector and each negative (output) vector. Outputs are overwritten.
template <typename T>
void gradient(std::span<const T> center, std::span<const T> context, std::span<const std::span<const T>> negatives,
              std::span<double> g_center, std::span<double> g_context, std::span<const std::span<double>> g_negatives) {
    const std::size_t d = center.size();
    const double pos = sigmoid(dot(context, center)) - 1.0;
    for (std::size_t k = 0; k < d; ++k) {
        g_center[k] = pos * context[k];
        g_context[k] = pos * center[k];
    }
    for (std::size_t i = 0; i < negatives.size(); ++i) {
        const double neg = sigmoid(dot(negatives[i], center));
        for (std::size_t k = 0; k < d; ++k) {
            g_center[k] += neg * negatives[i][k];
            g_negatives[i][k] = neg * center[k];
        }
    }
}

/// Cumulative unigram^0.75 distribution for negative sampling.
class NegativeSampler {
public:
    explicit NegativeSampler(std::span<const std::uint64_t> counts) {
        cumulative_.reserve(counts.size());
        double total = 0.0;
        for (auto c : counts) {
            total += std::pow(static_cast<double>(c), 0.75);
            cumulative_.push_back(total);
        }
        if (total <= 0.0) throw InvalidArgument("negative sampler: all counts are zero");
    }

    ConceptId draw(Rng& rng) const {
        const double u = rng.uniform() * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) --it;
        return static_cast<ConceptId>(it - cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
};

struct PlainAccess {
    static float load(const float& x) { return x; }
    static void store(float& x, float v) { x = v; }
};

struct RelaxedAccess {
    static float load(const float& x) { return std::atomic_ref<float>(const_cast<float&>(x)).load(std::memory_order_relaxed); }
    static void store(float& x, float v) { std::atomic_ref<float>(x).store(v, std::memory_order_relaxed); }
};

struct Workspace {
    explicit Workspace(std::size_t d, int k)
        : center(d), context(d), g_center(d), g_context(d), negatives(k, std::vector<double>(d)),
          g_negatives(k, std::vector<double>(d)) {}
    std::vector<double> center, context, g_center, g_context;
    std::vector<std::vector<double>> negatives, g_negatives;
    std::vector<ConceptId> negative_ids;
};

template <typename Access>
void load_row(std::span<const float> row, std::vector<double>& out) {
    for (std::size_t k = 0; k < row.size(); ++k) out[k] = Access::load(row[k]);
}

template <typename Access>
void apply(std::span<float> row, const std::vector<double>& grad, double lr) {
    for (std::size_t k = 0; k < row.size(); ++k)
        Access::store(row[k], static_cast<float>(Access::load(row[k]) - lr * grad[k]));
}

/// One SGD step on the loss of a single (center, context) pair.
template <typename Access>
void step(std::vector<float>& input, std::vector<float>& output, std::size_t d, ConceptId center, ConceptId context,
          const std::vector<ConceptId>& negative_ids, double lr, Workspace& ws) {
    auto in_row = [&](ConceptId id) { return std::span<float>(input).subspan(std::size_t(id) * d, d); };
    auto out_row = [&](ConceptId id) { return std::span<float>(output).subspan(std::size_t(id) * d, d); };

    load_row<Access>(in_row(center), ws.center);
    load_row<Access>(out_row(context), ws.context);
    const std::size_t k = negative_ids.size();
    std::vector<std::span<const double>> negs;
    std::vector<std::span<double>> gnegs;
    negs.reserve(k);
    gnegs.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        load_row<Access>(out_row(negative_ids[i]), ws.negatives[i]);
        negs.emplace_back(ws.negatives[i]);
        gnegs.emplace_back(ws.g_negatives[i]);
    }
    gradient<double>(ws.center, ws.context, negs, ws.g_center, ws.g_context, gnegs);
    apply<Access>(out_row(context), ws.g_context, lr);
    for (std::size_t i = 0; i < k; ++i) apply<Access>(out_row(negative_ids[i]), ws.g_negatives[i], lr);
    apply<Access>(in_row(center), ws.g_center, lr);
}

}  // namespace sgns

/// Seeded input-vector initialization: uniform in (-0.5/d, 0.5/d).
inline std::vector<float> initial_embeddings(std::size_t vocab_size, std::size_t dimension, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "sgns-init"));
    std::vector<float> values(vocab_size * dimension);
    for (auto& v : values) v = static_cast<float>((rng.uniform() - 0.5) / static_cast<double>(dimension));
    return values;
}

/// Trains skip-gram-with-negative-sampling embeddings over concept-id sentences and
/// returns the input-side vectors, one row per vocabulary concept.
inline EmbeddingMatrix train_sgns(const std::vector<std::vector<ConceptId>>& sentences, const Vocabulary& vocab,
                                  const TrainConfig& config) {
    config.validate();
    require(!vocab.empty(), "train: vocabulary is empty");
    const std::size_t d = config.dimension;
    const std::size_t V = vocab.size();

    std::vector<std::uint64_t> counts(V, 0);
    std::uint64_t total_tokens = 0;
    for (const auto& s : sentences)
        for (ConceptId id : s) {
            if (id >= V) throw DataError("train: concept id " + std::to_string(id) + " is not in the vocabulary");
            ++counts[id];
        }
    for (std::size_t i = 0; i < V; ++i)
        if (counts[i] < config.min_count) counts[i] = 0;
    for (auto c : counts) total_tokens += c;
    if (total_tokens == 0) throw DataError("train: sentence stream is empty");

    std::vector<float> input = initial_embeddings(V, d, config.seed);
    std::vector<float> output(V * d, 0.0f);
    const sgns::NegativeSampler sampler(counts);
    const double total_work = static_cast<double>(total_tokens) * config.epochs;

    auto run_shard = [&]<typename Access>(unsigned shard, unsigned shard_count, std::atomic<std::uint64_t>& processed) {
        Rng rng(derive_seed(config.seed, "sgns-train", 0, shard));
        sgns::Workspace ws(d, config.negatives);
        std::vector<ConceptId> negative_ids;
        std::vector<ConceptId> kept;
        for (int epoch = 0; epoch < config.epochs; ++epoch) {
            for (std::size_t si = shard; si < sentences.size(); si += shard_count) {
                kept.clear();
                for (ConceptId id : sentences[si])
                    if (counts[id] > 0) kept.push_back(id);
                const double progress = processed.load(std::memory_order_relaxed) / total_work;
                const double lr = std::max(config.lr_end, config.lr_start - (config.lr_start - config.lr_end) * progress);
                for (std::size_t i = 0; i < kept.size(); ++i) {
                    const int reach = config.window - static_cast<int>(rng.below(config.window));
                    const std::size_t lo = i >= std::size_t(reach) ? i - reach : 0;
                    const std::size_t hi = std::min(kept.size() - 1, i + reach);
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        const ConceptId context = kept[j];
                        negative_ids.clear();
                        for (int n = 0; n < config.negatives; ++n) {
                            const ConceptId neg = sampler.draw(rng);
                            if (neg != context) negative_ids.push_back(neg);
                        }
                        sgns::step<Access>(input, output, d, kept[i], context, negative_ids, lr, ws);
                    }
                }
                processed.fetch_add(kept.size(), std::memory_order_relaxed);
            }
        }
    };

    std::atomic<std::uint64_t> processed{0};
    if (config.deterministic || config.threads <= 1) {
        run_shard.template operator()<sgns::PlainAccess>(0, 1, processed);
    } else {
        std::vector<std::thread> workers;
        for (unsigned t = 0; t < config.threads; ++t)
            workers.emplace_back([&, t] { run_shard.template operator()<sgns::RelaxedAccess>(t, config.threads, processed); });
        for (auto& w : workers) w.join();
    }
    return EmbeddingMatrix(vocab, d, std::move(input));
}

}  // namespace conceptscope
