#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "conceptscope/common.hpp"
#include "conceptscope/vocabulary.hpp"

namespace conceptscope {

/// Backing memory for an embedding matrix: owned floats or a mapped file region.
class VectorStorage {
public:
    virtual ~VectorStorage() = default;
    virtual std::span<const float> data() const = 0;
};

class OwnedStorage final : public VectorStorage {
public:
    explicit OwnedStorage(std::vector<float> values) : values_(std::move(values)) {}
    std::span<const float> data() const override { return values_; }

private:
    std::vector<float> values_;
};

/// Immutable |V| x d matrix of concept vectors; row index is the concept id.
///
/// Copies share the underlying storage, so a matrix can be passed by value and read
/// concurrently from any number of threads.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;

    EmbeddingMatrix(Vocabulary vocab, std::size_t dimension, std::vector<float> values)
        : EmbeddingMatrix(std::move(vocab), dimension, std::make_shared<OwnedStorage>(std::move(values))) {}

    EmbeddingMatrix(Vocabulary vocab, std::size_t dimension, std::shared_ptr<const VectorStorage> storage)
        : vocab_(std::make_shared<const Vocabulary>(std::move(vocab))), dimension_(dimension),
          storage_(std::move(storage)) {
        require(dimension_ >= 1, "embedding dimension must be positive");
        const auto values = storage_->data();
        if (values.size() != vocab_->size() * dimension_)
            throw DataError("embedding storage size does not match |V| x d");
        inv_norm_.resize(vocab_->size());
        unit_normalized_ = true;
        for (std::size_t r = 0; r < vocab_->size(); ++r) {
            double sq = 0.0;
            for (float v : row(static_cast<ConceptId>(r))) {
                if (!std::isfinite(v))
                    throw DataError("non-finite value in embedding row for '" + vocab_->term(static_cast<ConceptId>(r)) + "'");
                sq += static_cast<double>(v) * v;
            }
            const double norm = std::sqrt(sq);
            inv_norm_[r] = norm > 0.0 ? 1.0 / norm : 0.0;
            if (std::abs(norm - 1.0) > 1e-6) unit_normalized_ = false;
        }
    }

    std::size_t size() const { return vocab_ ? vocab_->size() : 0; }
    std::size_t dimension() const { return dimension_; }
    bool unit_normalized() const { return unit_normalized_; }
    const Vocabulary& vocabulary() const { return *vocab_; }
    const std::string& term(ConceptId id) const { return vocab_->term(id); }

    std::span<const float> row(ConceptId id) const {
        return storage_->data().subspan(static_cast<std::size_t>(id) * dimension_, dimension_);
    }
    std::span<const float> values() const { return storage_->data(); }

    /// 1/||row||, or 0 for a zero row.
    double inverse_norm(ConceptId id) const { return inv_norm_[id]; }

    void check_id(ConceptId id) const {
        if (id >= size()) throw InvalidArgument("concept id " + std::to_string(id) + " out of range");
    }

    /// Copy with every row scaled to unit length.
    EmbeddingMatrix normalized() const {
        std::vector<float> out(values().begin(), values().end());
        for (std::size_t r = 0; r < size(); ++r) {
            const double inv = inv_norm_[r];
            if (inv == 0.0) throw DataError("cannot normalize zero vector for '" + term(static_cast<ConceptId>(r)) + "'");
            for (std::size_t k = 0; k < dimension_; ++k) out[r * dimension_ + k] = static_cast<float>(out[r * dimension_ + k] * inv);
        }
        return EmbeddingMatrix(*vocab_, dimension_, std::move(out));
    }

private:
    std::shared_ptr<const Vocabulary> vocab_;
    std::size_t dimension_ = 0;
    std::shared_ptr<const VectorStorage> storage_;
    std::vector<double> inv_norm_;
    bool unit_normalized_ = false;
};

inline double dot(std::span<const float> a, std::span<const float> b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += static_cast<double>(a[k]) * b[k];
    return sum;
}

/// Cosine similarity w_ij, clamped to [-1, 1]. Evaluated in canonical (min, max) id order,
/// so cosine_similarity(a, b) == cosine_similarity(b, a) bit for bit.
inline double cosine_similarity(ConceptId a, ConceptId b, const EmbeddingMatrix& m) {
    m.check_id(a);
    m.check_id(b);
    if (a > b) std::swap(a, b);
    const double inv_a = m.inverse_norm(a);
    const double inv_b = m.inverse_norm(b);
    if (inv_a == 0.0 || inv_b == 0.0)
        throw DataError("cosine similarity undefined for zero vector ('" + m.term(inv_a == 0.0 ? a : b) + "')");
    const double c = dot(m.row(a), m.row(b)) * inv_a * inv_b;
    return std::clamp(c, -1.0, 1.0);
}

struct NearestPrior {
    ConceptId id = 0;
    double similarity = -1.0;
};

/// Exact maximum of cosine_similarity(x, p) over p in prior; ties go to the
/// lexicographically smallest term.
inline NearestPrior max_similarity_to_set(ConceptId x, std::span<const ConceptId> prior, const EmbeddingMatrix& m) {
    if (prior.empty()) throw InvalidArgument("max_similarity_to_set: prior set is empty");
    NearestPrior best;
    bool have = false;
    for (ConceptId p : prior) {
        if (p == x) throw InvalidArgument("max_similarity_to_set: concept is a member of its prior set");
        const double s = cosine_similarity(x, p, m);
        if (!have || s > best.similarity || (s == best.similarity && m.term(p) < m.term(best.id))) {
            best = {p, s};
            have = true;
        }
    }
    return best;
}

}  // namespace conceptscope
