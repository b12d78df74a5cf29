#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <exception>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "conceptscope/common.hpp"
#include "conceptscope/embedding.hpp"
#include "conceptscope/random.hpp"
#include "conceptscope/timeline.hpp"
#include "conceptscope/vocabulary.hpp"

namespace conceptscope {

// ---------------------------------------------------------------------------------------------
// Pairwise similarity means
//
// For unit vectors x_i with S = sum_i x_i:   sum_{i<j} x_i . x_j = (|S|^2 - sum_i |x_i|^2) / 2
// and for two disjoint sets U, V:           sum_{u,v} u . v = S_U . S_V
// so both means cost O((|U|+|V|) d) instead of a pair loop.

namespace detail {

struct UnitSum {
    std::vector<double> sum;
    double self = 0.0;  // sum of squared norms of the normalized rows (each ~1)
};

inline UnitSum unit_sum(std::span<const ConceptId> ids, const EmbeddingMatrix& m) {
    UnitSum acc;
    acc.sum.assign(m.dimension(), 0.0);
    for (ConceptId id : ids) {
        m.check_id(id);
        const double inv = m.inverse_norm(id);
        if (inv == 0.0) throw DataError("similarity undefined for zero vector ('" + m.term(id) + "')");
        const auto row = m.row(id);
        for (std::size_t k = 0; k < row.size(); ++k) {
            const double x = row[k] * inv;
            acc.sum[k] += x;
            acc.self += x * x;
        }
    }
    return acc;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

}  // namespace detail

/// w_G: mean cosine similarity over all unordered pairs of the set (N >= 2).
inline double mean_similarity_all(std::span<const ConceptId> ids, const EmbeddingMatrix& m) {
    if (ids.size() < 2) throw InvalidArgument("mean_similarity_all: need at least 2 concepts");
    const auto acc = detail::unit_sum(ids, m);
    const double n = static_cast<double>(ids.size());
    return (detail::dot(acc.sum, acc.sum) - acc.self) / (n * (n - 1.0));
}

/// w_N: mean cosine similarity over the prior x new edges only; missing when `fresh` is empty.
inline MaybeReal mean_similarity_new_prior(std::span<const ConceptId> prior, std::span<const ConceptId> fresh,
                                           const EmbeddingMatrix& m) {
    if (prior.empty()) throw InvalidArgument("mean_similarity_new_prior: no prior concepts");
    if (fresh.empty()) return std::nullopt;
    const auto u = detail::unit_sum(prior, m);
    const auto v = detail::unit_sum(fresh, m);
    return detail::dot(u.sum, v.sum) / (static_cast<double>(prior.size()) * static_cast<double>(fresh.size()));
}

// ---------------------------------------------------------------------------------------------
// Information content

/// -log2 of the similarity clamped to [eps, 1]; 0 for a perfectly predictable concept.
inline double information_gain_bits(double max_similarity, double eps = 1e-6) {
    const double p = std::clamp(max_similarity, eps, 1.0);
    return std::max(0.0, -std::log2(p));
}

/// Delta IC of a new concept given its most similar prior concept, with P(p) = 1.
inline double delta_information_content(ConceptId x, std::span<const ConceptId> prior, const EmbeddingMatrix& m,
                                        double eps = 1e-6) {
    return information_gain_bits(max_similarity_to_set(x, prior, m).similarity, eps);
}

// ---------------------------------------------------------------------------------------------
// Stratified subgraph sampling

struct SubgraphSample {
    Year year = 0;
    std::vector<ConceptId> ids;
    std::vector<bool> new_flags;
    std::uint64_t seed = 0;
    // The cumulative set was not larger than n, so the whole set was used.
    bool full_set = false;

    std::size_t size() const { return ids.size(); }
    std::size_t new_count() const { return static_cast<std::size_t>(std::count(new_flags.begin(), new_flags.end(), true)); }

    std::vector<ConceptId> prior_ids() const { return select(false); }
    std::vector<ConceptId> new_ids() const { return select(true); }

private:
    std::vector<ConceptId> select(bool flag) const {
        std::vector<ConceptId> out;
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (new_flags[i] == flag) out.push_back(ids[i]);
        return out;
    }
};

/// round(n * new / cumulative), halves rounded up, in exact integer arithmetic.
inline std::size_t stratified_new_count(std::size_t n, std::size_t new_size, std::size_t cumulative_size) {
    if (cumulative_size == 0) return 0;
    const std::uint64_t num = 2ULL * n * new_size + cumulative_size;
    return std::min<std::size_t>(new_size, num / (2ULL * cumulative_size));
}

/// n concepts from cumulative(year) without replacement, with the new-concept share preserved:
/// round(n * new_share) drawn uniformly from new(year), the rest uniformly from the prior set.
inline SubgraphSample sample_subgraph(const ConceptTimeline& timeline, Year year, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "sample_subgraph: n must be positive");
    const auto cumulative = timeline.cumulative(year);
    const auto prior = timeline.prior(year);
    const auto fresh = timeline.new_concepts(year);

    SubgraphSample s;
    s.year = year;
    s.seed = seed;
    if (cumulative.size() <= n) {
        s.full_set = true;
        s.ids.assign(cumulative.begin(), cumulative.end());
        s.new_flags.assign(prior.size(), false);
        s.new_flags.resize(cumulative.size(), true);
        return s;
    }
    std::size_t k_new = stratified_new_count(n, fresh.size(), cumulative.size());
    std::size_t k_prior = n - k_new;
    if (k_prior > prior.size()) {
        k_prior = prior.size();
        k_new = n - k_prior;
    }
    Rng rng(seed);
    const auto pick_prior = sample_without_replacement(prior.size(), k_prior, rng);
    const auto pick_new = sample_without_replacement(fresh.size(), k_new, rng);
    s.ids.reserve(n);
    for (auto i : pick_prior) s.ids.push_back(prior[i]);
    for (auto i : pick_new) s.ids.push_back(fresh[i]);
    s.new_flags.assign(k_prior, false);
    s.new_flags.resize(n, true);
    return s;
}

inline double mean_similarity_all(const SubgraphSample& s, const EmbeddingMatrix& m) {
    return mean_similarity_all(s.ids, m);
}

inline MaybeReal mean_similarity_new_prior(const SubgraphSample& s, const EmbeddingMatrix& m) {
    return mean_similarity_new_prior(s.prior_ids(), s.new_ids(), m);
}

// ---------------------------------------------------------------------------------------------
// Yearly series

enum class Metric { w_G, w_N, delta_ic };

inline std::string metric_name(Metric metric) {
    switch (metric) {
        case Metric::w_G: return "w_G";
        case Metric::w_N: return "w_N";
        case Metric::delta_ic: return "dIC";
    }
    return "?";
}

inline Metric metric_from_string(const std::string& name) {
    if (name == "w_G") return Metric::w_G;
    if (name == "w_N") return Metric::w_N;
    if (name == "dIC" || name == "delta_ic") return Metric::delta_ic;
    throw InvalidArgument("unknown metric '" + name + "'");
}

struct MetricRecord {
    Year year = 0;
    MaybeReal mean;
    MaybeReal std;
    std::size_t n_samples = 0;  // 0 when the value is missing

    bool operator==(const MetricRecord&) const = default;
};

/// Per-year (mean, std, sample count) of one metric. Years strictly increase.
struct MetricSeries {
    std::string metric;
    std::vector<MetricRecord> records;

    bool operator==(const MetricSeries&) const = default;
};

/// Mean and population standard deviation.
inline MetricRecord summarize(Year year, std::span<const double> values) {
    MetricRecord r;
    r.year = year;
    r.n_samples = values.size();
    if (values.empty()) return r;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    r.mean = mean;
    r.std = std::sqrt(var / static_cast<double>(values.size()));
    return r;
}

struct SeriesOptions {
    std::size_t n = 1000;
    std::size_t n_samples = 100;
    double eps = 1e-6;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct YearlyMetric {
    MetricSeries series;
    /// Raw per-subgraph (w_G, w_N) or per-concept (dIC) values, the input to KS testing.
    std::map<Year, std::vector<double>> samples;
    /// Years where cumulative(year) held no more than n concepts.
    std::vector<Year> full_set_years;
};

namespace detail {

// Runs task(i) for i in [0, count) on up to `threads` workers. Each task writes only its own
// slot, so results do not depend on the thread count.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned t = 0; t < threads; ++t)
        workers.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Seed of the i-th subgraph of a year; shared by w_G and w_N so both see the same samples.
inline std::uint64_t subgraph_seed(std::uint64_t base, Year year, std::size_t index) {
    return derive_seed(base, "subgraph", year, index);
}

/// w_G / w_N: mean and std over n_samples stratified subgraphs of size n per analysis year.
/// dIC: mean and std over up to n new concepts of the year (sampled without replacement),
/// each scored against the full prior set.
inline YearlyMetric yearly_metric_series(const ConceptTimeline& timeline, const EmbeddingMatrix& m, Metric metric,
                                         const SeriesOptions& options) {
    require(options.n >= 2, "yearly_metric_series: n must be >= 2");
    require(options.n_samples >= 1, "yearly_metric_series: n_samples must be >= 1");
    const auto years = timeline.analysis_years();
    require(!years.empty(), "yearly_metric_series: analysis range is empty");

    YearlyMetric out;
    out.series.metric = metric_name(metric);

    if (metric == Metric::delta_ic) {
        struct Task {
            Year year;
            ConceptId id;
        };
        std::vector<Task> tasks;
        for (Year y : years) {
            const auto fresh = timeline.new_concepts(y);
            Rng rng(derive_seed(options.seed, "dIC", y));
            for (auto i : sample_without_replacement(fresh.size(), std::min(options.n, fresh.size()), rng))
                tasks.push_back({y, fresh[i]});
        }
        std::vector<double> bits(tasks.size());
        detail::parallel_for(tasks.size(), options.threads, [&](std::size_t i) {
            bits[i] = delta_information_content(tasks[i].id, timeline.prior(tasks[i].year), m, options.eps);
        });
        for (Year y : years) out.samples[y];
        for (std::size_t i = 0; i < tasks.size(); ++i) out.samples[tasks[i].year].push_back(bits[i]);
    } else {
        const std::size_t per_year = options.n_samples;
        std::vector<MaybeReal> values(years.size() * per_year);
        for (Year y : years)
            if (timeline.cumulative(y).size() <= options.n) out.full_set_years.push_back(y);
        detail::parallel_for(values.size(), options.threads, [&](std::size_t i) {
            const Year y = years[i / per_year];
            const auto sample = sample_subgraph(timeline, y, options.n, subgraph_seed(options.seed, y, i % per_year));
            values[i] = metric == Metric::w_G ? MaybeReal(mean_similarity_all(sample, m))
                                              : mean_similarity_new_prior(sample, m);
        });
        for (std::size_t yi = 0; yi < years.size(); ++yi) {
            auto& bucket = out.samples[years[yi]];
            for (std::size_t k = 0; k < per_year; ++k)
                if (const auto& v = values[yi * per_year + k]) bucket.push_back(*v);
        }
    }
    for (Year y : years) out.series.records.push_back(summarize(y, out.samples[y]));
    return out;
}

// ---------------------------------------------------------------------------------------------
// Corpus-level auxiliary statistics

struct GrowthRecord {
    Year year = 0;
    std::size_t new_count = 0;
    std::size_t cumulative = 0;
    double new_share = 0.0;
};

/// Cumulative concept count and new-concept share per analysis year.
inline std::vector<GrowthRecord> growth_series(const ConceptTimeline& timeline) {
    std::vector<GrowthRecord> out;
    for (Year y : timeline.analysis_years())
        out.push_back({y, timeline.new_concepts(y).size(), timeline.cumulative(y).size(), timeline.new_share(y)});
    return out;
}

struct PerDocumentRecord {
    Year year = 0;
    MaybeReal mean_new;    // distinct concepts first seen that year, per document
    MaybeReal mean_total;  // distinct concepts per document
    std::size_t documents = 0;
};

inline std::vector<PerDocumentRecord> new_concepts_per_document(std::span<const DocumentConcepts> docs,
                                                                const ConceptTimeline& timeline) {
    std::map<Year, std::pair<std::uint64_t, std::uint64_t>> sums;
    std::map<Year, std::size_t> counts;
    for (const auto& doc : docs) {
        if (!timeline.in_analysis_range(doc.year)) continue;
        std::uint64_t fresh = 0;
        for (const auto& [id, count] : doc.concepts)
            if (timeline.first_year(id) == doc.year) ++fresh;
        sums[doc.year].first += fresh;
        sums[doc.year].second += doc.concepts.size();
        ++counts[doc.year];
    }
    std::vector<PerDocumentRecord> out;
    for (Year y : timeline.analysis_years()) {
        PerDocumentRecord r{y, std::nullopt, std::nullopt, counts[y]};
        if (r.documents > 0) {
            r.mean_new = static_cast<double>(sums[y].first) / r.documents;
            r.mean_total = static_cast<double>(sums[y].second) / r.documents;
        }
        out.push_back(r);
    }
    return out;
}

struct RatioRecord {
    Year first_year = 0;
    Year last_year = 0;
    std::size_t new_count = 0;
    std::size_t unique = 0;
    MaybeReal ratio;
};

/// |concepts first appearing in [first, last]| / |unique concepts occurring in [first, last]|.
inline RatioRecord new_ratio_in_window(const ConceptTimeline& timeline, std::span<const DocumentConcepts> docs,
                                       Year first, Year last) {
    std::unordered_set<ConceptId> seen;
    RatioRecord r{first, last, 0, 0, std::nullopt};
    for (const auto& doc : docs) {
        if (doc.year < first || doc.year > last) continue;
        for (const auto& [id, count] : doc.concepts) {
            if (!seen.insert(id).second) continue;
            const auto fy = timeline.first_year(id);
            if (fy && *fy >= first && *fy <= last) ++r.new_count;
        }
    }
    r.unique = seen.size();
    if (r.unique > 0) r.ratio = static_cast<double>(r.new_count) / static_cast<double>(r.unique);
    return r;
}

/// Moving-window new-concept ratio for every window that lies inside the analysis range,
/// labeled by its last year.
inline std::vector<RatioRecord> rolling_new_ratio(const ConceptTimeline& timeline,
                                                  std::span<const DocumentConcepts> docs, int window = 5) {
    require(window >= 1, "rolling_new_ratio: window must be >= 1");
    std::vector<RatioRecord> out;
    for (Year end = timeline.analysis_start() + window - 1; end <= timeline.analysis_end(); ++end)
        out.push_back(new_ratio_in_window(timeline, docs, end - window + 1, end));
    return out;
}

/// Per year: mean over up to n_docs sampled documents of the mean pairwise similarity among
/// each document's distinct concepts. Documents with fewer than 2 concepts are skipped.
inline MetricSeries within_document_similarity(std::span<const DocumentConcepts> docs, const EmbeddingMatrix& m,
                                               std::size_t n_docs, std::uint64_t seed) {
    std::map<Year, std::vector<std::size_t>> eligible;
    for (std::size_t i = 0; i < docs.size(); ++i)
        if (docs[i].concepts.size() >= 2) eligible[docs[i].year].push_back(i);
    MetricSeries series{"within_doc", {}};
    for (const auto& [year, indices] : eligible) {
        Rng rng(derive_seed(seed, "within-doc", year));
        std::vector<double> means;
        std::vector<ConceptId> ids;
        for (auto pick : sample_without_replacement(indices.size(), std::min(n_docs, indices.size()), rng)) {
            ids.clear();
            for (const auto& [id, count] : docs[indices[pick]].concepts) ids.push_back(id);
            means.push_back(mean_similarity_all(ids, m));
        }
        series.records.push_back(summarize(year, means));
    }
    return series;
}

}  // namespace conceptscope
