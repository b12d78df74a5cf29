#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "conceptscope/common.hpp"
#include "conceptscope/corpus.hpp"
#include "conceptscope/embedding.hpp"
#include "conceptscope/embedding_io.hpp"
#include "conceptscope/random.hpp"
#include "conceptscope/text.hpp"

namespace conceptscope {

enum class Drift { none, converging, diverging };

inline std::string drift_name(Drift d) {
    switch (d) {
        case Drift::none: return "none";
        case Drift::converging: return "converging";
        case Drift::diverging: return "diverging";
    }
    return "none";
}

inline Drift drift_from_string(const std::string& name) {
    if (name == "none" || name == "stationary") return Drift::none;
    if (name == "converging") return Drift::converging;
    if (name == "diverging") return Drift::diverging;
    throw InvalidArgument("unknown drift '" + name + "' (expected none, converging or diverging)");
}

struct SyntheticSpec {
    int years = 20;  // analysis years, after the baseline window
    int baseline_years = 5;
    Year start_year = 1976;
    std::size_t docs_per_year = 200;
    std::size_t baseline_vocab_size = 1000;
    std::size_t new_per_year = 50;
    std::size_t concepts_per_doc = 15;
    Drift drift = Drift::converging;
    std::size_t dimension = 300;
    // Similarity of each new concept to its anchor (the expected max similarity to the prior set)
    double sim_start = 0.3;
    double sim_end = 0.8;
    // Weight of the shared centroid direction in every vector
    double centroid_start = 0.3;
    double centroid_end = 0.6;
    std::uint64_t seed = 1;

    Year baseline_end() const { return start_year + baseline_years - 1; }
    Year analysis_end() const { return baseline_end() + years; }

    void validate() const {
        require(years >= 2, "synth: years must be >= 2");
        require(baseline_years >= 1, "synth: baseline_years must be >= 1");
        require(docs_per_year >= 1 && concepts_per_doc >= 1, "synth: docs_per_year and concepts_per_doc must be >= 1");
        require(baseline_vocab_size >= 2, "synth: baseline_vocab_size must be >= 2");
        require(new_per_year >= 1, "synth: new_per_year must be >= 1");
        require(dimension >= 8, "synth: dimension must be >= 8");
        require(baseline_vocab_size <= docs_per_year * baseline_years * concepts_per_doc,
                "synth: baseline docs cannot hold every baseline concept");
        require(new_per_year <= docs_per_year * concepts_per_doc, "synth: a year's docs cannot hold its new concepts");
        for (double v : {sim_start, sim_end, centroid_start, centroid_end})
            require(v > 0.0 && v < 1.0, "synth: schedule values must lie in (0, 1)");
    }
};

struct ScheduleEntry {
    Year year;
    double expected_max_similarity;
    double centroid_weight;
};

/// Per analysis year: the anchor similarity and centroid weight the generator targets.
inline std::vector<ScheduleEntry> synthetic_schedule(const SyntheticSpec& spec) {
    std::vector<ScheduleEntry> out;
    for (int k = 0; k < spec.years; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(spec.years - 1);
        double s, mu;
        switch (spec.drift) {
            case Drift::converging:
                s = spec.sim_start + (spec.sim_end - spec.sim_start) * t;
                mu = spec.centroid_start + (spec.centroid_end - spec.centroid_start) * t;
                break;
            case Drift::diverging:
                s = spec.sim_end + (spec.sim_start - spec.sim_end) * t;
                mu = spec.centroid_end + (spec.centroid_start - spec.centroid_end) * t;
                break;
            default:
                s = (spec.sim_start + spec.sim_end) / 2.0;
                mu = spec.centroid_start;
        }
        out.push_back({spec.baseline_end() + 1 + k, s, mu});
    }
    return out;
}

struct SyntheticCorpus {
    std::vector<Document> documents;
    EmbeddingMatrix vectors;
    std::vector<Year> first_year;  // per vector row
    std::vector<ScheduleEntry> schedule;
};

namespace detail {

inline std::vector<std::string> pseudo_terms(std::size_t count, Rng& rng) {
    static const std::string consonants = "bdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    std::unordered_set<std::string> seen;
    std::vector<std::string> terms;
    auto word = [&] {
        std::string w;
        const int syllables = 2 + static_cast<int>(rng.below(3));
        for (int i = 0; i < syllables; ++i) {
            w += consonants[rng.below(consonants.size())];
            w += vowels[rng.below(vowels.size())];
        }
        return w;
    };
    auto usable = [](const std::string& w) { return !text::is_stopword(w) && text::lemmatize(w) == w; };
    while (terms.size() < count) {
        std::string t = word();
        if (!usable(t)) continue;
        if (rng.below(10) == 0) {
            const std::string second = word();
            if (!usable(second)) continue;
            t += ' ' + second;
        }
        if (seen.insert(t).second) terms.push_back(std::move(t));
    }
    return terms;
}

inline std::vector<double> random_unit_orthogonal(std::size_t d, Rng& rng, const std::vector<const std::vector<double>*>& against) {
    for (;;) {
        std::vector<double> v(d);
        for (auto& x : v) x = rng.normal();
        for (const auto* a : against) {
            double p = 0.0;
            for (std::size_t k = 0; k < d; ++k) p += v[k] * (*a)[k];
            for (std::size_t k = 0; k < d; ++k) v[k] -= p * (*a)[k];
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-6) continue;
        for (auto& x : v) x /= norm;
        return v;
    }
}

}  // namespace detail

/// Builds a corpus whose concept vectors realize the requested drift.
///
/// Every vector is x = mu c + sqrt(1 - mu^2) w with c a shared unit centroid and w a unit
/// vector orthogonal to c. A new concept picks a uniformly random earlier concept as anchor
/// and bends its w towards the anchor's so that cos(x, anchor) equals the year's schedule value.
inline SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t d = spec.dimension;
    const auto schedule = synthetic_schedule(spec);
    const std::size_t total = spec.baseline_vocab_size + spec.new_per_year * static_cast<std::size_t>(spec.years);

    Rng term_rng(derive_seed(spec.seed, "synth-terms"));
    auto terms = detail::pseudo_terms(total, term_rng);

    Rng vec_rng(derive_seed(spec.seed, "synth-vectors"));
    const auto centroid = detail::random_unit_orthogonal(d, vec_rng, {});
    std::vector<std::vector<double>> w(total);
    std::vector<double> mu(total);
    std::vector<Year> first_year(total);
    std::vector<float> values(total * d);
    auto emit = [&](std::size_t i) {
        const double a = mu[i], b = std::sqrt(1.0 - mu[i] * mu[i]);
        for (std::size_t k = 0; k < d; ++k) values[i * d + k] = static_cast<float>(a * centroid[k] + b * w[i][k]);
    };

    const double baseline_mu = schedule.front().centroid_weight;
    for (std::size_t i = 0; i < spec.baseline_vocab_size; ++i) {
        mu[i] = baseline_mu;
        w[i] = detail::random_unit_orthogonal(d, vec_rng, {&centroid});
        emit(i);
    }
    std::size_t next = spec.baseline_vocab_size;
    for (const auto& entry : schedule) {
        const std::size_t prior_count = next;
        for (std::size_t j = 0; j < spec.new_per_year; ++j, ++next) {
            const std::size_t anchor = vec_rng.below(prior_count);
            const double mu_y = entry.centroid_weight, mu_p = mu[anchor];
            double t = (entry.expected_max_similarity - mu_y * mu_p) /
                       (std::sqrt(1.0 - mu_y * mu_y) * std::sqrt(1.0 - mu_p * mu_p));
            t = std::clamp(t, -1.0, 1.0);
            const auto r = detail::random_unit_orthogonal(d, vec_rng, {&centroid, &w[anchor]});
            w[next].resize(d);
            const double tr = std::sqrt(1.0 - t * t);
            for (std::size_t k = 0; k < d; ++k) w[next][k] = t * w[anchor][k] + tr * r[k];
            mu[next] = mu_y;
            first_year[next] = entry.year;
            emit(next);
        }
    }

    // Documents: every concept appears first in its own year, then slots are filled from the
    // concepts already introduced.
    Rng doc_rng(derive_seed(spec.seed, "synth-docs"));
    std::vector<Document> documents;
    std::vector<std::size_t> pool;
    std::size_t introduced = 0;
    const Year last_year = spec.analysis_end();
    const std::size_t baseline_docs = spec.docs_per_year * static_cast<std::size_t>(spec.baseline_years);
    for (Year year = spec.start_year; year <= last_year; ++year) {
        const bool baseline = year <= spec.baseline_end();
        std::vector<std::vector<std::size_t>> slots(spec.docs_per_year);
        if (baseline) {
            const std::size_t offset = static_cast<std::size_t>(year - spec.start_year) * spec.docs_per_year;
            for (std::size_t i = 0; i < spec.baseline_vocab_size; ++i) {
                const std::size_t doc = i % baseline_docs;
                if (doc >= offset && doc < offset + spec.docs_per_year) slots[doc - offset].push_back(i);
            }
            introduced = spec.baseline_vocab_size;
        } else {
            const std::size_t begin = spec.baseline_vocab_size +
                                      static_cast<std::size_t>(year - spec.baseline_end() - 1) * spec.new_per_year;
            for (std::size_t j = 0; j < spec.new_per_year; ++j) slots[j % spec.docs_per_year].push_back(begin + j);
            introduced = begin + spec.new_per_year;
        }
        // Baseline concepts count as seen once their round-robin document's year is reached.
        auto eligible = [&](std::size_t c) {
            if (c >= spec.baseline_vocab_size) return c < introduced;
            const std::size_t doc = c % baseline_docs;
            const std::size_t year_index = doc / spec.docs_per_year;
            return spec.start_year + static_cast<Year>(year_index) <= year;
        };
        pool.clear();
        for (std::size_t c = 0; c < introduced; ++c)
            if (eligible(c)) pool.push_back(c);
        for (std::size_t di = 0; di < spec.docs_per_year; ++di) {
            auto& chosen = slots[di];
            std::unordered_set<std::size_t> present(chosen.begin(), chosen.end());
            std::size_t attempts = 0;
            while (chosen.size() < spec.concepts_per_doc && attempts < spec.concepts_per_doc * 20 && !pool.empty()) {
                ++attempts;
                const std::size_t c = pool[doc_rng.below(pool.size())];
                if (present.insert(c).second) chosen.push_back(c);
            }
            for (std::size_t k = chosen.size(); k > 1; --k) std::swap(chosen[k - 1], chosen[doc_rng.below(k)]);
            std::string abstract;
            for (std::size_t c : chosen) {
                if (!abstract.empty()) abstract += ' ';
                abstract += terms[c] + '.';
            }
            char id[32];
            std::snprintf(id, sizeof id, "S%d-%04zu", year, di + 1);
            documents.push_back({id, year, "Synthetic record", abstract});
        }
    }
    // Baseline concept first years follow from their round-robin documents.
    for (std::size_t i = 0; i < spec.baseline_vocab_size; ++i)
        first_year[i] = spec.start_year + static_cast<Year>((i % baseline_docs) / spec.docs_per_year);

    Vocabulary vocab;
    for (auto& t : terms) vocab.add(t, 0);
    return {std::move(documents), EmbeddingMatrix(std::move(vocab), d, std::move(values)), std::move(first_year),
            schedule};
}

struct SyntheticFiles {
    std::filesystem::path corpus, vectors, truth;
};

/// Writes corpus.jsonl, vectors.tsv and truth.json (first-appearance years plus the per-year
/// schedule) into `dir`.
inline SyntheticFiles write_synthetic(const SyntheticSpec& spec, const SyntheticCorpus& corpus,
                                      const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    SyntheticFiles files{dir / "corpus.jsonl", dir / "vectors.tsv", dir / "truth.json"};
    {
        std::ofstream out(files.corpus, std::ios::binary);
        if (!out) throw IoError("cannot write '" + files.corpus.string() + "'");
        write_documents_jsonl(out, corpus.documents);
    }
    save_embeddings(files.vectors, corpus.vectors, EmbeddingFormat::tsv);

    nlohmann::ordered_json truth;
    truth["seed"] = spec.seed;
    truth["drift"] = drift_name(spec.drift);
    truth["start_year"] = spec.start_year;
    truth["baseline_end"] = spec.baseline_end();
    truth["analysis_end"] = spec.analysis_end();
    truth["dimension"] = spec.dimension;
    nlohmann::ordered_json first = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < corpus.first_year.size(); ++i)
        first[corpus.vectors.term(static_cast<ConceptId>(i))] = corpus.first_year[i];
    truth["first_year"] = std::move(first);
    nlohmann::ordered_json sched = nlohmann::ordered_json::array();
    for (const auto& e : corpus.schedule)
        sched.push_back({{"year", e.year},
                         {"expected_max_similarity", e.expected_max_similarity},
                         {"centroid_weight", e.centroid_weight}});
    truth["schedule"] = std::move(sched);
    std::ofstream out(files.truth, std::ios::binary);
    if (!out) throw IoError("cannot write '" + files.truth.string() + "'");
    out << truth.dump(2) << '\n';
    return files;
}

}  // namespace conceptscope
