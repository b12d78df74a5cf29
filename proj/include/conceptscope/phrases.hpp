#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "conceptscope/common.hpp"
#include "conceptscope/text.hpp"
#include "conceptscope/vocabulary.hpp"

namespace conceptscope {

struct PhraseConfig {
    int max_n = 4;
    double score_threshold = 0.5;
    std::uint64_t min_count = 5;
    unsigned threads = 1;
};

/// Normalized pointwise mutual information of an adjacent pair, in [-1, 1].
/// Probabilities are unit counts over the total unit count of the pass.
inline double npmi(std::uint64_t count_left, std::uint64_t count_right, std::uint64_t count_joint,
                   std::uint64_t total) {
    if (count_joint == 0) return -1.0;
    const double n = static_cast<double>(total);
    const double p_joint = count_joint / n;
    const double p_left = count_left / n;
    const double p_right = count_right / n;
    const double denom = -std::log(p_joint);
    if (denom <= 0.0) return 1.0;
    return std::log(p_joint / (p_left * p_right)) / denom;
}

namespace detail {

using CountTable = std::unordered_map<std::string, std::uint64_t>;

// Units are space-joined token runs; a unit is a connector when it is a single stopword.
inline bool is_connector(const std::string& unit) {
    return unit.find(' ') == std::string::npos && text::is_stopword(unit);
}

struct PairSite {
    std::size_t begin;
    std::size_t width;  // 2 for "left right", 3 for "left stop right"
    std::string joint;
};

inline std::vector<PairSite> pair_sites(const std::vector<std::string>& units, int max_n) {
    std::vector<PairSite> sites;
    for (std::size_t i = 0; i + 1 < units.size(); ++i) {
        if (is_connector(units[i])) continue;
        const int left_len = gram_length(units[i]);
        if (!is_connector(units[i + 1])) {
            if (left_len + gram_length(units[i + 1]) <= max_n)
                sites.push_back({i, 2, units[i] + ' ' + units[i + 1]});
        } else if (i + 2 < units.size() && !is_connector(units[i + 2])) {
            if (left_len + 1 + gram_length(units[i + 2]) <= max_n)
                sites.push_back({i, 3, units[i] + ' ' + units[i + 1] + ' ' + units[i + 2]});
        }
    }
    return sites;
}

// Counting is sharded over sentences; tables merge by addition, so the result does
// not depend on the shard count.
template <typename Fn>
CountTable sharded_count(std::size_t items, unsigned threads, Fn&& count_range) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(items, 1))));
    std::vector<CountTable> shards(threads);
    if (threads == 1) {
        count_range(0, items, shards[0]);
        return std::move(shards[0]);
    }
    std::vector<std::thread> workers;
    const std::size_t chunk = (items + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = std::min(items, t * chunk);
        const std::size_t hi = std::min(items, lo + chunk);
        workers.emplace_back([&, lo, hi, t] { count_range(lo, hi, shards[t]); });
    }
    for (auto& w : workers) w.join();
    CountTable merged = std::move(shards[0]);
    for (unsigned t = 1; t < threads; ++t)
        for (auto& [key, value] : shards[t]) merged[key] += value;
    return merged;
}

}  // namespace detail

/// Learns a concept vocabulary of unigrams and phrases up to max_n tokens.
///
/// Each of the max_n-1 passes counts the current units and their adjacent pairs (a pair may
/// be bridged by a single stopword), then merges every pair whose NPMI exceeds the threshold
/// and whose joint count reaches min_count. Within a sentence, higher-scoring pairs merge
/// first; ties go to the leftmost. Unigrams that are not stopwords and occur at least
/// min_count times are always included. A phrase's frequency is the number of times it was
/// formed.
inline Vocabulary detect_phrases(std::span<const TokenizedSentence> sentences, const PhraseConfig& config = {}) {
    require(config.max_n >= 2 && config.max_n <= 4, "detect_phrases: max_n must be in 2..4");

    std::vector<std::vector<std::string>> units;
    units.reserve(sentences.size());
    for (const auto& s : sentences) units.push_back(s.tokens);

    const auto unigram_counts = detail::sharded_count(units.size(), config.threads,
                                                      [&](std::size_t lo, std::size_t hi, detail::CountTable& table) {
                                                          for (std::size_t i = lo; i < hi; ++i)
                                                              for (const auto& t : units[i]) ++table[t];
                                                      });

    std::map<std::string, std::uint64_t> phrase_counts;
    for (int pass = 0; pass < config.max_n - 1; ++pass) {
        const auto unit_counts = detail::sharded_count(
            units.size(), config.threads, [&](std::size_t lo, std::size_t hi, detail::CountTable& table) {
                for (std::size_t i = lo; i < hi; ++i)
                    for (const auto& u : units[i]) ++table[u];
            });
        const auto joint_counts = detail::sharded_count(
            units.size(), config.threads, [&](std::size_t lo, std::size_t hi, detail::CountTable& table) {
                for (std::size_t i = lo; i < hi; ++i)
                    for (auto& site : detail::pair_sites(units[i], config.max_n)) ++table[site.joint];
            });
        std::uint64_t total = 0;
        for (const auto& [unit, count] : unit_counts) total += count;

        bool merged_any = false;
        for (auto& sentence : units) {
            auto sites = detail::pair_sites(sentence, config.max_n);
            struct Scored {
                double score;
                std::size_t site;
            };
            std::vector<Scored> accepted;
            for (std::size_t k = 0; k < sites.size(); ++k) {
                const auto& site = sites[k];
                const auto joint = joint_counts.at(site.joint);
                if (joint < config.min_count) continue;
                const auto& left = sentence[site.begin];
                const auto& right = sentence[site.begin + site.width - 1];
                const double score = npmi(unit_counts.at(left), unit_counts.at(right), joint, total);
                if (score > config.score_threshold) accepted.push_back({score, k});
            }
            if (accepted.empty()) continue;
            std::stable_sort(accepted.begin(), accepted.end(),
                             [](const Scored& a, const Scored& b) { return a.score > b.score; });
            std::vector<char> taken(sentence.size(), 0);
            std::vector<std::size_t> chosen;
            for (const auto& a : accepted) {
                const auto& site = sites[a.site];
                bool free = true;
                for (std::size_t j = site.begin; j < site.begin + site.width; ++j) free = free && !taken[j];
                if (!free) continue;
                for (std::size_t j = site.begin; j < site.begin + site.width; ++j) taken[j] = 1;
                chosen.push_back(a.site);
            }
            std::sort(chosen.begin(), chosen.end(),
                      [&](std::size_t a, std::size_t b) { return sites[a].begin < sites[b].begin; });
            std::vector<std::string> rebuilt;
            rebuilt.reserve(sentence.size());
            std::size_t next = 0;
            for (std::size_t k : chosen) {
                const auto& site = sites[k];
                for (; next < site.begin; ++next) rebuilt.push_back(std::move(sentence[next]));
                rebuilt.push_back(site.joint);
                ++phrase_counts[site.joint];
                next = site.begin + site.width;
            }
            for (; next < sentence.size(); ++next) rebuilt.push_back(std::move(sentence[next]));
            sentence = std::move(rebuilt);
            merged_any = true;
        }
        if (!merged_any) break;
    }

    std::vector<std::pair<std::string, std::uint64_t>> terms;
    for (const auto& [token, count] : unigram_counts)
        if (count >= config.min_count && !text::is_stopword(token)) terms.emplace_back(token, count);
    for (const auto& [phrase, count] : phrase_counts)
        if (count >= config.min_count) terms.emplace_back(phrase, count);
    return Vocabulary::from_counts(std::move(terms));
}

}  // namespace conceptscope
