#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "conceptscope/common.hpp"
#include "conceptscope/csv.hpp"
#include "conceptscope/vocabulary.hpp"

namespace conceptscope {

/// First-appearance year per concept id; std::nullopt for concepts never observed.
struct FirstAppearance {
    std::vector<std::optional<Year>> year;

    std::vector<ConceptId> unobserved() const {
        std::vector<ConceptId> ids;
        for (std::size_t i = 0; i < year.size(); ++i)
            if (!year[i]) ids.push_back(static_cast<ConceptId>(i));
        return ids;
    }
};

/// Minimum document year per concept. A min-reduction, so independent of document order.
inline FirstAppearance first_appearance_years(std::span<const DocumentConcepts> docs, std::size_t vocab_size) {
    FirstAppearance fa;
    fa.year.assign(vocab_size, std::nullopt);
    for (const auto& doc : docs) {
        for (const auto& [id, count] : doc.concepts) {
            if (id >= vocab_size) throw DataError("first_appearance_years: concept id out of range");
            auto& y = fa.year[id];
            if (!y || doc.year < *y) y = doc.year;
        }
    }
    return fa;
}

/// Concepts ordered by (first year, term): the baseline first, then each analysis year's
/// new concepts. cumulative(y), prior(y) and new_concepts(y) are contiguous views into
/// that order.
class ConceptTimeline {
public:
    static ConceptTimeline build(const FirstAppearance& first, const Vocabulary& vocab, Year baseline_end,
                                 Year analysis_end) {
        require(baseline_end < analysis_end, "build_timeline: baseline_end must precede analysis_end");
        require(first.year.size() == vocab.size(), "build_timeline: first-year map does not match vocabulary");
        ConceptTimeline t;
        t.baseline_end_ = baseline_end;
        t.analysis_end_ = analysis_end;
        t.first_year_ = first.year;
        for (std::size_t i = 0; i < first.year.size(); ++i) {
            const auto& y = first.year[i];
            if (!y)
                t.unobserved_.push_back(static_cast<ConceptId>(i));
            else if (*y > analysis_end)
                t.excluded_.push_back(static_cast<ConceptId>(i));
            else
                t.order_.push_back(static_cast<ConceptId>(i));
        }
        std::sort(t.order_.begin(), t.order_.end(), [&](ConceptId a, ConceptId b) {
            const Year ya = std::max(*first.year[a], baseline_end);
            const Year yb = std::max(*first.year[b], baseline_end);
            return ya != yb ? ya < yb : vocab.term(a) < vocab.term(b);
        });
        auto end_of = [&](Year y) {
            return static_cast<std::size_t>(std::partition_point(t.order_.begin(), t.order_.end(),
                                                                 [&](ConceptId c) { return *first.year[c] <= y; }) -
                                            t.order_.begin());
        };
        t.baseline_size_ = end_of(baseline_end);
        if (t.baseline_size_ == 0) throw DataError("build_timeline: baseline is empty; metrics need prior concepts");
        for (Year y = baseline_end + 1; y <= analysis_end; ++y) t.cumulative_end_.push_back(end_of(y));
        return t;
    }

    Year baseline_end() const { return baseline_end_; }
    Year analysis_start() const { return baseline_end_ + 1; }
    Year analysis_end() const { return analysis_end_; }
    std::vector<Year> analysis_years() const {
        std::vector<Year> ys;
        for (Year y = analysis_start(); y <= analysis_end_; ++y) ys.push_back(y);
        return ys;
    }
    bool in_analysis_range(Year y) const { return y >= analysis_start() && y <= analysis_end_; }

    std::span<const ConceptId> baseline() const { return std::span(order_).first(baseline_size_); }

    /// baseline plus every concept new in an analysis year <= y.
    std::span<const ConceptId> cumulative(Year y) const { return std::span(order_).first(cumulative_end(y)); }

    /// Concepts that precede year y: cumulative(y) minus new(y).
    std::span<const ConceptId> prior(Year y) const {
        check_year(y);
        return std::span(order_).first(y == analysis_start() ? baseline_size_ : cumulative_end(y - 1));
    }

    std::span<const ConceptId> new_concepts(Year y) const {
        const std::size_t begin = prior(y).size();
        return std::span(order_).subspan(begin, cumulative_end(y) - begin);
    }

    /// |new(y)| / |cumulative(y)|
    double new_share(Year y) const {
        return static_cast<double>(new_concepts(y).size()) / static_cast<double>(cumulative(y).size());
    }

    std::optional<Year> first_year(ConceptId id) const { return first_year_.at(id); }
    const std::vector<std::optional<Year>>& first_years() const { return first_year_; }
    std::span<const ConceptId> unobserved() const { return unobserved_; }
    /// Concepts first observed after analysis_end; excluded from all metrics.
    std::span<const ConceptId> excluded() const { return excluded_; }
    std::size_t observed_in_range() const { return order_.size(); }

private:
    void check_year(Year y) const {
        if (!in_analysis_range(y))
            throw InvalidArgument("year " + std::to_string(y) + " outside analysis range " +
                                  std::to_string(analysis_start()) + ".." + std::to_string(analysis_end_));
    }
    std::size_t cumulative_end(Year y) const {
        check_year(y);
        return cumulative_end_[static_cast<std::size_t>(y - analysis_start())];
    }

    Year baseline_end_ = 0;
    Year analysis_end_ = 0;
    std::vector<std::optional<Year>> first_year_;
    std::vector<ConceptId> order_;
    std::size_t baseline_size_ = 0;
    std::vector<std::size_t> cumulative_end_;
    std::vector<ConceptId> unobserved_;
    std::vector<ConceptId> excluded_;
};

inline ConceptTimeline build_timeline(const FirstAppearance& first, const Vocabulary& vocab, Year baseline_end,
                                      Year analysis_end) {
    return ConceptTimeline::build(first, vocab, baseline_end, analysis_end);
}

/// Share of all concept occurrences in the corpus that belong to baseline concepts.
inline double baseline_coverage(const ConceptTimeline& timeline, std::span<const DocumentConcepts> docs) {
    std::uint64_t total = 0, baseline = 0;
    for (const auto& doc : docs)
        for (const auto& [id, count] : doc.concepts) {
            total += count;
            const auto y = timeline.first_year(id);
            if (y && *y <= timeline.baseline_end()) baseline += count;
        }
    return total == 0 ? 0.0 : static_cast<double>(baseline) / static_cast<double>(total);
}

/// TSV export: term \t first_year for every observed concept, in id order.
inline void write_timeline_tsv(std::ostream& out, const FirstAppearance& first, const Vocabulary& vocab) {
    for (std::size_t i = 0; i < first.year.size(); ++i)
        if (first.year[i]) out << vocab.term(static_cast<ConceptId>(i)) << '\t' << *first.year[i] << '\n';
}

struct TimelineImport {
    FirstAppearance first;
    std::size_t unknown_terms = 0;
};

/// Reads term \t first_year rows; terms absent from the vocabulary are counted and skipped.
inline TimelineImport read_timeline_tsv(std::istream& in, const Vocabulary& vocab) {
    TimelineImport result;
    result.first.year.assign(vocab.size(), std::nullopt);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parts = csv::split_tabs(line);
        if (parts.size() != 2) throw DataError("timeline line " + std::to_string(line_no) + ": expected 2 fields");
        const auto id = vocab.find(parts[0]);
        if (!id) {
            ++result.unknown_terms;
            continue;
        }
        const auto y = static_cast<Year>(csv::parse_int(parts[1]));
        auto& slot = result.first.year[*id];
        if (!slot || y < *slot) slot = y;
    }
    return result;
}

}  // namespace conceptscope
