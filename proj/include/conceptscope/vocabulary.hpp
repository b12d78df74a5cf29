#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "conceptscope/common.hpp"
#include "conceptscope/corpus.hpp"
#include "conceptscope/csv.hpp"
#include "conceptscope/text.hpp"

namespace conceptscope {

inline int gram_length(std::string_view term) {
    return term.empty() ? 0 : 1 + static_cast<int>(std::count(term.begin(), term.end(), ' '));
}

struct VocabEntry {
    std::string term;
    int gram_length = 1;
    std::uint64_t frequency = 0;
};

/// Concept terms (words and phrases of up to four tokens) with dense ids 0..size()-1.
class Vocabulary {
public:
    Vocabulary() = default;

    ConceptId add(std::string term, std::uint64_t frequency) {
        if (term.empty()) throw DataError("vocabulary term must not be empty");
        if (index_.contains(term)) throw DataError("duplicate vocabulary term '" + term + "'");
        const auto id = static_cast<ConceptId>(entries_.size());
        const int grams = gram_length(term);
        max_gram_ = std::max(max_gram_, grams);
        index_.emplace(term, id);
        entries_.push_back({std::move(term), grams, frequency});
        return id;
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    int max_gram_length() const { return max_gram_; }

    const VocabEntry& entry(ConceptId id) const { return entries_.at(id); }
    const std::string& term(ConceptId id) const { return entries_.at(id).term; }
    std::span<const VocabEntry> entries() const { return entries_; }

    std::optional<ConceptId> find(std::string_view term) const {
        auto it = index_.find(std::string(term));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Builds a vocabulary with ids assigned by descending frequency, then term.
    static Vocabulary from_counts(std::vector<std::pair<std::string, std::uint64_t>> counts) {
        std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        Vocabulary vocab;
        for (auto& [term, count] : counts) vocab.add(std::move(term), count);
        return vocab;
    }

private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, ConceptId> index_;
    int max_gram_ = 0;
};

/// TSV export: term \t gram_length \t frequency, one row per concept in id order.
inline void write_vocabulary_tsv(std::ostream& out, const Vocabulary& vocab) {
    for (const auto& e : vocab.entries()) out << e.term << '\t' << e.gram_length << '\t' << e.frequency << '\n';
}

inline Vocabulary read_vocabulary_tsv(std::istream& in) {
    Vocabulary vocab;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parts = csv::split_tabs(line);
        if (parts.size() != 3) throw DataError("vocabulary line " + std::to_string(line_no) + ": expected 3 fields");
        const std::string term(parts[0]);
        const auto grams = csv::parse_int(parts[1]);
        if (grams != gram_length(term))
            throw DataError("vocabulary line " + std::to_string(line_no) + ": gram length does not match term");
        vocab.add(term, static_cast<std::uint64_t>(csv::parse_int(parts[2])));
    }
    return vocab;
}

/// Longest-match-first, left-to-right segmentation of one token sequence.
/// Out-of-vocabulary tokens are skipped.
inline std::vector<ConceptId> segment(std::span<const std::string> tokens, const Vocabulary& vocab) {
    std::vector<ConceptId> ids;
    const int longest = std::max(1, vocab.max_gram_length());
    std::size_t i = 0;
    std::string candidate;
    while (i < tokens.size()) {
        const std::size_t max_len = std::min<std::size_t>(longest, tokens.size() - i);
        bool matched = false;
        for (std::size_t len = max_len; len >= 1; --len) {
            candidate = tokens[i];
            for (std::size_t k = 1; k < len; ++k) {
                candidate.push_back(' ');
                candidate += tokens[i + k];
            }
            if (auto id = vocab.find(candidate)) {
                ids.push_back(*id);
                i += len;
                matched = true;
                break;
            }
        }
        if (!matched) ++i;
    }
    return ids;
}

/// Title and abstract are tokenized, lemmatized and processed identically.
inline std::vector<TokenizedSentence> document_sentences(const Document& doc) {
    auto sentences = text::lemmatized_sentences(doc.title);
    auto body = text::lemmatized_sentences(doc.abstract);
    sentences.insert(sentences.end(), std::make_move_iterator(body.begin()), std::make_move_iterator(body.end()));
    return sentences;
}

using ConceptCounts = std::vector<std::pair<ConceptId, std::uint32_t>>;

/// Concept occurrences in one document, in order of first occurrence.
inline ConceptCounts extract_concepts(const Document& doc, const Vocabulary& vocab) {
    require(!vocab.empty(), "extract_concepts: vocabulary is empty");
    ConceptCounts counts;
    std::unordered_map<ConceptId, std::size_t> slot;
    for (const auto& sentence : document_sentences(doc)) {
        for (ConceptId id : segment(sentence.tokens, vocab)) {
            auto [it, inserted] = slot.try_emplace(id, counts.size());
            if (inserted)
                counts.emplace_back(id, 1);
            else
                ++counts[it->second].second;
        }
    }
    return counts;
}

/// Per-document concept occurrences, the unit every corpus-level statistic works from.
struct DocumentConcepts {
    std::string id;
    Year year = 0;
    ConceptCounts concepts;
};

inline std::vector<DocumentConcepts> extract_all(std::span<const Document> documents, const Vocabulary& vocab) {
    std::vector<DocumentConcepts> out;
    out.reserve(documents.size());
    for (const auto& doc : documents) out.push_back({doc.id, doc.year, extract_concepts(doc, vocab)});
    return out;
}

}  // namespace conceptscope
