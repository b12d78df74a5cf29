#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>

#include "conceptscope/common.hpp"

namespace conceptscope {

/// One sentence after normalization and denoising.
struct TokenizedSentence {
    std::vector<std::string> tokens;

    bool operator==(const TokenizedSentence&) const = default;
};

namespace text {

/// NFC-normalizes and lowercases UTF-8 input. Invalid byte sequences become U+FFFD.
inline std::string normalize(std::string_view utf8) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
    icu::UnicodeString source = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    source.toLower(icu::Locale::getRoot());
    icu::UnicodeString composed = nfc->normalize(source, status);
    if (U_FAILURE(status)) throw Error("ICU normalization failed");
    std::string out;
    composed.toUTF8String(out);
    return out;
}

namespace detail {

inline bool is_word_char(UChar32 c) {
    if (u_isalnum(c)) return true;
    const int8_t type = u_charType(c);
    return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK;
}

inline bool is_terminal(UChar32 c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace detail

/// Splits text into sentences on terminal punctuation (. ! ?) and into lowercase tokens.
///
/// A token is a maximal run of letters, digits and combining marks; a single hyphen
/// between two such characters stays inside the token ("non-volatile"), as does a period
/// between two digits ("3.5"). Tokens without any letter are dropped, and sentences left
/// with no tokens are dropped.
inline std::vector<TokenizedSentence> tokenize(std::string_view raw) {
    std::vector<TokenizedSentence> sentences;
    if (raw.empty()) return sentences;
    const icu::UnicodeString s = icu::UnicodeString::fromUTF8(normalize(raw));

    TokenizedSentence current;
    icu::UnicodeString token;
    bool token_has_letter = false;

    auto flush_token = [&] {
        if (!token.isEmpty() && token_has_letter) {
            std::string utf8;
            token.toUTF8String(utf8);
            current.tokens.push_back(std::move(utf8));
        }
        token.remove();
        token_has_letter = false;
    };
    auto flush_sentence = [&] {
        flush_token();
        if (!current.tokens.empty()) sentences.push_back(std::move(current));
        current = {};
    };

    const int32_t length = s.length();
    int32_t i = 0;
    while (i < length) {
        const UChar32 c = s.char32At(i);
        const int32_t next = s.moveIndex32(i, 1);
        const UChar32 after = next < length ? s.char32At(next) : U_SENTINEL;
        if (detail::is_word_char(c)) {
            token.append(c);
            if (u_isalpha(c)) token_has_letter = true;
        } else if (c == '-' && !token.isEmpty() && after != U_SENTINEL && detail::is_word_char(after)) {
            token.append(c);
        } else if (c == '.' && !token.isEmpty() && u_isdigit(token.char32At(token.length() - 1)) &&
                   after != U_SENTINEL && u_isdigit(after)) {
            token.append(c);
        } else if (detail::is_terminal(c)) {
            flush_sentence();
        } else {
            flush_token();
        }
        i = next;
    }
    flush_sentence();
    return sentences;
}

/// Fixed English stopword list. Stopwords never become standalone vocabulary terms
/// but may appear inside multi-word phrases.
inline const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
        "are", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
        "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "either",
        "few", "for", "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers",
        "herself", "him", "himself", "his", "how", "however", "i", "if", "in", "into", "is", "it",
        "its", "itself", "may", "me", "might", "more", "most", "must", "my", "myself", "no", "nor",
        "not", "of", "off", "on", "once", "one", "only", "or", "other", "our", "ours", "ourselves",
        "out", "over", "own", "per", "same", "she", "should", "so", "some", "such", "than", "that",
        "the", "their", "theirs", "them", "themselves", "then", "there", "thereby", "therefore",
        "therein", "these", "they", "this", "those", "through", "thus", "to", "too", "under", "until",
        "up", "upon", "very", "via", "was", "we", "were", "what", "when", "where", "whereby",
        "wherein", "which", "while", "who", "whom", "why", "will", "with", "within", "without",
        "would", "yet", "you", "your", "yours", "yourself", "yourselves",
    };
    return words;
}

inline bool is_stopword(std::string_view token) { return stopwords().contains(std::string(token)); }

namespace detail {

inline bool ascii_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Porter-style consonant test: 'y' is a consonant at the start or after a vowel.
inline bool consonant_at(std::string_view w, std::size_t i) {
    const char c = w[i];
    if (ascii_vowel(c)) return false;
    if (c == 'y') return i == 0 || !consonant_at(w, i - 1);
    return true;
}

inline bool has_vowel(std::string_view w) {
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!consonant_at(w, i)) return true;
    return false;
}

// Number of VC sequences in [C](VC)^m[V].
inline int measure(std::string_view w) {
    int m = 0;
    std::size_t i = 0;
    while (i < w.size() && consonant_at(w, i)) ++i;
    while (i < w.size()) {
        while (i < w.size() && !consonant_at(w, i)) ++i;
        if (i >= w.size()) break;
        while (i < w.size() && consonant_at(w, i)) ++i;
        ++m;
    }
    return m;
}

inline bool ends_cvc(std::string_view w) {
    const std::size_t n = w.size();
    if (n < 3) return false;
    const char last = w[n - 1];
    return consonant_at(w, n - 3) && !consonant_at(w, n - 2) && consonant_at(w, n - 1) && last != 'w' &&
           last != 'x' && last != 'y';
}

inline bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

inline const std::unordered_map<std::string, std::string>& irregular_forms() {
    static const std::unordered_map<std::string, std::string> forms = {
        {"children", "child"},     {"men", "man"},           {"women", "woman"},
        {"feet", "foot"},          {"teeth", "tooth"},       {"mice", "mouse"},
        {"geese", "goose"},        {"indices", "index"},     {"matrices", "matrix"},
        {"vertices", "vertex"},    {"apices", "apex"},       {"axes", "axis"},
        {"analyses", "analysis"},  {"hypotheses", "hypothesis"}, {"theses", "thesis"},
        {"syntheses", "synthesis"}, {"diagnoses", "diagnosis"}, {"criteria", "criterion"},
        {"phenomena", "phenomenon"}, {"nuclei", "nucleus"},  {"radii", "radius"},
        {"stimuli", "stimulus"},   {"fungi", "fungus"},      {"loci", "locus"},
        {"media", "medium"},       {"strata", "stratum"},    {"spectra", "spectrum"},
        {"leaves", "leaf"},        {"halves", "half"},       {"shelves", "shelf"},
        {"knives", "knife"},       {"lives", "life"},        {"wives", "wife"},
        {"created", "create"},     {"creating", "create"},   {"controlled", "control"},
        {"controlling", "control"}, {"patrolled", "patrol"}, {"patrolling", "patrol"},
    };
    return forms;
}

// Inflected-looking words that are already canonical.
inline const std::unordered_set<std::string>& protected_words() {
    static const std::unordered_set<std::string> words = {
        "news", "series", "species", "physics", "mathematics", "electronics", "optics", "mechanics",
        "dynamics", "acoustics", "kinetics", "genetics", "robotics", "ceramics", "plastics", "lens",
        "gas", "bias", "chassis", "canvas", "atlas", "bearing", "housing", "ceiling", "during",
        "morning", "evening", "string", "spring", "thing", "something", "nothing", "everything",
        "anything", "need", "speed", "seed", "feed", "bleed", "breed", "embed", "shed", "bed", "red",
        "hundred", "sacred", "wicked", "naked", "kindred", "bred", "sled", "wed",
    };
    return words;
}

inline void restore_stem(std::string& stem) {
    const std::size_t n = stem.size();
    if (n == 0) return;
    const char last = stem[n - 1];
    auto tail = [&](std::string_view s) { return ends_with(stem, s); };

    if ((tail("at") && measure(stem) >= 2) || tail("bl") || tail("cl") || tail("dl") || tail("fl") ||
        tail("gl") || tail("kl") || tail("pl") || tail("tl") || tail("zl") || tail("rg") || tail("dg")) {
        stem.push_back('e');
        return;
    }
    if (n >= 3 && tail("us") && ascii_vowel(stem[n - 3])) {
        stem.push_back('e');
        return;
    }
    if (last == 'v' || last == 'c' || last == 'u' || (last == 'z' && !tail("zz"))) {
        stem.push_back('e');
        return;
    }
    if (n >= 2 && last == 's' && stem[n - 2] != 's' && consonant_at(stem, n - 2)) {
        stem.push_back('e');
        return;
    }
    if (n >= 2 && stem[n - 1] == stem[n - 2] && consonant_at(stem, n - 1) && last != 'l' && last != 's' &&
        last != 'z') {
        if (ends_cvc(std::string_view(stem).substr(0, n - 1))) stem.pop_back();
        return;
    }
    if (measure(stem) == 1 && ends_cvc(stem)) {
        stem.push_back('e');
        return;
    }
    if (n == 2 && ascii_vowel(stem[0]) && consonant_at(stem, 1) && last != 'w' && last != 'x' && last != 'y')
        stem.push_back('e');
}

// One rewrite step; returns the input unchanged when no rule applies.
inline std::string lemma_step(const std::string& w) {
    if (auto it = irregular_forms().find(w); it != irregular_forms().end()) return it->second;
    if (w.size() <= 3 || is_stopword(w) || protected_words().contains(w)) return w;

    // plural -> singular
    if (ends_with(w, "ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "sses") || ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "xes") ||
        ends_with(w, "zzes"))
        return w.substr(0, w.size() - 2);
    if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is"))
        return w.substr(0, w.size() - 1);

    // -ing / -ed
    if (ends_with(w, "ied") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "eed")) return w;
    for (std::string_view suffix : {std::string_view("ing"), std::string_view("ed")}) {
        if (!ends_with(w, suffix)) continue;
        std::string stem = w.substr(0, w.size() - suffix.size());
        if (stem.size() < 2 || !has_vowel(stem)) return w;
        restore_stem(stem);
        return stem;
    }
    return w;
}

}  // namespace detail

/// Maps a lowercased token to its canonical form with a fixed rule table
/// (irregular forms, plural stripping, -ing/-ed stripping with stem restoration).
/// Rules are applied to a fixed point, so the result is always idempotent.
inline std::string lemmatize(std::string_view token) {
    std::string current(token);
    // Every non-irregular step strictly shortens the word, so this terminates.
    for (;;) {
        std::string next = detail::lemma_step(current);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

/// Tokenizes and lemmatizes every token in place.
inline std::vector<TokenizedSentence> lemmatized_sentences(std::string_view raw) {
    auto sentences = tokenize(raw);
    for (auto& sentence : sentences)
        for (auto& token : sentence.tokens) token = lemmatize(token);
    return sentences;
}

}  // namespace text
}  // namespace conceptscope
