#pragma once

// Random input generators shared by the unit tests and the acceptance binary.

#include <riskev/corpus.hpp>
#include <riskev/highlight.hpp>
#include <riskev/lexicon.hpp>
#include <riskev/rng.hpp>
#include <riskev/scoring.hpp>

#include "oracles.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace fixtures {

/// Random valid UTF-8 biased towards delimiters, whitespace and multi-byte code points.
inline std::string random_utf8(riskev::Rng& rng, std::size_t max_len) {
    static constexpr std::array<std::string_view, 16> pieces{
        ".", "!", "?", ":", ";", ",", " ", "  ", "\t", "\n", "\xC3\xA9", "\xE2\x80\x99", "\xE2\x80\xA6",
        "\xF0\x9F\x98\xA2", "\xE4\xBD\xA0", "\xC2\xA0"};
    std::string out;
    const auto n = rng.below(max_len + 1);
    for (std::uint64_t i = 0; i < n; ++i) {
        if (rng.below(3) == 0) {
            out += pieces[rng.below(pieces.size())];
        } else {
            out.push_back(static_cast<char>('a' + rng.below(26)));
        }
    }
    return out;
}

inline const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words{
        "i",    "the",   "dog",   "want",  "to",     "die",   "diet",  "end",    "my",    "life",  "lifeline",
        "kill", "me",    "myself", "suicide", "suicidal", "thoughts", "of", "about", "plan",  "dying", "hang",
        "and",  "today", "never", "wanted", "don't", "live",  "shoot", "killing", "friend", "sad",  "x"};
    return words;
}

/// Sentence made of lexicon phrases interleaved with filler words, random
/// case, random whitespace runs and occasional punctuation.
inline std::string random_lexicon_sentence(riskev::Rng& rng, const riskev::RiskPhraseLexicon& lexicon) {
    const auto phrases = lexicon.all_phrases();
    const auto& filler = filler_words();
    std::vector<std::string> parts;
    const auto n = 1 + rng.below(8);
    for (std::uint64_t i = 0; i < n; ++i) {
        if (rng.below(3) == 0) {
            parts.push_back(phrases[rng.below(phrases.size())]);
        } else {
            parts.push_back(filler[rng.below(filler.size())]);
        }
    }
    static constexpr std::array<std::string_view, 6> gaps{" ", " ", "  ", "\t", " \n ", ", "};
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += gaps[rng.below(gaps.size())];
        std::string p = parts[i];
        if (rng.below(4) == 0) {
            std::string widened;
            for (char c : p) widened += (c == ' ' && rng.below(2) == 0) ? std::string("  ") : std::string(1, c);
            p = widened;
        }
        for (char& c : p)
            if (rng.below(5) == 0 && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        // glue a suffix now and then so boundaries are exercised
        if (rng.below(6) == 0) p += "s";
        out += p;
    }
    if (rng.below(2) == 0) out += ".";
    return out;
}

inline std::string words_of(std::size_t n, std::string_view word = "w") {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) out.push_back(' ');
        out.append(word);
    }
    return out;
}

inline riskev::ScoredSentence scored(std::string text, double p_risk, double p_negative, std::size_t index = 0) {
    riskev::ScoredSentence s;
    s.sentence.post_id = "p";
    s.sentence.index = index;
    s.sentence.text = std::move(text);
    s.sentence.char_end = s.sentence.text.size();
    s.risk.p_risk = p_risk;
    s.sentiment = riskev::SentimentScore{p_negative, 1.0 - p_negative, 0.0};
    s.risk_positive = p_risk >= riskev::kDefaultRiskThreshold;
    return s;
}

}  // namespace fixtures

namespace fixtures {

struct HighlightInstance {
    std::vector<riskev::ScoredSentence> scored;
    std::vector<oracle::Item> items;
};

/// Up to `max_sentences` sentences of 1..max_words words. p_negative is drawn
/// from a coarse grid so that ties occur; about one sentence in seven is
/// risk-positive at threshold 0.5.
inline HighlightInstance random_highlight_instance(riskev::Rng& rng, std::size_t max_sentences = 20,
                                                   std::size_t max_words = 20) {
    HighlightInstance inst;
    const auto n = rng.below(max_sentences + 1);
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto words = 1 + rng.below(max_words);
        const double p_risk = rng.below(7) == 0 ? 0.5 + 0.5 * rng.uniform() : 0.49 * rng.uniform();
        const double p_neg = static_cast<double>(rng.below(9)) / 8.0;
        inst.scored.push_back(scored(words_of(words, "w" + std::to_string(i)), p_risk, p_neg, i));
        inst.items.push_back(oracle::Item{words, p_risk, p_neg});
    }
    return inst;
}

}  // namespace fixtures

namespace fixtures {

struct CandidateCase {
    std::string_view raw;
    std::vector<std::string> words;  // expected tokens after marker stripping
};

/// Generator-style outputs of at most 8 words with their hand-cleaned tokens.
inline const std::vector<CandidateCase>& candidate_suite() {
    static const std::vector<CandidateCase> suite{
        {"", {}},
        {"a", {"a"}},
        {"a b", {"a", "b"}},
        {"a b c", {"a", "b", "c"}},
        {"a b c d", {"a", "b", "c", "d"}},
        {"one two three four five", {"one", "two", "three", "four", "five"}},
        {"1 2 3 4 5 6", {"1", "2", "3", "4", "5", "6"}},
        {"a b c d e f g h", {"a", "b", "c", "d", "e", "f", "g", "h"}},
        {"* want to die, * end my life", {"want", "to", "die", "end", "my", "life"}},
        {"1. want to die 2. end my life", {"want", "to", "die", "end", "my", "life"}},
        {"1) hopeless 2) alone", {"hopeless", "alone"}},
        {"**bold** words here", {"bold", "words", "here"}},
        {"Want To DIE", {"want", "to", "die"}},
        {"  spaced\t\tout \n words  ", {"spaced", "out", "words"}},
        {"a, b, c, d", {"a", "b", "c", "d"}},
        {"* * * lonely", {"lonely"}},
        {"12. twelve items listed", {"twelve", "items", "listed"}},
        {"x y z x y z", {"x", "y", "z", "x", "y", "z"}},
        {"repeat repeat repeat repeat", {"repeat", "repeat", "repeat", "repeat"}},
        {"don't want to live", {"don't", "want", "to", "live"}},
        {"don\xE2\x80\x99t want to live", {"don't", "want", "to", "live"}},
        {"*, ,* a b", {"a", "b"}},
        {"3.5 pills a day", {"3.5", "pills", "a", "day"}},
        {"kill myself. tonight maybe", {"kill", "myself.", "tonight", "maybe"}},
        {"- dash item here", {"-", "dash", "item", "here"}},
        {"1.\n2.\n3.", {}},
        {"*a *b *c", {"a", "b", "c"}},
        {"a,b c", {"a,b", "c"}},
        {"End My Life, Kill Myself", {"end", "my", "life", "kill", "myself"}},
        {"I feel so empty and alone today", {"i", "feel", "so", "empty", "and", "alone", "today"}},
    };
    return suite;
}

}  // namespace fixtures
