#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskev/corpus.hpp"
#include "riskev/error.hpp"
#include "riskev/generator.hpp"
#include "riskev/scoring.hpp"
#include "riskev/text.hpp"

namespace riskev {

/// How sentiment-ranked and term-matched sentences fill the word budget.
enum class FillPolicy {
    stop_at_first_overflow,  // stop at the first sentence that does not fit
    skip_and_continue,       // skip it and keep trying later ones
};

struct HighlightConfig {
    double risk_threshold = kDefaultRiskThreshold;
    std::size_t word_budget = 300;
    std::size_t min_candidate_words = 3;
    FillPolicy fill = FillPolicy::stop_at_first_overflow;

    void validate() const {
        if (word_budget == 0) throw InputError("word_budget must be positive");
        if (min_candidate_words == 0) throw InputError("min_candidate_words must be at least 1");
    }
};

enum class Provenance { risk, sentiment, llm_terms };

inline std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::risk: return "risk";
        case Provenance::sentiment: return "sentiment";
        case Provenance::llm_terms: return "llm_terms";
    }
    return "risk";
}

inline std::size_t word_count(std::string_view s) { return text::split_whitespace(s).size(); }

struct HighlightEntry {
    Sentence sentence;
    Provenance provenance = Provenance::risk;
    std::size_t words = 0;
    double p_risk = 0.0;
    double p_negative = 0.0;
};

struct HighlightSet {
    std::string user_id;
    std::vector<HighlightEntry> entries;
    std::size_t total_words = 0;
};

struct HighlightResult {
    HighlightSet highlights;
    std::vector<std::string> warnings;
};

struct TermCandidateSet {
    std::string source_text;
    std::set<std::string> candidates;
};

namespace detail {

// Length of a "12." / "3)" list-number prefix, or 0.
inline std::size_t numbering_prefix(std::string_view tok) {
    std::size_t i = 0;
    while (i < tok.size() && tok[i] >= '0' && tok[i] <= '9') ++i;
    if (i == 0 || i >= tok.size() || (tok[i] != '.' && tok[i] != ')')) return 0;
    // "3.5" is a number, not a list marker
    if (i + 1 < tok.size() && tok[i + 1] >= '0' && tok[i + 1] <= '9') return 0;
    return i + 1;
}

/// Strip asterisk bullets, list numbering and comma separators from one
/// generator token. Returns empty when nothing is left.
inline std::string clean_generated_token(std::string_view tok) {
    bool changed = true;
    while (changed && !tok.empty()) {
        changed = false;
        while (!tok.empty() && (tok.front() == '*' || tok.front() == ',')) {
            tok.remove_prefix(1);
            changed = true;
        }
        while (!tok.empty() && (tok.back() == ',' || tok.back() == '*')) {
            tok.remove_suffix(1);
            changed = true;
        }
        if (auto n = numbering_prefix(tok); n > 0) {
            tok.remove_prefix(n);
            changed = true;
        }
    }
    return text::to_lower(tok);
}

}  // namespace detail

/// Every window of at least `min_words` consecutive words of the generator
/// output, after list markers are stripped, lowercased and single-spaced.
inline TermCandidateSet phrase_candidates(std::string_view generator_output, std::size_t min_words) {
    if (min_words == 0) throw InputError("min_words must be at least 1");
    TermCandidateSet out;
    out.source_text = std::string(generator_output);
    std::vector<std::string> words;
    const auto matchable = text::make_matchable(generator_output);
    for (auto tok : text::split_whitespace(matchable.text)) {
        auto cleaned = detail::clean_generated_token(tok);
        if (!cleaned.empty()) words.push_back(std::move(cleaned));
    }
    const std::size_t n = words.size();
    for (std::size_t width = min_words; width <= n; ++width) {
        for (std::size_t start = 0; start + width <= n; ++start) {
            std::string window = words[start];
            for (std::size_t k = start + 1; k < start + width; ++k) {
                window.push_back(' ');
                window.append(words[k]);
            }
            out.candidates.insert(std::move(window));
        }
    }
    return out;
}

/// Indices of sentences whose normalized text contains a candidate on word
/// boundaries, in document order.
inline std::vector<std::size_t> match_candidate_indices(std::span<const Sentence> sentences,
                                                        const TermCandidateSet& candidates) {
    std::vector<std::size_t> out;
    if (candidates.candidates.empty()) return out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto norm = text::make_matchable(sentences[i].text).text;
        for (const auto& cand : candidates.candidates) {
            if (text::contains_aligned(norm, cand)) {
                out.push_back(i);
                break;
            }
        }
    }
    return out;
}

inline std::vector<Sentence> match_candidates(std::span<const Sentence> sentences, const TermCandidateSet& candidates) {
    std::vector<Sentence> out;
    for (auto i : match_candidate_indices(sentences, candidates)) out.push_back(sentences[i]);
    return out;
}

/// Three-stage highlight selection for one user's sentences (document order):
///  1. every sentence with p_risk >= threshold, regardless of budget;
///  2. remaining sentences by p_negative descending (document order on ties)
///     while they fit the word budget;
///  3. if still under budget and a generator is given, sentences containing a
///     phrase candidate from its term output, in document order, under the
///     same fill rule.
/// A generator failure in stage 3 is reported as a warning.
inline HighlightResult extract_highlights(std::string_view user_id, std::span<const ScoredSentence> scored,
                                          std::string_view posts_text, const TextGenerator* generator,
                                          const HighlightConfig& config) {
    config.validate();
    HighlightResult result;
    auto& set = result.highlights;
    set.user_id = std::string(user_id);
    std::vector<bool> taken(scored.size(), false);
    std::vector<std::size_t> words(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) words[i] = word_count(scored[i].sentence.text);

    auto take = [&](std::size_t i, Provenance p) {
        taken[i] = true;
        set.total_words += words[i];
        set.entries.push_back(HighlightEntry{scored[i].sentence, p, words[i], scored[i].risk.p_risk,
                                             scored[i].sentiment.p_negative});
    };
    // returns false when filling must stop
    auto offer = [&](std::size_t i, Provenance p) {
        if (set.total_words + words[i] <= config.word_budget) {
            take(i, p);
            return true;
        }
        return config.fill == FillPolicy::skip_and_continue;
    };

    for (std::size_t i = 0; i < scored.size(); ++i)
        if (scored[i].risk.p_risk >= config.risk_threshold) take(i, Provenance::risk);

    std::vector<std::size_t> ranked;
    for (std::size_t i = 0; i < scored.size(); ++i)
        if (!taken[i]) ranked.push_back(i);
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        return scored[a].sentiment.p_negative > scored[b].sentiment.p_negative;
    });
    for (auto i : ranked)
        if (!offer(i, Provenance::sentiment)) break;

    if (set.total_words < config.word_budget && generator != nullptr) {
        std::string raw;
        try {
            raw = generator->generate_terms(posts_text);
        } catch (const std::exception& e) {
            result.warnings.push_back("term generation failed for user " + set.user_id + ": " + e.what());
            return result;
        }
        auto candidates = phrase_candidates(raw, config.min_candidate_words);
        std::vector<Sentence> remaining;
        std::vector<std::size_t> remaining_idx;
        for (std::size_t i = 0; i < scored.size(); ++i) {
            if (taken[i]) continue;
            remaining.push_back(scored[i].sentence);
            remaining_idx.push_back(i);
        }
        for (auto k : match_candidate_indices(remaining, candidates))
            if (!offer(remaining_idx[k], Provenance::llm_terms)) break;
    }
    return result;
}

}  // namespace riskev
