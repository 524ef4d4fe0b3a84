#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskev/corpus.hpp"
#include "riskev/error.hpp"
#include "riskev/lexicon.hpp"
#include "riskev/text.hpp"

namespace riskev {

struct SummaryParts {
    std::string opening;
    std::optional<std::string> frequency;
    std::optional<std::string> dictionary;
    std::optional<std::string> generative;
};

inline std::string opening_summary(RiskLevel level) {
    switch (level) {
        case RiskLevel::low: return "This person is at low risk of suicide.";
        case RiskLevel::moderate: return "This person is at moderate risk of suicide.";
        case RiskLevel::high: return "This person is at high risk of suicide.";
        case RiskLevel::unknown: break;
    }
    throw InputError("opening summary needs a known risk level");
}

/// Sentence describing how many risk sentences the user wrote; absent for zero.
inline std::optional<std::string> frequency_summary(std::size_t n_risk_sentences) {
    switch (n_risk_sentences) {
        case 0: return std::nullopt;
        case 1: return "This person made a post implying suicide.";
        case 2: return "This person made multiple posts implying suicide.";
        default: return "This person made lots of posts implying suicide.";
    }
}

/// "a", "a and b", "a, b and c"
inline std::string join_phrases(std::span<const std::string> phrases) {
    std::string out;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        if (i > 0) out += (i + 1 == phrases.size()) ? " and " : ", ";
        out += phrases[i];
    }
    return out;
}

/// One sentence per table row with at least one phrase found in the user's
/// sentences: "<prefix> <phrases>." with phrases in table order.
inline std::optional<std::string> dictionary_summary(std::span<const Sentence> user_sentences,
                                                     const SummaryPhraseTable& table = SummaryPhraseTable::default_table()) {
    std::vector<std::string> normalized;
    normalized.reserve(user_sentences.size());
    for (const auto& s : user_sentences) normalized.push_back(text::make_matchable(s.text).text);

    std::string out;
    for (const auto& row : table.rows()) {
        std::vector<std::string> found;
        for (const auto& phrase : row.phrases) {
            for (const auto& sentence : normalized) {
                if (text::contains_aligned(sentence, phrase)) {
                    found.push_back(phrase);
                    break;
                }
            }
        }
        if (found.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += row.prefix + " " + join_phrases(found) + ".";
    }
    if (out.empty()) return std::nullopt;
    return out;
}

/// Present parts joined by single spaces: opening, frequency, dictionary, generative.
inline std::string assemble_summary(const SummaryParts& parts) {
    if (parts.opening.empty()) throw InputError("summary needs an opening");
    std::string out = parts.opening;
    for (const auto* part : {&parts.frequency, &parts.dictionary, &parts.generative}) {
        if (part->has_value() && !(*part)->empty()) {
            out.push_back(' ');
            out += **part;
        }
    }
    while (!out.empty() && text::is_space(out.back())) out.pop_back();
    return out;
}

}  // namespace riskev
