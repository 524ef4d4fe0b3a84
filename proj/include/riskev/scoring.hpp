#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "riskev/baseline_model.hpp"
#include "riskev/corpus.hpp"
#include "riskev/error.hpp"
#include "riskev/lexicon.hpp"
#include "riskev/text.hpp"

namespace riskev {

struct RiskScore {
    double p_risk = 0.0;
};

struct SentimentScore {
    double p_negative = 0.0;
    double p_neutral = 1.0;
    double p_positive = 0.0;
};

struct ScoredSentence {
    Sentence sentence;
    RiskScore risk;
    SentimentScore sentiment;
    bool risk_positive = false;
};

inline constexpr double kDefaultRiskThreshold = 0.5;

/// Sentence-level suicide-risk probability.
class RiskScorer {
public:
    virtual ~RiskScorer() = default;
    /// One score per text, order preserved.
    virtual std::vector<RiskScore> score_risk(std::span<const std::string> texts) const = 0;
};

/// Sentence-level negative/neutral/positive distribution.
class SentimentScorer {
public:
    virtual ~SentimentScorer() = default;
    virtual std::vector<SentimentScore> score_sentiment(std::span<const std::string> texts) const = 0;
};

inline std::vector<std::string> sentence_texts(std::span<const Sentence> sentences) {
    std::vector<std::string> texts;
    texts.reserve(sentences.size());
    for (const auto& s : sentences) texts.push_back(s.text);
    return texts;
}

inline std::vector<RiskScore> score_risk(const RiskScorer& scorer, std::span<const Sentence> sentences) {
    if (sentences.empty()) return {};
    return scorer.score_risk(sentence_texts(sentences));
}

inline std::vector<SentimentScore> score_sentiment(const SentimentScorer& scorer, std::span<const Sentence> sentences) {
    if (sentences.empty()) return {};
    return scorer.score_sentiment(sentence_texts(sentences));
}

/// Attach risk and sentiment to each sentence; risk_positive iff p_risk >= threshold.
inline std::vector<ScoredSentence> score_sentences(const RiskScorer& risk, const SentimentScorer& sentiment,
                                                   std::span<const Sentence> sentences,
                                                   double threshold = kDefaultRiskThreshold) {
    auto risks = score_risk(risk, sentences);
    auto sentiments = score_sentiment(sentiment, sentences);
    if (risks.size() != sentences.size() || sentiments.size() != sentences.size())
        throw Error("scorer returned a misaligned result");
    std::vector<ScoredSentence> out;
    out.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i)
        out.push_back(ScoredSentence{sentences[i], risks[i], sentiments[i], risks[i].p_risk >= threshold});
    return out;
}

/// Any risk-lexicon hit scores 1.0; otherwise the n-gram model decides, or
/// 0.0 when no model is loaded. The dictionary is high precision and the model
/// covers what it misses.
class LexiconBaselineScorer final : public RiskScorer {
public:
    explicit LexiconBaselineScorer(const RiskPhraseLexicon& lexicon, std::optional<BaselineRiskModel> model = std::nullopt)
        : lexicon_(&lexicon), model_(std::move(model)) {}

    std::vector<RiskScore> score_risk(std::span<const std::string> texts) const override {
        std::vector<RiskScore> out;
        out.reserve(texts.size());
        for (const auto& t : texts) {
            if (lexicon_->matcher().matches_any(t)) {
                out.push_back({1.0});
            } else {
                out.push_back({model_ ? model_->predict(t) : 0.0});
            }
        }
        return out;
    }

    const std::optional<BaselineRiskModel>& model() const noexcept { return model_; }

private:
    const RiskPhraseLexicon* lexicon_;
    std::optional<BaselineRiskModel> model_;
};

inline constexpr std::string_view kDefaultValenceLexicon = R"(# negative
abandoned
abused
afraid
agitated
alone
angry
anxiety
anxious
ashamed
awful
bad
broken
crying
dead
depressed
depression
desperate
die
dying
empty
enraged
exhausted
fail
failed
failure
fear
guilt
guilty
hate
hated
helpless
hopeless
horrible
hurt
hurts
isolated
kill
lonely
lost
miserable
numb
pain
painful
sad
scared
shame
sick
suffer
suffering
suicidal
suicide
terrible
tired
trapped
ugly
unhappy
upset
useless
worse
worst
worthless
# positive
amazing
awesome
beautiful
better
calm
enjoy
enjoyed
excited
fine
fun
glad
good
grateful
great
happy
hope
hopeful
joy
kind
laugh
love
loved
lucky
nice
peace
proud
relaxed
safe
smile
strong
thank
thanks
wonderful
)";

/// Word-list sentiment stand-in for the neural sentiment model. Suitable for
/// exercising the pipeline, not for sentiment claims.
///
/// p_negative = logistic(k * (neg_fraction - m)); the remainder is split
/// between positive and neutral with positive share logistic(k * (pos_fraction - m)),
/// or zero when the sentence has no positive words.
class ValenceSentimentScorer final : public SentimentScorer {
public:
    static constexpr double kSteepness = 10.0;
    static constexpr double kMidpoint = 0.15;

    ValenceSentimentScorer(std::unordered_set<std::string> negative, std::unordered_set<std::string> positive)
        : negative_(std::move(negative)), positive_(std::move(positive)) {}

    /// Format: "# negative" / "# positive" section headers, one word per line.
    static ValenceSentimentScorer parse(std::istream& in, const std::string& source = "valence lexicon") {
        std::unordered_set<std::string> neg, pos;
        std::unordered_set<std::string>* current = nullptr;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto body = text::trim(line);
            if (body.empty()) continue;
            if (body.front() == '#') {
                auto section = text::trim(body.substr(1));
                if (section == "negative") {
                    current = &neg;
                } else if (section == "positive") {
                    current = &pos;
                } else {
                    throw InputError(source + ":" + std::to_string(line_no) + ": unknown section");
                }
            } else {
                if (!current) throw InputError(source + ":" + std::to_string(line_no) + ": word before section header");
                current->insert(text::to_lower(body));
            }
        }
        return ValenceSentimentScorer(std::move(neg), std::move(pos));
    }

    static ValenceSentimentScorer load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InputError("cannot open valence lexicon: " + path);
        return parse(in, path);
    }

    static const ValenceSentimentScorer& default_scorer() {
        static const ValenceSentimentScorer scorer = [] {
            std::istringstream in{std::string(kDefaultValenceLexicon)};
            return parse(in, "default valence lexicon");
        }();
        return scorer;
    }

    SentimentScore score_one(std::string_view sentence) const {
        auto tokens = text::word_tokens(sentence);
        std::size_t neg = 0, pos = 0;
        for (const auto& t : tokens) {
            neg += negative_.count(t);
            pos += positive_.count(t);
        }
        const double total = tokens.empty() ? 1.0 : static_cast<double>(tokens.size());
        const double p_neg = squash(static_cast<double>(neg) / total);
        const double pos_share = pos == 0 ? 0.0 : squash(static_cast<double>(pos) / total);
        const double rest = 1.0 - p_neg;
        const double p_pos = rest * pos_share;
        return SentimentScore{p_neg, rest - p_pos, p_pos};
    }

    std::vector<SentimentScore> score_sentiment(std::span<const std::string> texts) const override {
        std::vector<SentimentScore> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(score_one(t));
        return out;
    }

private:
    static double squash(double fraction) { return 1.0 / (1.0 + std::exp(-kSteepness * (fraction - kMidpoint))); }

    std::unordered_set<std::string> negative_;
    std::unordered_set<std::string> positive_;
};

}  // namespace riskev
