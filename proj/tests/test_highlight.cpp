#include <gtest/gtest.h>

#include <riskev/highlight.hpp>

#include <algorithm>
#include <stdexcept>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace riskev;
using fixtures::scored;
using fixtures::words_of;

namespace {

class FixedGenerator final : public TextGenerator {
public:
    explicit FixedGenerator(std::string terms) : terms_(std::move(terms)) {}
    std::string generate_terms(std::string_view) const override {
        ++calls;
        return terms_;
    }
    std::string generate_summary(std::string_view) const override { return {}; }
    mutable int calls = 0;

private:
    std::string terms_;
};

class FailingGenerator final : public TextGenerator {
public:
    std::string generate_terms(std::string_view) const override { throw std::runtime_error("service down"); }
    std::string generate_summary(std::string_view) const override { return {}; }
};

std::vector<std::string> selected_texts(const HighlightResult& r) {
    std::vector<std::string> out;
    for (const auto& e : r.highlights.entries) out.push_back(e.sentence.text);
    return out;
}

HighlightConfig config(std::size_t budget, FillPolicy fill = FillPolicy::stop_at_first_overflow) {
    HighlightConfig c;
    c.word_budget = budget;
    c.fill = fill;
    return c;
}

std::vector<Sentence> sentences(std::initializer_list<const char*> texts) {
    std::vector<Sentence> out;
    for (const auto* t : texts) out.push_back(Sentence{"p", out.size(), t, 0, std::string_view(t).size()});
    return out;
}

}  // namespace

TEST(WordCount, Examples) {
    EXPECT_EQ(word_count(""), 0u);
    EXPECT_EQ(word_count("I want to die."), 4u);
    EXPECT_EQ(word_count("a  b\tc"), 3u);
}

TEST(PhraseCandidates, AllWindowsOfMinWidth) {
    EXPECT_EQ(phrase_candidates("a b c d", 3).candidates, (std::set<std::string>{"a b c", "b c d", "a b c d"}));
    EXPECT_TRUE(phrase_candidates("a b", 3).candidates.empty());
}

TEST(PhraseCandidates, MarkersStripped) {
    auto c = phrase_candidates("* want to die, * end my life", 3).candidates;
    EXPECT_TRUE(c.count("want to die"));
    EXPECT_TRUE(c.count("end my life"));
    for (const auto& w : c) {
        EXPECT_EQ(w.find('*'), std::string::npos);
        EXPECT_EQ(w.find(','), std::string::npos);
    }
}

TEST(PhraseCandidates, MinWordsMustBePositive) { EXPECT_THROW(phrase_candidates("a b", 0), InputError); }

TEST(PhraseCandidates, ExhaustiveOverSuite) {
    for (const auto& tc : fixtures::candidate_suite()) {
        ASSERT_LE(tc.words.size(), 8u);
        for (std::size_t min = 1; min <= 9; ++min)
            ASSERT_EQ(phrase_candidates(tc.raw, min).candidates, oracle::windows_by_bitmask(tc.words, min))
                << "input: " << tc.raw << " min " << min;
    }
}

TEST(MatchCandidates, Examples) {
    TermCandidateSet c;
    c.candidates = {"want to die"};
    auto s = sentences({"I want to die.", "I want to diet.", "I WANT  to die"});
    auto m = match_candidates(s, c);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].text, "I want to die.");
    EXPECT_EQ(m[1].index, 2u);
    EXPECT_TRUE(match_candidates(s, TermCandidateSet{}).empty());
}

TEST(MatchCandidates, EachSentenceOnce) {
    TermCandidateSet c;
    c.candidates = {"want to die", "to die today"};
    EXPECT_EQ(match_candidates(sentences({"I want to die today"}), c).size(), 1u);
}

TEST(Highlights, StageOneIgnoresBudget) {
    std::vector<ScoredSentence> s{scored(words_of(500), 0.9, 0.1)};
    auto r = extract_highlights("u", s, "", nullptr, config(300));
    ASSERT_EQ(r.highlights.entries.size(), 1u);
    EXPECT_EQ(r.highlights.total_words, 500u);
    EXPECT_EQ(r.highlights.entries[0].provenance, Provenance::risk);
}

TEST(Highlights, StageTwoFillsToBudget) {
    std::vector<ScoredSentence> s;
    for (double p : {0.7, 0.9, 0.6, 0.8}) s.push_back(scored(words_of(100, std::to_string(p)), 0.0, p, s.size()));
    auto r = extract_highlights("u", s, "", nullptr, config(300));
    ASSERT_EQ(r.highlights.entries.size(), 3u);
    EXPECT_EQ(r.highlights.total_words, 300u);
    EXPECT_DOUBLE_EQ(r.highlights.entries[0].p_negative, 0.9);
    EXPECT_DOUBLE_EQ(r.highlights.entries[1].p_negative, 0.8);
    EXPECT_DOUBLE_EQ(r.highlights.entries[2].p_negative, 0.7);
}

TEST(Highlights, StopVersusSkipPolicy) {
    std::vector<ScoredSentence> s{scored(words_of(50, "a"), 0, 0.9, 0), scored(words_of(20, "b"), 0, 0.8, 1),
                                  scored(words_of(5, "c"), 0, 0.7, 2)};
    EXPECT_EQ(extract_highlights("u", s, "", nullptr, config(30)).highlights.total_words, 0u);
    EXPECT_EQ(extract_highlights("u", s, "", nullptr, config(30, FillPolicy::skip_and_continue)).highlights.total_words,
              25u);
}

TEST(Highlights, TiesFollowDocumentOrder) {
    std::vector<ScoredSentence> s;
    for (int i = 0; i < 6; ++i) s.push_back(scored("t" + std::to_string(i), 0, 0.5, static_cast<std::size_t>(i)));
    auto r = extract_highlights("u", s, "", nullptr, config(4));
    EXPECT_EQ(selected_texts(r), (std::vector<std::string>{"t0", "t1", "t2", "t3"}));
}

TEST(Highlights, MatchesGreedyOracle) {
    Rng rng(21);
    for (int i = 0; i < 500; ++i) {
        auto inst = fixtures::random_highlight_instance(rng);
        for (auto fill : {FillPolicy::stop_at_first_overflow, FillPolicy::skip_and_continue}) {
            auto r = extract_highlights("u", inst.scored, "", nullptr, config(60, fill));
            auto expected = oracle::greedy_highlights(inst.items, 60, 0.5, fill == FillPolicy::skip_and_continue);
            std::vector<std::size_t> got;
            for (const auto& e : r.highlights.entries) got.push_back(e.sentence.index);
            ASSERT_EQ(got, expected) << "instance " << i;
        }
    }
}

TEST(Highlights, BudgetInvariant) {
    Rng rng(22);
    for (int i = 0; i < 500; ++i) {
        auto inst = fixtures::random_highlight_instance(rng);
        FixedGenerator gen("w1 w1 w1 w2 w2 w2 w3 w3 w3");
        for (auto fill : {FillPolicy::stop_at_first_overflow, FillPolicy::skip_and_continue}) {
            auto r = extract_highlights("u", inst.scored, "", &gen, config(60, fill));
            std::size_t stage1 = 0, total = 0;
            for (const auto& e : r.highlights.entries) {
                if (e.provenance == Provenance::risk) stage1 += e.words;
                total += e.words;
            }
            ASSERT_EQ(total, r.highlights.total_words);
            if (total > stage1) {
                ASSERT_LE(total, std::max<std::size_t>(60, stage1));
            }
            if (stage1 > 60) {
                ASSERT_EQ(total, stage1);
            }
        }
    }
}

TEST(Highlights, LocalityUnderSkipPolicy) {
    Rng rng(23);
    for (int i = 0; i < 200; ++i) {
        auto inst = fixtures::random_highlight_instance(rng, 12);
        auto cfg = config(60, FillPolicy::skip_and_continue);
        auto base = selected_texts(extract_highlights("u", inst.scored, "", nullptr, cfg));
        for (std::size_t k = 0; k < inst.scored.size(); ++k) {
            if (std::find(base.begin(), base.end(), inst.scored[k].sentence.text) != base.end()) continue;
            auto reduced = inst.scored;
            reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(k));
            ASSERT_EQ(selected_texts(extract_highlights("u", reduced, "", nullptr, cfg)), base);
        }
    }
}

TEST(Highlights, LocalityUnderStopPolicyAwayFromTheOverflow) {
    // Removing the sentence that stopped the fill can let later ones in, so
    // that one is excluded; every other unselected sentence is inert.
    Rng rng(24);
    for (int i = 0; i < 200; ++i) {
        auto inst = fixtures::random_highlight_instance(rng, 12);
        auto cfg = config(60);
        auto base = selected_texts(extract_highlights("u", inst.scored, "", nullptr, cfg));
        std::optional<std::size_t> overflow;
        for (std::size_t k = 0; k < inst.scored.size(); ++k) {
            if (std::find(base.begin(), base.end(), inst.scored[k].sentence.text) != base.end()) continue;
            if (!overflow || inst.items[k].p_negative > inst.items[*overflow].p_negative) overflow = k;
        }
        for (std::size_t k = 0; k < inst.scored.size(); ++k) {
            if (k == overflow || std::find(base.begin(), base.end(), inst.scored[k].sentence.text) != base.end())
                continue;
            auto reduced = inst.scored;
            reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(k));
            ASSERT_EQ(selected_texts(extract_highlights("u", reduced, "", nullptr, cfg)), base);
        }
    }
}

TEST(Highlights, StageThreeAddsMatchedSentences) {
    // stage two takes A and stops at B; stage three finds C through "want to die"
    std::vector<ScoredSentence> s{scored(words_of(10, "a"), 0, 0.9, 0), scored(words_of(20, "b"), 0, 0.5, 1),
                                  scored("I want to die.", 0.2, 0.1, 2)};
    FixedGenerator gen("* want to die");
    auto r = extract_highlights("u", s, "posts", &gen, config(15));
    EXPECT_EQ(gen.calls, 1);
    ASSERT_EQ(r.highlights.entries.size(), 2u);
    EXPECT_EQ(r.highlights.entries[0].provenance, Provenance::sentiment);
    EXPECT_EQ(r.highlights.entries[1].provenance, Provenance::llm_terms);
    EXPECT_EQ(r.highlights.entries[1].sentence.text, "I want to die.");
    EXPECT_EQ(r.highlights.total_words, 14u);
}

TEST(Highlights, StageThreeSkippedWhenBudgetFull) {
    std::vector<ScoredSentence> s{scored(words_of(10, "a"), 0, 0.9, 0), scored("I want to die.", 0.2, 0.1, 1)};
    FixedGenerator gen("want to die");
    auto r = extract_highlights("u", s, "", &gen, config(10));
    EXPECT_EQ(gen.calls, 0);
    EXPECT_EQ(r.highlights.entries.size(), 1u);
}

TEST(Highlights, StageThreeDocumentOrderAndStopRule) {
    std::vector<ScoredSentence> s{scored(words_of(10, "a"), 0, 0.9, 0), scored(words_of(20, "b"), 0, 0.5, 1),
                                  scored("I might end my life.", 0, 0.1, 2), scored("I want to die.", 0, 0.05, 3)};
    FixedGenerator gen("1. want to die 2. end my life");
    auto r = extract_highlights("u", s, "", &gen, config(18));
    EXPECT_EQ(selected_texts(r), (std::vector<std::string>{words_of(10, "a"), "I might end my life."}));
    r = extract_highlights("u", s, "", &gen, config(19));
    EXPECT_EQ(selected_texts(r),
              (std::vector<std::string>{words_of(10, "a"), "I might end my life.", "I want to die."}));
    EXPECT_EQ(r.highlights.entries[2].provenance, Provenance::llm_terms);
}

TEST(Highlights, GeneratorFailureBecomesWarning) {
    std::vector<ScoredSentence> s{scored("I want to die.", 0.9, 0.1, 0), scored(words_of(3), 0.0, 0.5, 1)};
    FailingGenerator gen;
    auto r = extract_highlights("u7", s, "", &gen, config(300));
    EXPECT_EQ(r.highlights.entries.size(), 2u);
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("u7"), std::string::npos);
    EXPECT_NE(r.warnings[0].find("service down"), std::string::npos);
}

TEST(Highlights, DeterministicAndEmptySafe) {
    EXPECT_TRUE(extract_highlights("u", {}, "", nullptr, config(10)).highlights.entries.empty());
    Rng rng(25);
    auto inst = fixtures::random_highlight_instance(rng);
    EXPECT_EQ(selected_texts(extract_highlights("u", inst.scored, "", nullptr, config(60))),
              selected_texts(extract_highlights("u", inst.scored, "", nullptr, config(60))));
    EXPECT_THROW(extract_highlights("u", {}, "", nullptr, config(0)), InputError);
}
