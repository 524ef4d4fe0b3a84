#include <gtest/gtest.h>

#include <riskev/summary.hpp>

using namespace riskev;

namespace {

std::vector<Sentence> sentences(std::initializer_list<const char*> texts) {
    std::vector<Sentence> out;
    for (const auto* t : texts) out.push_back(Sentence{"p", out.size(), t, 0, std::string_view(t).size()});
    return out;
}

}  // namespace

TEST(Opening, AllLevels) {
    EXPECT_EQ(opening_summary(RiskLevel::low), "This person is at low risk of suicide.");
    EXPECT_EQ(opening_summary(RiskLevel::moderate), "This person is at moderate risk of suicide.");
    EXPECT_EQ(opening_summary(RiskLevel::high), "This person is at high risk of suicide.");
    EXPECT_THROW(opening_summary(RiskLevel::unknown), InputError);
}

TEST(Frequency, Templates) {
    EXPECT_FALSE(frequency_summary(0).has_value());
    EXPECT_EQ(frequency_summary(1), "This person made a post implying suicide.");
    EXPECT_EQ(frequency_summary(2), "This person made multiple posts implying suicide.");
    for (std::size_t n : {3u, 4u, 5u, 100u}) EXPECT_EQ(frequency_summary(n), "This person made lots of posts implying suicide.");
}

TEST(JoinPhrases, Forms) {
    std::vector<std::string> v{"a", "b", "c"};
    EXPECT_EQ(join_phrases(std::span(v).first(0)), "");
    EXPECT_EQ(join_phrases(std::span(v).first(1)), "a");
    EXPECT_EQ(join_phrases(std::span(v).first(2)), "a and b");
    EXPECT_EQ(join_phrases(v), "a, b and c");
}

TEST(Dictionary, HopelessAndAlone) {
    auto s = sentences({"I feel so alone.", "Everything is hopeless"});
    EXPECT_EQ(dictionary_summary(s), "This person feels hopeless and alone.");
}

TEST(Dictionary, SyntheticRiskRow) {
    EXPECT_EQ(dictionary_summary(sentences({"I want to die"})), "This person implies suicide such as want to die.");
}

TEST(Dictionary, NoMatchIsAbsent) {
    EXPECT_FALSE(dictionary_summary(sentences({"Lovely weather today."})).has_value());
    EXPECT_FALSE(dictionary_summary({}).has_value());
}

TEST(Dictionary, RowsInTableOrderAndBoundaryAware) {
    auto s = sentences({"My mother took my money.", "I am sad, Sadly.", "painting is fun"});
    EXPECT_EQ(dictionary_summary(s),
              "This person feels sad. This person is dealing with issues with mother. "
              "This person has a problem of money.");
}

TEST(Dictionary, DuplicateSentencesDoNotChangeOutput) {
    auto once = sentences({"I am sad and alone", "my family"});
    auto twice = sentences({"I am sad and alone", "my family", "I am sad and alone", "my family"});
    EXPECT_EQ(dictionary_summary(once), dictionary_summary(twice));
}

TEST(Assemble, OpeningOnly) {
    EXPECT_EQ(assemble_summary({"This person is at low risk of suicide.", {}, {}, {}}),
              "This person is at low risk of suicide.");
}

TEST(Assemble, AllPartsInOrder) {
    SummaryParts p{"O.", "F.", "D.", "G."};
    EXPECT_EQ(assemble_summary(p), "O. F. D. G.");
}

TEST(Assemble, GenerativePassThroughAndTrailingSpace) {
    std::string gen;
    for (int i = 0; i < 300; ++i) gen += "word ";
    auto out = assemble_summary({"O.", {}, {}, gen});
    gen.pop_back();
    EXPECT_EQ(out, "O. " + gen);
    EXPECT_FALSE(text::is_space(out.back()));
}

TEST(Assemble, StartsWithOpeningAndHasEachPartOnce) {
    SummaryParts p{opening_summary(RiskLevel::high), frequency_summary(3), dictionary_summary(sentences({"sad"})), {}};
    auto out = assemble_summary(p);
    EXPECT_EQ(out.rfind(p.opening, 0), 0u);
    for (const auto* part : {&*p.frequency, &*p.dictionary}) {
        auto first = out.find(*part);
        ASSERT_NE(first, std::string::npos);
        EXPECT_EQ(out.find(*part, first + 1), std::string::npos);
    }
}

TEST(Assemble, NeedsOpening) { EXPECT_THROW(assemble_summary({}), InputError); }
