#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "riskev/error.hpp"
#include "riskev/text.hpp"

namespace riskev {

struct PhraseMatch {
    std::string phrase;   // lexicon form
    std::string surface;  // text as it appears in the sentence
    int group_id = 0;
    std::size_t char_start = 0;
    std::size_t char_end = 0;

    friend bool operator==(const PhraseMatch&, const PhraseMatch&) = default;
};

/// Case-insensitive multi-phrase matcher. Phrases are stored normalized
/// (lowercase, single-spaced); a space in a phrase matches any whitespace run
/// in the text. A match may not start or end inside a word run, and
/// overlapping matches are all reported.
class PhraseMatcher {
public:
    PhraseMatcher() { nodes_.emplace_back(); }

    /// Returns false if the normalized phrase was already present.
    bool add(std::string_view phrase, int group_id) {
        std::string norm = text::normalize_phrase(phrase);
        if (norm.empty()) throw InputError("empty phrase");
        std::size_t node = 0;
        for (char c : norm) {
            auto it = nodes_[node].next.find(c);
            if (it == nodes_[node].next.end()) {
                nodes_.emplace_back();
                it = nodes_[node].next.emplace(c, nodes_.size() - 1).first;
            }
            node = it->second;
        }
        if (nodes_[node].terminal >= 0) return false;
        nodes_[node].terminal = static_cast<int>(phrases_.size());
        phrases_.push_back(Entry{std::move(norm), group_id});
        return true;
    }

    std::size_t size() const noexcept { return phrases_.size(); }

    /// Matches ordered by (char_start, char_end).
    std::vector<PhraseMatch> find_all(std::string_view sentence) const {
        std::vector<PhraseMatch> out;
        const auto m = text::make_matchable(sentence);
        const std::string& t = m.text;
        for (std::size_t s = 0; s < t.size(); ++s) {
            if (s > 0 && text::is_word_byte(t[s - 1]) && text::is_word_byte(t[s])) continue;
            std::size_t node = 0;
            for (std::size_t e = s; e < t.size(); ++e) {
                auto it = nodes_[node].next.find(t[e]);
                if (it == nodes_[node].next.end()) break;
                node = it->second;
                const int term = nodes_[node].terminal;
                if (term >= 0 && text::on_word_boundaries(t, s, e + 1)) {
                    const auto& entry = phrases_[static_cast<std::size_t>(term)];
                    std::size_t begin = m.source[s].first;
                    std::size_t end = m.source[e].second;
                    out.push_back(PhraseMatch{entry.phrase, std::string(sentence.substr(begin, end - begin)),
                                              entry.group_id, begin, end});
                }
            }
        }
        return out;
    }

    bool matches_any(std::string_view sentence) const { return !find_all(sentence).empty(); }

private:
    struct Node {
        std::map<char, std::size_t> next;
        int terminal = -1;
    };
    struct Entry {
        std::string phrase;
        int group_id;
    };
    std::vector<Node> nodes_;
    std::vector<Entry> phrases_;
};

struct PhraseGroup {
    int group_id = 0;
    std::vector<std::string> phrases;

    friend bool operator==(const PhraseGroup&, const PhraseGroup&) = default;
};

/// Default risk phrase list, one group per line of the clinician dictionary.
/// "suicide thoughts" is listed twice in group 11 of the source list; it is
/// kept once here.
inline constexpr std::string_view kDefaultRiskLexicon = R"(# 1
attempt suicide
attempted suicide
attempting suicide
attempts of suicide
suicide attempt
suicide attempts
# 2
commit suicide
committed suicide
committing suicide
# 3
consider suicide
considered suicide
considering suicide
# 4
want to die
wanted to die
don't want to live
# 5
end my life
# 6
hang myself
hanging myself
myself hanging
# 7
kill me
kill myself
killed myself
killing me
killing myself
# 8
means of suicide
ways of dying
# 9
shoot me
shooting me
shoot myself
shooting myself
# 10
suicide plan
plan suicide
# 11
suicide thoughts
think about suicide
thinking about suicide
thinking of suicide
thought of suicide
thoughts of suicide
suicidal thoughts
)";

/// Grouped risk phrases used for weak labeling and the lexicon scorer.
class RiskPhraseLexicon {
public:
    RiskPhraseLexicon() = default;

    explicit RiskPhraseLexicon(std::vector<PhraseGroup> groups) : groups_(std::move(groups)) {
        std::unordered_set<int> ids;
        for (auto& group : groups_) {
            if (group.group_id <= 0) throw InputError("lexicon group ids must be positive");
            if (!ids.insert(group.group_id).second)
                throw InputError("duplicate lexicon group " + std::to_string(group.group_id));
            if (group.phrases.empty())
                throw InputError("lexicon group " + std::to_string(group.group_id) + " has no phrases");
            for (auto& phrase : group.phrases) {
                phrase = text::normalize_phrase(phrase);
                if (!matcher_.add(phrase, group.group_id))
                    throw InputError("duplicate lexicon phrase \"" + phrase + "\"");
            }
        }
    }

    /// Format: "# <group_id>" header lines, then one phrase per line.
    static RiskPhraseLexicon parse(std::istream& in, const std::string& source = "lexicon") {
        std::vector<PhraseGroup> groups;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto body = text::trim(line);
            if (body.empty()) continue;
            if (body.front() == '#') {
                std::istringstream header{std::string(body.substr(1))};
                int id = 0;
                if (!(header >> id))
                    throw InputError(source + ":" + std::to_string(line_no) + ": group header needs an id");
                groups.push_back(PhraseGroup{id, {}});
            } else {
                if (groups.empty())
                    throw InputError(source + ":" + std::to_string(line_no) + ": phrase before first group header");
                groups.back().phrases.emplace_back(body);
            }
        }
        return RiskPhraseLexicon(std::move(groups));
    }

    static RiskPhraseLexicon load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InputError("cannot open lexicon file: " + path);
        return parse(in, path);
    }

    static const RiskPhraseLexicon& default_lexicon() {
        static const RiskPhraseLexicon lexicon = [] {
            std::istringstream in{std::string(kDefaultRiskLexicon)};
            return parse(in, "default risk lexicon");
        }();
        return lexicon;
    }

    const std::vector<PhraseGroup>& groups() const noexcept { return groups_; }
    const PhraseMatcher& matcher() const noexcept { return matcher_; }

    /// Every phrase in group order.
    std::vector<std::string> all_phrases() const {
        std::vector<std::string> out;
        for (const auto& group : groups_) out.insert(out.end(), group.phrases.begin(), group.phrases.end());
        return out;
    }

    std::vector<PhraseMatch> match(std::string_view sentence) const { return matcher_.find_all(sentence); }

private:
    std::vector<PhraseGroup> groups_;
    PhraseMatcher matcher_;
};

inline std::vector<PhraseMatch> match_risk_phrases(std::string_view sentence,
                                                   const RiskPhraseLexicon& lexicon = RiskPhraseLexicon::default_lexicon()) {
    return lexicon.match(sentence);
}

inline constexpr std::string_view kRiskSummaryPrefix = "This person implies suicide such as";

inline constexpr std::string_view kDefaultSummaryPhrases = R"(# This person feels
pain
anxious
sad
angry
agitated
trapped
hopeless
empty
guilt
shame
helpless
worthless
enraged
alone
isolated
failure
# This person is dealing with issues with
friend
girlfriend
boyfriend
family
brother
sister
father
mother
# This person has a problem of
eating
money
drug
alcohol
# This person is struggling with
depression
trauma
# This person is experiencing
bullying
abused
raped
)";

struct SummaryRow {
    std::string prefix;
    std::vector<std::string> phrases;

    friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

/// Prefix/phrase rows for the dictionary summary, in emission order.
class SummaryPhraseTable {
public:
    SummaryPhraseTable() = default;

    explicit SummaryPhraseTable(std::vector<SummaryRow> rows) : rows_(std::move(rows)) {
        std::unordered_set<std::string> prefixes;
        for (auto& row : rows_) {
            if (!prefixes.insert(row.prefix).second)
                throw InputError("duplicate summary prefix \"" + row.prefix + "\"");
            if (row.phrases.empty()) throw InputError("summary row \"" + row.prefix + "\" has no phrases");
            for (auto& phrase : row.phrases) phrase = text::normalize_phrase(phrase);
        }
    }

    /// Format: "# <prefix>" header lines, then one phrase per line.
    static SummaryPhraseTable parse(std::istream& in, const std::string& source = "summary phrases") {
        std::vector<SummaryRow> rows;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto body = text::trim(line);
            if (body.empty()) continue;
            if (body.front() == '#') {
                auto prefix = text::trim(body.substr(1));
                if (prefix.empty())
                    throw InputError(source + ":" + std::to_string(line_no) + ": empty prefix header");
                rows.push_back(SummaryRow{std::string(prefix), {}});
            } else {
                if (rows.empty())
                    throw InputError(source + ":" + std::to_string(line_no) + ": phrase before first prefix header");
                rows.back().phrases.emplace_back(body);
            }
        }
        return SummaryPhraseTable(std::move(rows));
    }

    /// Table from a phrase file plus the synthetic risk row appended last.
    static SummaryPhraseTable load(const std::string& path, const RiskPhraseLexicon& risk) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InputError("cannot open summary phrase file: " + path);
        return parse(in, path).with_risk_row(risk);
    }

    static const SummaryPhraseTable& default_table() {
        static const SummaryPhraseTable table = [] {
            std::istringstream in{std::string(kDefaultSummaryPhrases)};
            return parse(in, "default summary phrases").with_risk_row(RiskPhraseLexicon::default_lexicon());
        }();
        return table;
    }

    SummaryPhraseTable with_risk_row(const RiskPhraseLexicon& risk) const {
        auto rows = rows_;
        rows.push_back(SummaryRow{std::string(kRiskSummaryPrefix), risk.all_phrases()});
        return SummaryPhraseTable(std::move(rows));
    }

    const std::vector<SummaryRow>& rows() const noexcept { return rows_; }

private:
    std::vector<SummaryRow> rows_;
};

}  // namespace riskev
