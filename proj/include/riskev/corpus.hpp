#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "riskev/error.hpp"
#include "riskev/text.hpp"

namespace riskev {

/// Expert-assigned risk level of a user.
enum class RiskLevel { low, moderate, high, unknown };

inline std::string_view to_string(RiskLevel level) noexcept {
    switch (level) {
        case RiskLevel::low: return "low";
        case RiskLevel::moderate: return "moderate";
        case RiskLevel::high: return "high";
        case RiskLevel::unknown: return "unknown";
    }
    return "unknown";
}

/// Anything other than low/moderate/high maps to unknown.
inline RiskLevel parse_risk_level(std::string_view s) noexcept {
    if (s == "low") return RiskLevel::low;
    if (s == "moderate") return RiskLevel::moderate;
    if (s == "high") return RiskLevel::high;
    return RiskLevel::unknown;
}

struct Post {
    std::string post_id;
    std::string user_id;
    std::string text;
    std::optional<std::string> timestamp;
};

struct UserTimeline {
    std::string user_id;
    RiskLevel expert_level = RiskLevel::unknown;
    std::vector<Post> posts;
};

/// A sentence of a post. [char_start, char_end) are byte offsets into the
/// post text; `text` is exactly that substring.
struct Sentence {
    std::string post_id;
    std::size_t index = 0;
    std::string text;
    std::size_t char_start = 0;
    std::size_t char_end = 0;

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct SegmentOptions {
    // Commas are clause separators, not sentence boundaries, unless enabled.
    bool split_on_comma = false;
};

constexpr bool is_sentence_delimiter(char c, const SegmentOptions& opts = {}) noexcept {
    return c == '.' || c == '!' || c == '?' || c == ':' || c == ';' || (opts.split_on_comma && c == ',');
}

/// Split a post into sentences on punctuation.
///
/// A sentence starts at the first non-whitespace byte and runs through the
/// next run of delimiters (so "!!" or "?!" close a single sentence), or to the
/// last non-whitespace byte of the text. Whitespace between sentences belongs
/// to no span. Decimal points and abbreviations are not special-cased.
inline std::vector<Sentence> segment_post(std::string_view text, std::string_view post_id = {},
                                          const SegmentOptions& opts = {}) {
    std::vector<Sentence> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && text::is_space(text[i])) ++i;
        if (i == n) break;
        const std::size_t start = i;
        while (i < n && !is_sentence_delimiter(text[i], opts)) ++i;
        while (i < n && is_sentence_delimiter(text[i], opts)) ++i;
        std::size_t end = i;
        while (end > start && text::is_space(text[end - 1])) --end;
        out.push_back(Sentence{std::string(post_id), out.size(),
                               std::string(text.substr(start, end - start)), start, end});
    }
    return out;
}

/// All sentences of a timeline in document order.
inline std::vector<Sentence> segment_timeline(const UserTimeline& timeline, const SegmentOptions& opts = {}) {
    std::vector<Sentence> out;
    for (const auto& post : timeline.posts) {
        auto sentences = segment_post(post.text, post.post_id, opts);
        out.insert(out.end(), std::make_move_iterator(sentences.begin()),
                   std::make_move_iterator(sentences.end()));
    }
    return out;
}

/// Posts concatenated with newlines, as sent to a generator.
inline std::string aggregate_posts(const UserTimeline& timeline) {
    std::string out;
    for (const auto& post : timeline.posts) {
        if (!out.empty()) out.push_back('\n');
        out.append(post.text);
    }
    return out;
}

namespace detail {

inline const std::string& required_string(const nlohmann::json& obj, const char* key,
                                          const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(where + ": missing \"" + key + "\"");
    if (!it->is_string()) throw InputError(where + ": \"" + key + "\" must be a string");
    return it->get_ref<const std::string&>();
}

inline std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key,
                                                  const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw InputError(where + ": \"" + key + "\" must be a string");
    return it->get<std::string>();
}

}  // namespace detail

/// Read a JSONL corpus. Users appear in first-seen order. A user's posts keep
/// input order, except that when every post carries a timestamp they are
/// stably sorted by it (ISO-8601 strings compare chronologically).
inline std::vector<UserTimeline> parse_corpus(std::istream& in, const std::string& source = "corpus") {
    std::vector<UserTimeline> timelines;
    std::unordered_map<std::string, std::size_t> by_user;
    std::unordered_set<std::string> seen_posts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(where + ": malformed JSON (" + e.what() + ")");
        }
        if (!obj.is_object()) throw InputError(where + ": expected a JSON object");
        // meta lines written by the CLI carry provenance, not data
        if (obj.contains("_meta")) continue;

        Post post;
        post.user_id = detail::required_string(obj, "user_id", where);
        post.post_id = detail::required_string(obj, "post_id", where);
        post.text = detail::required_string(obj, "text", where);
        post.timestamp = detail::optional_string(obj, "timestamp", where);
        auto level_str = detail::optional_string(obj, "expert_level", where);

        if (!seen_posts.insert(post.post_id).second)
            throw InputError(where + ": duplicate post_id \"" + post.post_id + "\"");

        auto [it, inserted] = by_user.try_emplace(post.user_id, timelines.size());
        if (inserted) timelines.push_back(UserTimeline{post.user_id, RiskLevel::unknown, {}});
        auto& timeline = timelines[it->second];
        if (level_str) {
            RiskLevel level = parse_risk_level(*level_str);
            if (timeline.expert_level != RiskLevel::unknown && level != RiskLevel::unknown &&
                level != timeline.expert_level)
                throw InputError(where + ": conflicting expert_level for user \"" + post.user_id + "\"");
            if (level != RiskLevel::unknown) timeline.expert_level = level;
        }
        timeline.posts.push_back(std::move(post));
    }

    for (auto& timeline : timelines) {
        bool all_stamped = std::all_of(timeline.posts.begin(), timeline.posts.end(),
                                       [](const Post& p) { return p.timestamp.has_value(); });
        if (all_stamped)
            std::stable_sort(timeline.posts.begin(), timeline.posts.end(),
                             [](const Post& a, const Post& b) { return *a.timestamp < *b.timestamp; });
    }
    return timelines;
}

inline std::vector<UserTimeline> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open corpus file: " + path);
    return parse_corpus(in, path);
}

}  // namespace riskev
