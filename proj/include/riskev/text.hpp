#pragma once

// Byte-level text helpers shared by the segmenter, the phrase matchers and
// the evaluation tokenizer. Text is UTF-8; only ASCII is case-folded and
// every byte of a non-ASCII code point counts as a word character.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace riskev::text {

constexpr bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

constexpr bool is_ascii_alnum(char c) noexcept {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

/// Alphanumeric for word-boundary purposes.
constexpr bool is_word_byte(char c) noexcept {
    return is_ascii_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
}

constexpr char to_lower(char c) noexcept {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = to_lower(c);
    return out;
}

inline std::string_view trim(std::string_view s) noexcept {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

/// Maximal runs of non-whitespace.
inline std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

/// Lowercased, trimmed, internal whitespace runs collapsed to one space.
inline std::string normalize_phrase(std::string_view s) {
    std::string out;
    for (auto word : split_whitespace(s)) {
        if (!out.empty()) out.push_back(' ');
        out.append(word);
    }
    for (char& c : out) c = to_lower(c);
    return out;
}

/// True when [begin, end) of `s` neither starts nor ends inside a word run.
inline bool on_word_boundaries(std::string_view s, std::size_t begin, std::size_t end) noexcept {
    if (begin >= end || end > s.size()) return false;
    bool start_ok = begin == 0 || !is_word_byte(s[begin - 1]) || !is_word_byte(s[begin]);
    bool end_ok = end == s.size() || !is_word_byte(s[end]) || !is_word_byte(s[end - 1]);
    return start_ok && end_ok;
}

/// Whether `needle` occurs in `haystack` on word boundaries.
inline bool contains_aligned(std::string_view haystack, std::string_view needle) noexcept {
    if (needle.empty()) return false;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + 1)) {
        if (on_word_boundaries(haystack, pos, pos + needle.size())) return true;
    }
    return false;
}

/// Text prepared for case-insensitive phrase matching, with a byte map back to
/// the source so matches can be reported in original offsets.
struct MatchableText {
    std::string text;
    // Per byte of `text`: half-open source range it was produced from.
    std::vector<std::pair<std::size_t, std::size_t>> source;
};

namespace detail {

struct Fold {
    std::string_view utf8;
    char ascii;
};

// Typographic punctuation folded to ASCII so that it neither blocks word
// boundaries nor defeats matches such as "don’t".
inline constexpr std::array<Fold, 8> kFolds{{
    {"\xE2\x80\x98", '\''},  // U+2018
    {"\xE2\x80\x99", '\''},  // U+2019
    {"\xE2\x80\x9C", '"'},   // U+201C
    {"\xE2\x80\x9D", '"'},   // U+201D
    {"\xE2\x80\x93", '-'},   // U+2013
    {"\xE2\x80\x94", '-'},   // U+2014
    {"\xE2\x80\xA6", '.'},   // U+2026
    {"\xC2\xA0", ' '},       // U+00A0
}};

}  // namespace detail

/// Lowercase ASCII, fold typographic punctuation, collapse whitespace runs.
inline MatchableText make_matchable(std::string_view s) {
    MatchableText out;
    out.text.reserve(s.size());
    out.source.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        std::size_t width = 1;
        if (static_cast<unsigned char>(c) >= 0x80) {
            for (const auto& fold : detail::kFolds) {
                if (s.substr(i, fold.utf8.size()) == fold.utf8) {
                    c = fold.ascii;
                    width = fold.utf8.size();
                    break;
                }
            }
        }
        if (is_space(c)) {
            if (!out.text.empty() && out.text.back() == ' ') {
                out.source.back().second = i + width;
            } else {
                out.text.push_back(' ');
                out.source.emplace_back(i, i + width);
            }
        } else {
            out.text.push_back(to_lower(c));
            out.source.emplace_back(i, i + width);
        }
        i += width;
    }
    return out;
}

/// Lowercased word tokens split on every non-word byte.
inline std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string current;
    for (char c : s) {
        if (is_word_byte(c)) {
            current.push_back(to_lower(c));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

/// 64-bit FNV-1a; used for config fingerprints.
inline std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace riskev::text
