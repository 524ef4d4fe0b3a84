#pragma once

#include <string>
#include <string_view>

namespace riskev {

inline constexpr std::string_view kTermPrompt =
    "The text below implies a risk of suicide. Extract only the necessary and sufficient phrases and "
    "keywords indicating the risk exactly as they appear in the original text. Present the extracted "
    "words in a list format, separated by commas.";

inline constexpr std::string_view kSummaryPrompt = "Please summarize the next post in 300 words";

/// Generative model behind the highlight fallback and the free-text summary
/// part. Implementations apply the prompts above and return raw model text.
/// Must be safe to call concurrently.
class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    virtual std::string generate_terms(std::string_view posts_text) const = 0;
    virtual std::string generate_summary(std::string_view posts_text) const = 0;
};

}  // namespace riskev
