#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "riskev/corpus.hpp"
#include "riskev/error.hpp"
#include "riskev/scoring.hpp"
#include "riskev/text.hpp"

namespace riskev {

/// Tokenization used for similarity scoring: lowercase, split on every
/// non-alphanumeric byte, empties dropped.
inline std::vector<std::string> similarity_tokens(std::string_view s) { return text::word_tokens(s); }

/// Token similarity source for greedy matching. Entry [i][j] is the cosine
/// between candidate token i and reference token j.
class TokenEmbeddingProvider {
public:
    virtual ~TokenEmbeddingProvider() = default;
    virtual std::vector<std::vector<double>> similarity(std::span<const std::string> candidate,
                                                        std::span<const std::string> reference) const = 0;
};

/// Exact-match one-hot embeddings: cosine 1 for identical tokens, else 0.
class OneHotProvider final : public TokenEmbeddingProvider {
public:
    std::vector<std::vector<double>> similarity(std::span<const std::string> candidate,
                                                std::span<const std::string> reference) const override {
        std::vector<std::vector<double>> m(candidate.size(), std::vector<double>(reference.size(), 0.0));
        for (std::size_t i = 0; i < candidate.size(); ++i)
            for (std::size_t j = 0; j < reference.size(); ++j) m[i][j] = candidate[i] == reference[j] ? 1.0 : 0.0;
        return m;
    }
};

/// Static token vectors (whitespace-separated "token v1 ... vd" per line,
/// GloVe style). Vectors are normalized to unit length on load. Tokens absent
/// from the table fall back to exact-match behaviour.
class EmbeddingTableProvider final : public TokenEmbeddingProvider {
public:
    explicit EmbeddingTableProvider(std::unordered_map<std::string, std::vector<double>> table)
        : table_(std::move(table)) {
        for (auto& [token, v] : table_) {
            if (dim_ == 0) dim_ = v.size();
            if (v.size() != dim_ || dim_ == 0) throw InputError("embedding for \"" + token + "\" has the wrong dimension");
            double norm = 0.0;
            for (double x : v) norm += x * x;
            norm = std::sqrt(norm);
            if (!(norm > 0.0) || !std::isfinite(norm)) throw InputError("embedding for \"" + token + "\" is degenerate");
            for (double& x : v) x /= norm;
        }
    }

    static EmbeddingTableProvider load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InputError("cannot open embedding table: " + path);
        std::unordered_map<std::string, std::vector<double>> table;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::istringstream fields(line);
            std::string token;
            if (!(fields >> token)) continue;
            std::vector<double> v;
            for (double x; fields >> x;) v.push_back(x);
            if (!fields.eof()) throw InputError(path + ":" + std::to_string(line_no) + ": bad number");
            table[text::to_lower(token)] = std::move(v);
        }
        return EmbeddingTableProvider(std::move(table));
    }

    std::size_t dimension() const noexcept { return dim_; }

    std::vector<std::vector<double>> similarity(std::span<const std::string> candidate,
                                                std::span<const std::string> reference) const override {
        std::vector<std::vector<double>> m(candidate.size(), std::vector<double>(reference.size(), 0.0));
        for (std::size_t i = 0; i < candidate.size(); ++i) {
            auto a = table_.find(candidate[i]);
            for (std::size_t j = 0; j < reference.size(); ++j) {
                if (candidate[i] == reference[j]) {
                    m[i][j] = 1.0;
                    continue;
                }
                auto b = table_.find(reference[j]);
                if (a == table_.end() || b == table_.end()) continue;
                double dot = 0.0;
                for (std::size_t k = 0; k < dim_; ++k) dot += a->second[k] * b->second[k];
                m[i][j] = dot;
            }
        }
        return m;
    }

private:
    std::unordered_map<std::string, std::vector<double>> table_;
    std::size_t dim_ = 0;
};

struct SimilarityReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool empty_candidate = false;  // precision undefined, reported as 0
    bool empty_reference = false;  // recall undefined, reported as 0
    bool both_empty = false;       // all metrics 1 by convention
};

inline double harmonic_mean(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

/// Greedy token matching: each token is paired with its most similar
/// counterpart. Precision averages over candidate tokens, recall over
/// reference tokens. Similarities are clamped to [0, 1].
inline SimilarityReport greedy_similarity(std::span<const std::string> candidate, std::span<const std::string> reference,
                                          const TokenEmbeddingProvider& provider) {
    SimilarityReport r;
    if (candidate.empty() && reference.empty()) {
        r.precision = r.recall = r.f1 = 1.0;
        r.empty_candidate = r.empty_reference = r.both_empty = true;
        return r;
    }
    r.empty_candidate = candidate.empty();
    r.empty_reference = reference.empty();
    if (r.empty_candidate || r.empty_reference) return r;

    auto sim = provider.similarity(candidate, reference);
    if (sim.size() != candidate.size()) throw Error("embedding provider returned a misaligned matrix");
    std::vector<double> best_for_ref(reference.size(), 0.0);
    double precision_sum = 0.0;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        if (sim[i].size() != reference.size()) throw Error("embedding provider returned a misaligned matrix");
        double best = 0.0;
        for (std::size_t j = 0; j < reference.size(); ++j) {
            double s = std::clamp(sim[i][j], 0.0, 1.0);
            best = std::max(best, s);
            best_for_ref[j] = std::max(best_for_ref[j], s);
        }
        precision_sum += best;
    }
    double recall_sum = 0.0;
    for (double b : best_for_ref) recall_sum += b;
    r.precision = precision_sum / static_cast<double>(candidate.size());
    r.recall = recall_sum / static_cast<double>(reference.size());
    r.f1 = harmonic_mean(r.precision, r.recall);
    return r;
}

inline SimilarityReport greedy_similarity(std::string_view candidate, std::string_view reference,
                                          const TokenEmbeddingProvider& provider) {
    auto c = similarity_tokens(candidate);
    auto r = similarity_tokens(reference);
    return greedy_similarity(c, r, provider);
}

/// Highlight texts keyed by user id.
using SpansByUser = std::map<std::string, std::vector<std::string>>;

struct SpanScore {
    std::string user_id;
    std::size_t index = 0;  // position within the user's span list
    double score = 0.0;
};

/// Aggregated both ways: mean over all spans, and mean of per-user means.
struct HighlightEvaluation {
    double recall_span_mean = 0.0;
    double precision_span_mean = 0.0;
    double recall_user_mean = 0.0;
    double precision_user_mean = 0.0;
    std::vector<SpanScore> gold_recall;         // per gold span
    std::vector<SpanScore> predicted_precision;  // per predicted span
    std::size_t recall_users = 0;
    std::size_t precision_users = 0;
    std::vector<std::string> log;
};

/// Recall of a gold span is its best greedy recall against any predicted span
/// of the same user; precision of a predicted span is its best greedy precision
/// against any gold span of that user.
inline HighlightEvaluation evaluate_highlights(const SpansByUser& predicted, const SpansByUser& gold,
                                               const TokenEmbeddingProvider& provider) {
    HighlightEvaluation out;
    auto tokenize_all = [](const std::vector<std::string>& spans) {
        std::vector<std::vector<std::string>> toks;
        toks.reserve(spans.size());
        for (const auto& s : spans) toks.push_back(similarity_tokens(s));
        return toks;
    };
    static const std::vector<std::string> kNone;

    double recall_user_sum = 0.0, precision_user_sum = 0.0;
    for (const auto& [user, gold_spans] : gold) {
        auto pit = predicted.find(user);
        const auto& pred_spans = pit == predicted.end() ? kNone : pit->second;
        if (pit == predicted.end()) out.log.push_back("user " + user + " has gold spans but no prediction record; counted as zero recall");
        if (gold_spans.empty()) {
            out.log.push_back("user " + user + " has no gold spans; excluded from recall");
            if (!pred_spans.empty()) out.log.push_back("user " + user + " has no gold spans; excluded from precision");
            continue;
        }
        auto g = tokenize_all(gold_spans);
        auto p = tokenize_all(pred_spans);

        double user_recall = 0.0;
        for (std::size_t gi = 0; gi < g.size(); ++gi) {
            double best = 0.0;
            for (const auto& pt : p) best = std::max(best, greedy_similarity(pt, g[gi], provider).recall);
            out.gold_recall.push_back({user, gi, best});
            user_recall += best;
        }
        recall_user_sum += user_recall / static_cast<double>(g.size());
        ++out.recall_users;

        if (p.empty()) {
            out.log.push_back("user " + user + " has no predicted spans; excluded from precision");
            continue;
        }
        double user_precision = 0.0;
        for (std::size_t pi = 0; pi < p.size(); ++pi) {
            double best = 0.0;
            for (const auto& gt : g) best = std::max(best, greedy_similarity(p[pi], gt, provider).precision);
            out.predicted_precision.push_back({user, pi, best});
            user_precision += best;
        }
        precision_user_sum += user_precision / static_cast<double>(p.size());
        ++out.precision_users;
    }
    for (const auto& [user, spans] : predicted)
        if (!gold.contains(user) && !spans.empty())
            out.log.push_back("user " + user + " has predictions but no gold record; excluded from precision");

    auto mean = [](const std::vector<SpanScore>& xs) {
        if (xs.empty()) return 0.0;
        double s = 0.0;
        for (const auto& x : xs) s += x.score;
        return s / static_cast<double>(xs.size());
    };
    out.recall_span_mean = mean(out.gold_recall);
    out.precision_span_mean = mean(out.predicted_precision);
    out.recall_user_mean = out.recall_users ? recall_user_sum / static_cast<double>(out.recall_users) : 0.0;
    out.precision_user_mean = out.precision_users ? precision_user_sum / static_cast<double>(out.precision_users) : 0.0;
    return out;
}

struct Quartiles {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
    std::size_t n = 0;
};

/// Linear-interpolation quantile (position p * (n - 1)) of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InputError("quantile of empty data");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

inline Quartiles quartiles(std::vector<double> values) {
    if (values.empty()) return {};
    std::sort(values.begin(), values.end());
    return Quartiles{values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
                     quantile_sorted(values, 0.75), values.back(), values.size()};
}

/// Per expert level: distribution of per-user sentence ratios.
struct LevelRatioStats {
    std::map<RiskLevel, Quartiles> by_level;
};

struct RatioAnalysis {
    LevelRatioStats risk;      // share of risk-positive sentences
    LevelRatioStats negative;  // share of sentences whose top sentiment class is negative
    std::vector<std::string> log;
};

struct UserScores {
    std::string user_id;
    RiskLevel level = RiskLevel::unknown;
    std::vector<ScoredSentence> sentences;
};

inline bool negative_dominant(const SentimentScore& s) noexcept {
    return s.p_negative >= s.p_neutral && s.p_negative >= s.p_positive;
}

inline RatioAnalysis risk_ratio_analysis(std::span<const UserScores> users, double threshold = kDefaultRiskThreshold) {
    RatioAnalysis out;
    std::map<RiskLevel, std::vector<double>> risk, negative;
    for (const auto& user : users) {
        if (user.sentences.empty()) {
            out.log.push_back("user " + user.user_id + " has no sentences; excluded");
            continue;
        }
        std::size_t n_risk = 0, n_neg = 0;
        for (const auto& s : user.sentences) {
            n_risk += s.risk.p_risk >= threshold ? 1 : 0;
            n_neg += negative_dominant(s.sentiment) ? 1 : 0;
        }
        const double total = static_cast<double>(user.sentences.size());
        risk[user.level].push_back(static_cast<double>(n_risk) / total);
        negative[user.level].push_back(static_cast<double>(n_neg) / total);
    }
    for (auto& [level, ratios] : risk) out.risk.by_level[level] = quartiles(std::move(ratios));
    for (auto& [level, ratios] : negative) out.negative.by_level[level] = quartiles(std::move(ratios));
    return out;
}

/// Segment and score every timeline, then analyze.
inline RatioAnalysis risk_ratio_analysis(std::span<const UserTimeline> corpus, const RiskScorer& risk,
                                         const SentimentScorer& sentiment, double threshold = kDefaultRiskThreshold,
                                         const SegmentOptions& seg = {}) {
    std::vector<UserScores> users;
    for (const auto& t : corpus) {
        auto sentences = segment_timeline(t, seg);
        users.push_back(UserScores{t.user_id, t.expert_level, score_sentences(risk, sentiment, sentences, threshold)});
    }
    return risk_ratio_analysis(users, threshold);
}

struct ScoredSpan {
    double precision = 0.0;
    double p_risk = 0.0;
    double p_negative = 0.0;
};

struct PrecisionCorrelationRow {
    double bin_low = 0.0;
    double bin_high = 0.0;  // exclusive, except the last bin which includes 1
    std::optional<double> mean_risk_prob;
    std::optional<double> mean_neg_prob;
    std::optional<double> frac_risk_above_0_9;
    std::optional<double> frac_neg_above_0_9;
    std::size_t n = 0;
};

inline std::vector<double> uniform_bins(std::size_t count) {
    if (count == 0) throw InputError("need at least one bin");
    std::vector<double> edges(count + 1);
    for (std::size_t i = 0; i <= count; ++i) edges[i] = static_cast<double>(i) / static_cast<double>(count);
    return edges;
}

/// Bucket spans by precision and summarize their scores per bucket. `edges`
/// must start at 0, end at 1 and increase strictly.
inline std::vector<PrecisionCorrelationRow> precision_correlation_analysis(std::span<const ScoredSpan> spans,
                                                                           std::span<const double> edges) {
    if (edges.size() < 2 || edges.front() != 0.0 || edges.back() != 1.0)
        throw InputError("bin edges must span [0, 1]");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1])) throw InputError("bin edges must increase strictly");

    const std::size_t bins = edges.size() - 1;
    struct Acc {
        double risk = 0, neg = 0;
        std::size_t risk_hi = 0, neg_hi = 0, n = 0;
    };
    std::vector<Acc> acc(bins);
    for (const auto& s : spans) {
        if (!(s.precision >= 0.0 && s.precision <= 1.0)) throw InputError("span precision outside [0, 1]");
        auto it = std::upper_bound(edges.begin(), edges.end(), s.precision);
        std::size_t b = std::min(static_cast<std::size_t>(it - edges.begin()) - 1, bins - 1);
        auto& a = acc[b];
        a.risk += s.p_risk;
        a.neg += s.p_negative;
        a.risk_hi += s.p_risk >= 0.9 ? 1 : 0;
        a.neg_hi += s.p_negative >= 0.9 ? 1 : 0;
        ++a.n;
    }
    std::vector<PrecisionCorrelationRow> rows;
    for (std::size_t b = 0; b < bins; ++b) {
        PrecisionCorrelationRow row{edges[b], edges[b + 1], {}, {}, {}, {}, acc[b].n};
        if (acc[b].n > 0) {
            const double n = static_cast<double>(acc[b].n);
            row.mean_risk_prob = acc[b].risk / n;
            row.mean_neg_prob = acc[b].neg / n;
            row.frac_risk_above_0_9 = static_cast<double>(acc[b].risk_hi) / n;
            row.frac_neg_above_0_9 = static_cast<double>(acc[b].neg_hi) / n;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace riskev
