#pragma once

// Character n-gram logistic regression used as the native stand-in for a
// fine-tuned sentence classifier.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "riskev/dataset.hpp"
#include "riskev/error.hpp"
#include "riskev/rng.hpp"
#include "riskev/text.hpp"

namespace riskev {

inline constexpr std::size_t kMinNgram = 3;
inline constexpr std::size_t kMaxNgram = 5;

/// L2-normalized counts of character 3..5-grams of the lowercased,
/// whitespace-collapsed text padded with one space on each side.
inline std::map<std::string, double> char_ngram_features(std::string_view sentence) {
    std::string padded = " " + text::normalize_phrase(sentence) + " ";
    std::map<std::string, double> counts;
    for (std::size_t n = kMinNgram; n <= kMaxNgram; ++n) {
        if (padded.size() < n) break;
        for (std::size_t i = 0; i + n <= padded.size(); ++i) counts[padded.substr(i, n)] += 1.0;
    }
    double norm = 0.0;
    for (const auto& [_, c] : counts) norm += c * c;
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (auto& [_, c] : counts) c /= norm;
    return counts;
}

inline double sigmoid(double z) noexcept {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

class BaselineRiskModel {
public:
    static constexpr std::string_view kMagic = "riskev-baseline-risk-model v1";

    BaselineRiskModel() = default;
    BaselineRiskModel(std::map<std::string, double> weights, double bias)
        : weights_(std::move(weights)), bias_(bias), trained_(true) {
        for (const auto& [gram, w] : weights_)
            if (!std::isfinite(w)) throw InputError("non-finite weight for n-gram \"" + gram + "\"");
        if (!std::isfinite(bias_)) throw InputError("non-finite bias");
    }

    bool trained() const noexcept { return trained_; }
    double bias() const noexcept { return bias_; }
    const std::map<std::string, double>& weights() const noexcept { return weights_; }

    double logit(std::string_view sentence) const {
        double z = bias_;
        for (const auto& [gram, x] : char_ngram_features(sentence)) {
            auto it = weights_.find(gram);
            if (it != weights_.end()) z += it->second * x;
        }
        return z;
    }

    double predict(std::string_view sentence) const {
        if (!trained_) throw Error("baseline risk model is untrained");
        return sigmoid(logit(sentence));
    }

    /// Text format: magic line, optional "#" comment lines, "bias <x>",
    /// "ngrams <n>", then n lines of "<weight>\t<ngram>". Numbers use the
    /// shortest round-trip decimal form, so a reload is bit-exact.
    void save(std::ostream& os, std::string_view comment = {}) const {
        os << kMagic << '\n';
        if (!comment.empty()) os << "# " << comment << '\n';
        os << "bias " << format_double(bias_) << '\n' << "ngrams " << weights_.size() << '\n';
        for (const auto& [gram, w] : weights_) os << format_double(w) << '\t' << gram << '\n';
    }

    void save(const std::string& path, std::string_view comment = {}) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw InputError("cannot write model file: " + path);
        save(os, comment);
    }

    static BaselineRiskModel read(std::istream& in, const std::string& source = "model") {
        std::string line;
        if (!std::getline(in, line) || line != kMagic) throw InputError(source + ": not a baseline risk model file");
        double bias = 0.0;
        while (std::getline(in, line) && line.rfind('#', 0) == 0) {
        }
        if (!in || line.rfind("bias ", 0) != 0) throw InputError(source + ": missing bias line");
        bias = parse_double(std::string_view(line).substr(5), source);
        if (!std::getline(in, line) || line.rfind("ngrams ", 0) != 0) throw InputError(source + ": missing ngrams line");
        std::size_t count = 0;
        {
            auto sv = std::string_view(line).substr(7);
            auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), count);
            if (ec != std::errc{} || p != sv.data() + sv.size()) throw InputError(source + ": bad n-gram count");
        }
        std::map<std::string, double> weights;
        for (std::size_t i = 0; i < count; ++i) {
            if (!std::getline(in, line)) throw InputError(source + ": truncated n-gram table");
            auto tab = line.find('\t');
            if (tab == std::string::npos) throw InputError(source + ": malformed n-gram line " + std::to_string(i + 4));
            double w = parse_double(std::string_view(line).substr(0, tab), source);
            weights.emplace(line.substr(tab + 1), w);
        }
        return BaselineRiskModel(std::move(weights), bias);
    }

    static BaselineRiskModel load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InputError("cannot open model file: " + path);
        return read(in, path);
    }

    friend bool operator==(const BaselineRiskModel&, const BaselineRiskModel&) = default;

private:
    static std::string format_double(double x) {
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, p);
    }

    static double parse_double(std::string_view s, const std::string& source) {
        double x = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw InputError(source + ": bad number \"" + std::string(s) + "\"");
        return x;
    }

    std::map<std::string, double> weights_;
    double bias_ = 0.0;
    bool trained_ = false;
};

struct EpochMetrics {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
};

struct TrainOptions {
    std::size_t epochs = 20;
    double learning_rate = 0.5;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
};

struct TrainResult {
    BaselineRiskModel model;
    std::vector<EpochMetrics> history;
    std::size_t best_epoch = 0;
};

/// SGD logistic regression over char n-gram features. The vocabulary comes
/// from the training split. The model snapshot with the highest validation
/// accuracy is returned (earliest epoch on ties; training accuracy when there
/// is no validation split).
inline TrainResult train_baseline(const LabeledDataset& dataset, const TrainOptions& opts) {
    if (opts.epochs == 0) throw InputError("zero epochs: the model would be untrained");
    if (dataset.train_count(0) == 0 || dataset.train_count(1) == 0)
        throw InputError("training split must contain both classes");

    std::unordered_map<std::string, std::size_t> vocab;
    std::vector<std::string> grams;
    using Sparse = std::vector<std::pair<std::size_t, double>>;

    auto featurize = [&](const std::string& sentence, bool grow) {
        Sparse out;
        for (auto& [gram, x] : char_ngram_features(sentence)) {
            auto it = vocab.find(gram);
            if (it == vocab.end()) {
                if (!grow) continue;
                it = vocab.emplace(gram, grams.size()).first;
                grams.push_back(gram);
            }
            out.emplace_back(it->second, x);
        }
        return out;
    };

    std::vector<Sparse> train_x, val_x;
    std::vector<int> train_y, val_y;
    for (const auto& row : dataset.train) {
        train_x.push_back(featurize(row.text, true));
        train_y.push_back(row.label);
    }
    for (const auto& row : dataset.val) {
        val_x.push_back(featurize(row.text, false));
        val_y.push_back(row.label);
    }

    std::vector<double> w(grams.size(), 0.0);
    double b = 0.0;
    auto z_of = [&](const Sparse& x) {
        double z = b;
        for (auto [j, v] : x) z += w[j] * v;
        return z;
    };
    auto accuracy = [&](const std::vector<Sparse>& xs, const std::vector<int>& ys) {
        if (xs.empty()) return 0.0;
        std::size_t ok = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) ok += ((z_of(xs[i]) >= 0.0 ? 1 : 0) == ys[i]) ? 1 : 0;
        return static_cast<double>(ok) / static_cast<double>(xs.size());
    };

    Rng rng(opts.seed);
    std::vector<std::size_t> order(train_x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult result;
    double best = -1.0;
    std::vector<double> best_w;
    double best_b = 0.0;
    for (std::size_t epoch = 1; epoch <= opts.epochs; ++epoch) {
        rng.shuffle(std::span(order));
        double loss = 0.0;
        for (auto i : order) {
            const double p = sigmoid(z_of(train_x[i]));
            const double y = train_y[i];
            loss += -(y * std::log(std::max(p, 1e-12)) + (1.0 - y) * std::log(std::max(1.0 - p, 1e-12)));
            const double g = p - y;
            for (auto [j, v] : train_x[i]) w[j] -= opts.learning_rate * (g * v + opts.l2 * w[j]);
            b -= opts.learning_rate * g;
        }
        EpochMetrics m{epoch, loss / static_cast<double>(order.size()), accuracy(train_x, train_y),
                       accuracy(val_x, val_y)};
        result.history.push_back(m);
        const double score = val_x.empty() ? m.train_accuracy : m.val_accuracy;
        if (score > best) {
            best = score;
            best_w = w;
            best_b = b;
            result.best_epoch = epoch;
        }
    }

    std::map<std::string, double> weights;
    for (std::size_t j = 0; j < grams.size(); ++j)
        if (best_w[j] != 0.0) weights.emplace(grams[j], best_w[j]);
    result.model = BaselineRiskModel(std::move(weights), best_b);
    return result;
}

}  // namespace riskev
