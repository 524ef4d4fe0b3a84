#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskev/corpus.hpp"
#include "riskev/error.hpp"
#include "riskev/lexicon.hpp"
#include "riskev/rng.hpp"

namespace riskev {

struct LabeledSentence {
    std::string user_id;
    std::string post_id;
    std::size_t index = 0;  // sentence ordinal within the post
    std::string text;
    int label = 0;

    friend bool operator==(const LabeledSentence&, const LabeledSentence&) = default;
};

struct LabeledDataset {
    std::vector<LabeledSentence> train;
    std::vector<LabeledSentence> val;
    std::uint64_t seed = 0;
    // before downsampling
    std::size_t matched_sentences = 0;
    std::size_t unmatched_sentences = 0;

    std::size_t count(std::span<const LabeledSentence> rows, int label) const {
        std::size_t n = 0;
        for (const auto& row : rows) n += row.label == label ? 1 : 0;
        return n;
    }
    std::size_t train_count(int label) const { return count(train, label); }
    std::size_t val_count(int label) const { return count(val, label); }

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

struct DatasetOptions {
    std::uint64_t seed = 0;
    double val_fraction = 0.2;
    std::size_t balance_tolerance = 1;
    SegmentOptions segmentation{};
};

/// Weak-label every sentence of the corpus by lexicon containment, downsample
/// the unmatched class towards the matched count, then split each class at
/// `val_fraction`.
///
/// Randomness is consumed in a fixed order: negative downsampling, positive
/// split, negative split, train shuffle, val shuffle.
inline LabeledDataset build_weak_labeled_dataset(const std::vector<UserTimeline>& corpus,
                                                 const RiskPhraseLexicon& lexicon,
                                                 const DatasetOptions& opts) {
    if (corpus.empty()) throw InputError("corpus is empty");
    if (!(opts.val_fraction > 0.0 && opts.val_fraction < 1.0))
        throw InputError("val_fraction must lie strictly between 0 and 1");

    std::vector<LabeledSentence> positives;
    std::vector<LabeledSentence> negatives;
    for (const auto& timeline : corpus) {
        for (auto& sentence : segment_timeline(timeline, opts.segmentation)) {
            int label = lexicon.matcher().matches_any(sentence.text) ? 1 : 0;
            LabeledSentence row{timeline.user_id, sentence.post_id, sentence.index, std::move(sentence.text), label};
            (label ? positives : negatives).push_back(std::move(row));
        }
    }
    if (positives.empty()) throw InputError("lexicon matched nothing");
    if (negatives.empty()) throw InputError("no unmatched sentences: the dataset needs both classes");

    LabeledDataset out;
    out.seed = opts.seed;
    out.matched_sentences = positives.size();
    out.unmatched_sentences = negatives.size();

    Rng rng(opts.seed);
    const std::size_t tol = opts.balance_tolerance;
    if (negatives.size() > positives.size() + tol) {
        // partial Fisher-Yates over indices, then restore corpus order
        std::vector<std::size_t> idx(negatives.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        const std::size_t keep = positives.size();
        for (std::size_t i = 0; i < keep; ++i) {
            auto j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(keep);
        std::sort(idx.begin(), idx.end());
        std::vector<LabeledSentence> kept;
        kept.reserve(keep);
        for (auto i : idx) kept.push_back(std::move(negatives[i]));
        negatives = std::move(kept);
    } else if (negatives.size() + tol < positives.size()) {
        throw InputError("cannot balance classes: " + std::to_string(negatives.size()) +
                         " unmatched sentences for " + std::to_string(positives.size()) + " matched");
    }

    auto split_class = [&](std::vector<LabeledSentence>& rows) {
        rng.shuffle(std::span(rows));
        auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(rows.size()) * opts.val_fraction));
        if (rows.size() > 1) n_val = std::min(n_val, rows.size() - 1);
        for (std::size_t i = 0; i < rows.size(); ++i)
            (i < n_val ? out.val : out.train).push_back(std::move(rows[i]));
    };
    split_class(positives);
    split_class(negatives);
    rng.shuffle(std::span(out.train));
    rng.shuffle(std::span(out.val));
    return out;
}

/// JSONL rows: {"text","label","split","user_id","post_id","index"}.
inline void write_dataset_jsonl(std::ostream& os, const LabeledDataset& dataset) {
    auto emit = [&](const std::vector<LabeledSentence>& rows, const char* split) {
        for (const auto& row : rows) {
            nlohmann::ordered_json obj;
            obj["text"] = row.text;
            obj["label"] = row.label;
            obj["split"] = split;
            obj["user_id"] = row.user_id;
            obj["post_id"] = row.post_id;
            obj["index"] = row.index;
            os << obj.dump() << '\n';
        }
    };
    emit(dataset.train, "train");
    emit(dataset.val, "val");
}

inline LabeledDataset read_dataset_jsonl(std::istream& in, const std::string& source = "dataset") {
    LabeledDataset out;
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
        if (obj.contains("_meta")) {
            const auto& meta = obj["_meta"];
            if (meta.contains("seed") && meta["seed"].is_number_unsigned()) out.seed = meta["seed"].get<std::uint64_t>();
            continue;
        }
        LabeledSentence row;
        try {
            row.text = obj.at("text").get<std::string>();
            row.label = obj.at("label").get<int>();
            row.user_id = obj.value("user_id", "");
            row.post_id = obj.value("post_id", "");
            row.index = obj.value("index", std::size_t{0});
            auto split = obj.at("split").get<std::string>();
            if (row.label != 0 && row.label != 1) throw InputError(where + ": label must be 0 or 1");
            if (split == "train") {
                out.train.push_back(std::move(row));
            } else if (split == "val") {
                out.val.push_back(std::move(row));
            } else {
                throw InputError(where + ": split must be \"train\" or \"val\"");
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    return out;
}

}  // namespace riskev
