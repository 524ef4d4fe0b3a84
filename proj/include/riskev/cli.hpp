#pragma once

// Command-line pipeline: configuration, per-user orchestration and artifact
// writers. tools/riskev.cpp is a thin main() around run_command().

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <toml.hpp>

#include "riskev/baseline_model.hpp"
#include "riskev/corpus.hpp"
#include "riskev/csv.hpp"
#include "riskev/dataset.hpp"
#include "riskev/error.hpp"
#include "riskev/eval.hpp"
#include "riskev/highlight.hpp"
#include "riskev/lexicon.hpp"
#include "riskev/remote.hpp"
#include "riskev/scoring.hpp"
#include "riskev/summary.hpp"

namespace riskev {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr const char* kEndpointEnv = "RISKEV_ENDPOINT";

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitRemote = 2 };

struct PipelineConfig {
    std::string corpus;
    std::string risk_lexicon;     // empty: built-in list
    std::string summary_lexicon;  // empty: built-in table
    std::string valence_lexicon;  // empty: built-in word lists
    std::string model;            // baseline model file; empty: lexicon hits only
    std::string scorer = "lexicon-baseline";
    std::string generator = "none";
    std::string endpoint;
    std::int64_t timeout_ms = 30000;
    std::int64_t batch_size = 32;
    std::int64_t max_in_flight = 4;
    double risk_threshold = kDefaultRiskThreshold;
    std::int64_t word_budget = 300;
    std::int64_t min_candidate_words = 3;
    std::string fill_policy = "stop";
    bool split_on_comma = false;
    std::int64_t seed = 0;
    double val_fraction = 0.2;
    std::int64_t balance_tolerance = 1;
    std::int64_t epochs = 20;
    double learning_rate = 0.5;
    std::string output_dir = ".";
    std::int64_t jobs = 1;

    void validate() const {
        if (scorer != "lexicon-baseline" && scorer != "remote")
            throw InputError("scorer must be \"lexicon-baseline\" or \"remote\"");
        if (generator != "none" && generator != "remote") throw InputError("generator must be \"none\" or \"remote\"");
        if (fill_policy != "stop" && fill_policy != "skip") throw InputError("fill_policy must be \"stop\" or \"skip\"");
        if (!(risk_threshold >= 0.0 && risk_threshold <= 1.0)) throw InputError("risk_threshold must lie in [0, 1]");
        if (word_budget <= 0) throw InputError("word_budget must be positive");
        if (min_candidate_words < 1) throw InputError("min_candidate_words must be at least 1");
        if (timeout_ms <= 0 || batch_size <= 0 || max_in_flight <= 0)
            throw InputError("timeout_ms, batch_size and max_in_flight must be positive");
        if (seed < 0) throw InputError("seed must be non-negative");
        if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw InputError("val_fraction must lie in (0, 1)");
        if (balance_tolerance < 0) throw InputError("balance_tolerance must be non-negative");
        if (epochs < 0) throw InputError("epochs must be non-negative");
        if (jobs < 1) throw InputError("jobs must be at least 1");
    }

    HighlightConfig highlight() const {
        return HighlightConfig{risk_threshold, static_cast<std::size_t>(word_budget),
                               static_cast<std::size_t>(min_candidate_words),
                               fill_policy == "skip" ? FillPolicy::skip_and_continue : FillPolicy::stop_at_first_overflow};
    }

    SegmentOptions segmentation() const { return SegmentOptions{split_on_comma}; }

    RemoteConfig remote() const {
        return RemoteConfig{endpoint, std::chrono::milliseconds(timeout_ms), static_cast<std::size_t>(batch_size),
                            static_cast<std::size_t>(max_in_flight)};
    }

    /// Settings that influence artifact content, one "key=value" per line.
    /// Paths, output_dir and jobs are excluded; input files are fingerprinted
    /// by content instead.
    std::string canonical() const {
        std::ostringstream os;
        os << std::setprecision(17);
        os << "balance_tolerance=" << balance_tolerance << '\n'
           << "batch_size=" << batch_size << '\n'
           << "endpoint=" << endpoint << '\n'
           << "epochs=" << epochs << '\n'
           << "fill_policy=" << fill_policy << '\n'
           << "generator=" << generator << '\n'
           << "learning_rate=" << learning_rate << '\n'
           << "min_candidate_words=" << min_candidate_words << '\n'
           << "risk_threshold=" << risk_threshold << '\n'
           << "scorer=" << scorer << '\n'
           << "seed=" << seed << '\n'
           << "split_on_comma=" << split_on_comma << '\n'
           << "val_fraction=" << val_fraction << '\n'
           << "word_budget=" << word_budget << '\n';
        return os.str();
    }

    std::string hash() const {
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0') << text::fnv1a64(canonical());
        return os.str();
    }
};

namespace detail {

template <typename T>
void read_key(const toml::table& tbl, const char* key, T& dst) {
    const auto* node = tbl.get(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, std::string>) {
        if (!node->is_string()) throw InputError(std::string("config key \"") + key + "\" must be a string");
        dst = node->value<std::string>().value();
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!node->is_boolean()) throw InputError(std::string("config key \"") + key + "\" must be a boolean");
        dst = node->value<bool>().value();
    } else if constexpr (std::is_same_v<T, double>) {
        if (!node->is_number()) throw InputError(std::string("config key \"") + key + "\" must be a number");
        dst = node->value<double>().value();
    } else {
        if (!node->is_integer()) throw InputError(std::string("config key \"") + key + "\" must be an integer");
        dst = node->value<std::int64_t>().value();
    }
}

}  // namespace detail

/// Flat TOML file; unknown keys are rejected.
inline PipelineConfig parse_config(std::string_view toml_text, const std::string& source = "config") {
    toml::table tbl;
    try {
        tbl = toml::parse(toml_text, source);
    } catch (const toml::parse_error& e) {
        throw InputError(source + ": " + std::string(e.description()));
    }
    PipelineConfig c;
    static const std::vector<std::string> kKeys{
        "corpus",       "risk_lexicon",  "summary_lexicon", "valence_lexicon",     "model",       "scorer",
        "generator",    "endpoint",      "timeout_ms",      "batch_size",          "max_in_flight", "risk_threshold",
        "word_budget",  "min_candidate_words", "fill_policy", "split_on_comma",    "seed",        "val_fraction",
        "balance_tolerance", "epochs",   "learning_rate",   "output_dir",          "jobs"};
    for (const auto& [key, _] : tbl)
        if (std::find(kKeys.begin(), kKeys.end(), std::string(key.str())) == kKeys.end())
            throw InputError(source + ": unknown config key \"" + std::string(key.str()) + "\"");
    detail::read_key(tbl, "corpus", c.corpus);
    detail::read_key(tbl, "risk_lexicon", c.risk_lexicon);
    detail::read_key(tbl, "summary_lexicon", c.summary_lexicon);
    detail::read_key(tbl, "valence_lexicon", c.valence_lexicon);
    detail::read_key(tbl, "model", c.model);
    detail::read_key(tbl, "scorer", c.scorer);
    detail::read_key(tbl, "generator", c.generator);
    detail::read_key(tbl, "endpoint", c.endpoint);
    detail::read_key(tbl, "timeout_ms", c.timeout_ms);
    detail::read_key(tbl, "batch_size", c.batch_size);
    detail::read_key(tbl, "max_in_flight", c.max_in_flight);
    detail::read_key(tbl, "risk_threshold", c.risk_threshold);
    detail::read_key(tbl, "word_budget", c.word_budget);
    detail::read_key(tbl, "min_candidate_words", c.min_candidate_words);
    detail::read_key(tbl, "fill_policy", c.fill_policy);
    detail::read_key(tbl, "split_on_comma", c.split_on_comma);
    detail::read_key(tbl, "seed", c.seed);
    detail::read_key(tbl, "val_fraction", c.val_fraction);
    detail::read_key(tbl, "balance_tolerance", c.balance_tolerance);
    detail::read_key(tbl, "epochs", c.epochs);
    detail::read_key(tbl, "learning_rate", c.learning_rate);
    detail::read_key(tbl, "output_dir", c.output_dir);
    detail::read_key(tbl, "jobs", c.jobs);
    return c;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

/// Apply `fn` to indices [0, n) on up to `jobs` threads; results keep index
/// order and the first failure (by index) is rethrown.
template <typename F>
auto parallel_map(std::size_t n, std::size_t jobs, F fn) {
    using R = decltype(fn(std::size_t{0}));
    std::vector<std::optional<R>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
        worker();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(n);
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

/// Scorers, lexicons and generator resolved from a config.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config) : config_(std::move(config)) {
        config_.validate();
        if (!config_.risk_lexicon.empty())
            risk_lexicon_ = std::make_unique<RiskPhraseLexicon>(RiskPhraseLexicon::load(config_.risk_lexicon));
        const RiskPhraseLexicon& lex = risk_lexicon();
        if (!config_.summary_lexicon.empty())
            summary_table_ = std::make_unique<SummaryPhraseTable>(SummaryPhraseTable::load(config_.summary_lexicon, lex));
        else if (risk_lexicon_)
            summary_table_ = std::make_unique<SummaryPhraseTable>(
                [] {
                    std::istringstream in{std::string(kDefaultSummaryPhrases)};
                    return SummaryPhraseTable::parse(in);
                }()
                    .with_risk_row(lex));

        const bool need_remote = config_.scorer == "remote" || config_.generator == "remote";
        if (need_remote) remote_ = std::make_unique<RemoteModelClient>(config_.remote());
        if (config_.scorer == "remote") {
            risk_scorer_ = remote_.get();
            sentiment_scorer_ = remote_.get();
        } else {
            std::optional<BaselineRiskModel> model;
            if (!config_.model.empty()) model = BaselineRiskModel::load(config_.model);
            baseline_ = std::make_unique<LexiconBaselineScorer>(lex, std::move(model));
            risk_scorer_ = baseline_.get();
            if (!config_.valence_lexicon.empty()) {
                valence_ = std::make_unique<ValenceSentimentScorer>(ValenceSentimentScorer::load(config_.valence_lexicon));
                sentiment_scorer_ = valence_.get();
            } else {
                sentiment_scorer_ = &ValenceSentimentScorer::default_scorer();
            }
        }
        if (config_.generator == "remote") generator_ = remote_.get();
    }

    const PipelineConfig& config() const noexcept { return config_; }
    const RiskPhraseLexicon& risk_lexicon() const {
        return risk_lexicon_ ? *risk_lexicon_ : RiskPhraseLexicon::default_lexicon();
    }
    const SummaryPhraseTable& summary_table() const {
        return summary_table_ ? *summary_table_ : SummaryPhraseTable::default_table();
    }
    const RiskScorer& risk_scorer() const { return *risk_scorer_; }
    const SentimentScorer& sentiment_scorer() const { return *sentiment_scorer_; }
    const TextGenerator* generator() const { return generator_; }

    std::vector<ScoredSentence> score(const UserTimeline& timeline) const {
        auto sentences = segment_timeline(timeline, config_.segmentation());
        return score_sentences(*risk_scorer_, *sentiment_scorer_, sentences, config_.risk_threshold);
    }

private:
    PipelineConfig config_;
    std::unique_ptr<RiskPhraseLexicon> risk_lexicon_;
    std::unique_ptr<SummaryPhraseTable> summary_table_;
    std::unique_ptr<RemoteModelClient> remote_;
    std::unique_ptr<LexiconBaselineScorer> baseline_;
    std::unique_ptr<ValenceSentimentScorer> valence_;
    const RiskScorer* risk_scorer_ = nullptr;
    const SentimentScorer* sentiment_scorer_ = nullptr;
    const TextGenerator* generator_ = nullptr;
};

// ---- artifact serialization ------------------------------------------------

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << text::fnv1a64(ss.str());
    return os.str();
}

/// Provenance stamped into every artifact.
struct ArtifactStamp {
    std::string command;
    std::string config_hash;
    std::int64_t seed = 0;
    std::map<std::string, std::string> inputs;  // role -> content digest

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json meta;
        meta["tool"] = "riskev " + std::string(kVersion);
        meta["command"] = command;
        meta["config_hash"] = config_hash;
        meta["seed"] = seed;
        nlohmann::ordered_json in = nlohmann::ordered_json::object();
        for (const auto& [k, v] : inputs) in[k] = v;
        meta["inputs"] = in;
        return meta;
    }

    std::string jsonl_header() const {
        nlohmann::ordered_json line;
        line["_meta"] = to_json();
        return line.dump();
    }

    std::string comment() const { return to_json().dump(); }
};

inline nlohmann::ordered_json highlight_record(const HighlightResult& result) {
    nlohmann::ordered_json rec;
    rec["user_id"] = result.highlights.user_id;
    rec["total_words"] = result.highlights.total_words;
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : result.highlights.entries) {
        nlohmann::ordered_json h;
        h["post_id"] = e.sentence.post_id;
        h["char_start"] = e.sentence.char_start;
        h["char_end"] = e.sentence.char_end;
        h["text"] = e.sentence.text;
        h["provenance"] = to_string(e.provenance);
        h["p_risk"] = e.p_risk;
        h["p_negative"] = e.p_negative;
        entries.push_back(std::move(h));
    }
    rec["highlights"] = std::move(entries);
    if (!result.warnings.empty()) rec["warnings"] = result.warnings;
    return rec;
}

/// Highlight span with the scores needed by the precision analysis.
struct HighlightSpanRecord {
    std::string text;
    double p_risk = 0.0;
    double p_negative = 0.0;
};

/// Reads per-user highlight records ({"user_id", "highlights":[{"text",...}]})
/// or flat span lines ({"user_id","text"}).
inline std::map<std::string, std::vector<HighlightSpanRecord>> read_highlights_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open highlight file: " + path);
    std::map<std::string, std::vector<HighlightSpanRecord>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        try {
            auto obj = nlohmann::json::parse(line);
            if (!obj.is_object()) throw InputError(where + ": expected a JSON object");
            if (obj.contains("_meta")) continue;
            auto user = obj.at("user_id").get<std::string>();
            auto& spans = out[user];
            auto read_span = [](const nlohmann::json& h) {
                return HighlightSpanRecord{h.at("text").get<std::string>(), h.value("p_risk", 0.0),
                                           h.value("p_negative", 0.0)};
            };
            if (obj.contains("highlights")) {
                for (const auto& h : obj.at("highlights")) spans.push_back(read_span(h));
            } else {
                spans.push_back(read_span(obj));
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    return out;
}

inline SpansByUser span_texts(const std::map<std::string, std::vector<HighlightSpanRecord>>& records) {
    SpansByUser out;
    for (const auto& [user, spans] : records) {
        auto& texts = out[user];
        for (const auto& s : spans) texts.push_back(s.text);
    }
    return out;
}

inline std::string format_number(double x) {
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

inline std::string format_optional(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

// ---- commands ---------------------------------------------------------------

namespace commands {

namespace fs = std::filesystem;

inline std::ofstream open_output(const PipelineConfig& c, const std::string& name) {
    fs::create_directories(c.output_dir);
    auto path = (fs::path(c.output_dir) / name).string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write " + path);
    return os;
}

inline std::vector<UserTimeline> sorted_corpus(const PipelineConfig& c) {
    if (c.corpus.empty()) throw InputError("no corpus given (--corpus or config key \"corpus\")");
    auto corpus = load_corpus(c.corpus);
    std::stable_sort(corpus.begin(), corpus.end(),
                     [](const UserTimeline& a, const UserTimeline& b) { return a.user_id < b.user_id; });
    return corpus;
}

inline ArtifactStamp provenance(const std::string& command, const PipelineConfig& c) {
    ArtifactStamp p{command, c.hash(), c.seed, {}};
    if (!c.corpus.empty() && fs::exists(c.corpus)) p.inputs["corpus"] = file_digest(c.corpus);
    if (!c.risk_lexicon.empty()) p.inputs["risk_lexicon"] = file_digest(c.risk_lexicon);
    if (!c.summary_lexicon.empty()) p.inputs["summary_lexicon"] = file_digest(c.summary_lexicon);
    if (!c.valence_lexicon.empty()) p.inputs["valence_lexicon"] = file_digest(c.valence_lexicon);
    if (!c.model.empty()) p.inputs["model"] = file_digest(c.model);
    return p;
}

inline void segment(const PipelineConfig& c, std::ostream& log) {
    auto corpus = sorted_corpus(c);
    auto os = open_output(c, "sentences.jsonl");
    os << provenance("segment", c).jsonl_header() << '\n';
    std::size_t n = 0;
    for (const auto& t : corpus) {
        for (const auto& s : segment_timeline(t, c.segmentation())) {
            nlohmann::ordered_json rec;
            rec["user_id"] = t.user_id;
            rec["post_id"] = s.post_id;
            rec["index"] = s.index;
            rec["char_start"] = s.char_start;
            rec["char_end"] = s.char_end;
            rec["text"] = s.text;
            os << rec.dump() << '\n';
            ++n;
        }
    }
    log << "segment: " << n << " sentences from " << corpus.size() << " users\n";
}

inline void build_dataset(const PipelineConfig& c, const RiskPhraseLexicon& lexicon, std::ostream& log) {
    if (c.corpus.empty()) throw InputError("no corpus given (--corpus or config key \"corpus\")");
    auto corpus = load_corpus(c.corpus);
    DatasetOptions opts{static_cast<std::uint64_t>(c.seed), c.val_fraction,
                        static_cast<std::size_t>(c.balance_tolerance), c.segmentation()};
    auto ds = build_weak_labeled_dataset(corpus, lexicon, opts);
    auto os = open_output(c, "dataset.jsonl");
    os << provenance("build-dataset", c).jsonl_header() << '\n';
    write_dataset_jsonl(os, ds);
    log << "build-dataset: matched " << ds.matched_sentences << ", unmatched " << ds.unmatched_sentences
        << "; train " << ds.train_count(1) << "/" << ds.train_count(0) << ", val " << ds.val_count(1) << "/"
        << ds.val_count(0) << " (label 1/label 0)\n";
}

inline void train(const PipelineConfig& c, const std::string& dataset_path, std::ostream& log) {
    std::ifstream in(dataset_path, std::ios::binary);
    if (!in) throw InputError("cannot open dataset: " + dataset_path);
    auto ds = read_dataset_jsonl(in, dataset_path);
    TrainOptions opts;
    opts.epochs = static_cast<std::size_t>(c.epochs);
    opts.learning_rate = c.learning_rate;
    opts.seed = static_cast<std::uint64_t>(c.seed);
    auto result = train_baseline(ds, opts);

    auto prov = provenance("train-baseline", c);
    prov.inputs["dataset"] = file_digest(dataset_path);
    {
        auto os = open_output(c, "baseline_model.txt");
        result.model.save(os, prov.comment());
    }
    auto os = open_output(c, "training_metrics.csv");
    os << "# " << prov.comment() << "\r\n";
    csv::write_row(os, {"epoch", "train_loss", "train_accuracy", "val_accuracy", "best"});
    for (const auto& m : result.history)
        csv::write_row(os, {std::to_string(m.epoch), format_number(m.train_loss), format_number(m.train_accuracy),
                            format_number(m.val_accuracy), m.epoch == result.best_epoch ? "1" : "0"});
    const auto& best = result.history[result.best_epoch - 1];
    log << "train-baseline: best epoch " << result.best_epoch << " val accuracy " << best.val_accuracy << "\n";
}

inline void score(const Pipeline& p, std::ostream& log) {
    const auto& c = p.config();
    auto corpus = sorted_corpus(c);
    auto scored = parallel_map(corpus.size(), static_cast<std::size_t>(c.jobs),
                               [&](std::size_t i) { return p.score(corpus[i]); });
    auto os = open_output(c, "scores.jsonl");
    os << provenance("score", c).jsonl_header() << '\n';
    std::size_t n = 0;
    for (std::size_t u = 0; u < corpus.size(); ++u) {
        for (const auto& s : scored[u]) {
            nlohmann::ordered_json rec;
            rec["user_id"] = corpus[u].user_id;
            rec["post_id"] = s.sentence.post_id;
            rec["index"] = s.sentence.index;
            rec["text"] = s.sentence.text;
            rec["p_risk"] = s.risk.p_risk;
            rec["p_negative"] = s.sentiment.p_negative;
            rec["p_neutral"] = s.sentiment.p_neutral;
            rec["p_positive"] = s.sentiment.p_positive;
            rec["risk_positive"] = s.risk_positive;
            os << rec.dump() << '\n';
            ++n;
        }
    }
    log << "score: " << n << " sentences\n";
}

inline void highlight(const Pipeline& p, std::ostream& log) {
    const auto& c = p.config();
    auto corpus = sorted_corpus(c);
    const auto hc = c.highlight();
    auto results = parallel_map(corpus.size(), static_cast<std::size_t>(c.jobs), [&](std::size_t i) {
        auto scored = p.score(corpus[i]);
        return extract_highlights(corpus[i].user_id, scored, aggregate_posts(corpus[i]), p.generator(), hc);
    });
    auto os = open_output(c, "highlights.jsonl");
    os << provenance("highlight", c).jsonl_header() << '\n';
    for (const auto& r : results) {
        os << highlight_record(r).dump() << '\n';
        for (const auto& w : r.warnings) log << "warning: " << w << '\n';
    }
    log << "highlight: " << results.size() << " users\n";
}

inline void summarize(const Pipeline& p, std::ostream& log) {
    const auto& c = p.config();
    auto corpus = sorted_corpus(c);
    struct Row {
        std::optional<SummaryParts> parts;
        std::string warning;
    };
    auto rows = parallel_map(corpus.size(), static_cast<std::size_t>(c.jobs), [&](std::size_t i) {
        const auto& t = corpus[i];
        if (t.expert_level == RiskLevel::unknown)
            return Row{std::nullopt, "user " + t.user_id + " has no expert level; skipped"};
        auto scored = p.score(t);
        std::size_t n_risk = 0;
        std::vector<Sentence> sentences;
        for (const auto& s : scored) {
            n_risk += s.risk_positive ? 1 : 0;
            sentences.push_back(s.sentence);
        }
        SummaryParts parts{opening_summary(t.expert_level), frequency_summary(n_risk),
                           dictionary_summary(sentences, p.summary_table()), std::nullopt};
        std::string warning;
        if (p.generator()) {
            try {
                parts.generative = p.generator()->generate_summary(aggregate_posts(t));
            } catch (const std::exception& e) {
                warning = "summary generation failed for user " + t.user_id + ": " + e.what();
            }
        }
        return Row{std::move(parts), std::move(warning)};
    });
    auto os = open_output(c, "summaries.jsonl");
    os << provenance("summarize", c).jsonl_header() << '\n';
    std::size_t written = 0;
    auto opt = [](const std::optional<std::string>& s) { return s ? nlohmann::ordered_json(*s) : nlohmann::ordered_json(); };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].warning.empty()) log << "warning: " << rows[i].warning << '\n';
        if (!rows[i].parts) continue;
        const auto& parts = *rows[i].parts;
        nlohmann::ordered_json rec;
        rec["user_id"] = corpus[i].user_id;
        rec["summary"] = assemble_summary(parts);
        rec["opening"] = parts.opening;
        rec["frequency"] = opt(parts.frequency);
        rec["dictionary"] = opt(parts.dictionary);
        rec["generative"] = opt(parts.generative);
        os << rec.dump() << '\n';
        ++written;
    }
    log << "summarize: " << written << " users\n";
}

inline std::unique_ptr<TokenEmbeddingProvider> embedding_provider(const std::string& path) {
    if (path.empty()) return std::make_unique<OneHotProvider>();
    return std::make_unique<EmbeddingTableProvider>(EmbeddingTableProvider::load(path));
}

inline HighlightEvaluation evaluate(const PipelineConfig& c, const std::string& pred, const std::string& gold,
                                    const std::string& embeddings, std::ostream& out, std::ostream& log) {
    auto provider = embedding_provider(embeddings);
    auto predicted = read_highlights_jsonl(pred);
    auto golden = read_highlights_jsonl(gold);
    auto ev = evaluate_highlights(span_texts(predicted), span_texts(golden), *provider);
    for (const auto& l : ev.log) log << "note: " << l << '\n';

    auto prov = provenance("evaluate", c);
    prov.inputs["pred"] = file_digest(pred);
    prov.inputs["gold"] = file_digest(gold);
    if (!embeddings.empty()) prov.inputs["embeddings"] = file_digest(embeddings);

    nlohmann::ordered_json report;
    report["_meta"] = prov.to_json();
    report["embedding"] = embeddings.empty() ? "one-hot" : "table";
    report["recall"] = ev.recall_span_mean;
    report["precision"] = ev.precision_span_mean;
    report["recall_user_mean"] = ev.recall_user_mean;
    report["precision_user_mean"] = ev.precision_user_mean;
    report["gold_spans"] = ev.gold_recall.size();
    report["predicted_spans"] = ev.predicted_precision.size();
    report["consistency"] = "not implemented";
    auto os = open_output(c, "evaluation.json");
    os << report.dump(2) << '\n';

    auto spans = open_output(c, "span_scores.csv");
    spans << "# " << prov.comment() << "\r\n";
    csv::write_row(spans, {"kind", "user_id", "index", "score"});
    for (const auto& s : ev.gold_recall)
        csv::write_row(spans, {"gold_recall", s.user_id, std::to_string(s.index), format_number(s.score)});
    for (const auto& s : ev.predicted_precision)
        csv::write_row(spans, {"predicted_precision", s.user_id, std::to_string(s.index), format_number(s.score)});

    out << "recall (span mean):      " << format_number(ev.recall_span_mean) << '\n'
        << "precision (span mean):   " << format_number(ev.precision_span_mean) << '\n'
        << "recall (user mean):      " << format_number(ev.recall_user_mean) << '\n'
        << "precision (user mean):   " << format_number(ev.precision_user_mean) << '\n'
        << "consistency:             not implemented\n";
    return ev;
}

inline void analyze(const Pipeline& p, const std::string& pred, const std::string& gold, const std::string& embeddings,
                    std::size_t bins, std::ostream& log) {
    const auto& c = p.config();
    auto prov = provenance("analyze", c);
    if (!c.corpus.empty()) {
        auto corpus = sorted_corpus(c);
        auto users = parallel_map(corpus.size(), static_cast<std::size_t>(c.jobs), [&](std::size_t i) {
            return UserScores{corpus[i].user_id, corpus[i].expert_level, p.score(corpus[i])};
        });
        auto analysis = risk_ratio_analysis(users, c.risk_threshold);
        for (const auto& l : analysis.log) log << "note: " << l << '\n';
        auto os = open_output(c, "risk_ratio.csv");
        os << "# " << prov.comment() << "\r\n";
        csv::write_row(os, {"kind", "level", "users", "min", "q1", "median", "q3", "max"});
        auto emit = [&](const char* kind, const LevelRatioStats& stats) {
            for (const auto& [level, q] : stats.by_level)
                csv::write_row(os, {kind, std::string(to_string(level)), std::to_string(q.n), format_number(q.min),
                                    format_number(q.q1), format_number(q.median), format_number(q.q3),
                                    format_number(q.max)});
        };
        emit("risk", analysis.risk);
        emit("negative_sentiment", analysis.negative);
        log << "analyze: risk ratios for " << users.size() << " users\n";
    }
    if (!pred.empty() && !gold.empty()) {
        auto provider = embedding_provider(embeddings);
        auto predicted = read_highlights_jsonl(pred);
        auto ev = evaluate_highlights(span_texts(predicted), span_texts(read_highlights_jsonl(gold)), *provider);
        std::vector<ScoredSpan> spans;
        for (const auto& s : ev.predicted_precision) {
            const auto& rec = predicted.at(s.user_id)[s.index];
            spans.push_back(ScoredSpan{s.score, rec.p_risk, rec.p_negative});
        }
        auto edges = uniform_bins(bins);
        auto rows = precision_correlation_analysis(spans, edges);
        prov.inputs["pred"] = file_digest(pred);
        prov.inputs["gold"] = file_digest(gold);
        auto os = open_output(c, "precision_correlation.csv");
        os << "# " << prov.comment() << "\r\n";
        csv::write_row(os, {"precision_low", "precision_high", "n", "mean_risk_prob", "mean_neg_prob",
                            "frac_risk_above_0_9", "frac_neg_above_0_9"});
        for (const auto& r : rows)
            csv::write_row(os, {format_number(r.bin_low), format_number(r.bin_high), std::to_string(r.n),
                                format_optional(r.mean_risk_prob), format_optional(r.mean_neg_prob),
                                format_optional(r.frac_risk_above_0_9), format_optional(r.frac_neg_above_0_9)});
        log << "analyze: precision correlation over " << spans.size() << " spans\n";
    }
}

}  // namespace commands

/// Entry point. Returns 0 on success, 1 on input errors and 2 on model
/// service errors.
inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Suicide-risk evidence extraction and summarization pipeline", "riskev"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", std::string(kVersion));

    std::string config_path;
    std::string corpus, risk_lexicon, summary_lexicon, valence_lexicon, model, scorer, generator, fill_policy, out_dir;
    std::optional<std::int64_t> seed, jobs, word_budget, min_candidate_words, balance_tolerance, epochs;
    std::optional<double> threshold, val_fraction, learning_rate;
    bool split_on_comma = false;
    std::string dataset_path, pred, gold, embeddings;
    std::size_t bins = 10;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "TOML configuration file");
        sub->add_option("--corpus", corpus, "JSONL corpus");
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Random seed");
        sub->add_option("--jobs", jobs, "Per-user worker threads");
        sub->add_option("--risk-lexicon", risk_lexicon, "Risk phrase lexicon file");
        sub->add_flag("--split-on-comma", split_on_comma, "Treat commas as sentence boundaries");
    };
    auto scoring = [&](CLI::App* sub) {
        sub->add_option("--model", model, "Baseline model file");
        sub->add_option("--scorer", scorer, "lexicon-baseline | remote");
        sub->add_option("--valence-lexicon", valence_lexicon, "Valence word lists for the native sentiment scorer");
        sub->add_option("--threshold", threshold, "Risk classification threshold");
    };

    auto* seg = app.add_subcommand("segment", "Split posts into sentences");
    common(seg);
    auto* bds = app.add_subcommand("build-dataset", "Build the lexicon weak-labeled dataset");
    common(bds);
    bds->add_option("--val-fraction", val_fraction, "Validation share");
    bds->add_option("--balance-tolerance", balance_tolerance, "Allowed class-count difference");
    auto* trn = app.add_subcommand("train-baseline", "Train the n-gram baseline risk model");
    common(trn);
    trn->add_option("--dataset", dataset_path, "Dataset JSONL (default: <out>/dataset.jsonl)");
    trn->add_option("--epochs", epochs, "Training epochs");
    trn->add_option("--learning-rate", learning_rate, "SGD learning rate");
    auto* scr = app.add_subcommand("score", "Score every sentence");
    common(scr);
    scoring(scr);
    auto* hl = app.add_subcommand("highlight", "Extract highlights per user");
    common(hl);
    scoring(hl);
    hl->add_option("--budget", word_budget, "Word budget");
    hl->add_option("--min-candidate-words", min_candidate_words, "Minimum generator phrase length");
    hl->add_option("--fill-policy", fill_policy, "stop | skip");
    hl->add_option("--generator", generator, "none | remote");
    auto* sum = app.add_subcommand("summarize", "Compose evidence summaries");
    common(sum);
    scoring(sum);
    sum->add_option("--summary-lexicon", summary_lexicon, "Summary phrase table file");
    sum->add_option("--generator", generator, "none | remote");
    auto* evl = app.add_subcommand("evaluate", "Score predicted highlights against gold");
    common(evl);
    evl->add_option("--pred", pred, "Predicted highlights JSONL")->required();
    evl->add_option("--gold", gold, "Gold highlights JSONL")->required();
    evl->add_option("--embeddings", embeddings, "Token embedding table (default: one-hot)");
    auto* ana = app.add_subcommand("analyze", "Risk-ratio and precision-correlation analyses");
    common(ana);
    scoring(ana);
    ana->add_option("--pred", pred, "Predicted highlights JSONL");
    ana->add_option("--gold", gold, "Gold highlights JSONL");
    ana->add_option("--embeddings", embeddings, "Token embedding table (default: one-hot)");
    ana->add_option("--bins", bins, "Precision bins")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        if (const char* env = std::getenv(kEndpointEnv); env && *env) c.endpoint = env;
        if (!corpus.empty()) c.corpus = corpus;
        if (!out_dir.empty()) c.output_dir = out_dir;
        if (!risk_lexicon.empty()) c.risk_lexicon = risk_lexicon;
        if (!summary_lexicon.empty()) c.summary_lexicon = summary_lexicon;
        if (!valence_lexicon.empty()) c.valence_lexicon = valence_lexicon;
        if (!model.empty()) c.model = model;
        if (!scorer.empty()) c.scorer = scorer;
        if (!generator.empty()) c.generator = generator;
        if (!fill_policy.empty()) c.fill_policy = fill_policy;
        if (split_on_comma) c.split_on_comma = true;
        if (seed) c.seed = *seed;
        if (jobs) c.jobs = *jobs;
        if (word_budget) c.word_budget = *word_budget;
        if (min_candidate_words) c.min_candidate_words = *min_candidate_words;
        if (balance_tolerance) c.balance_tolerance = *balance_tolerance;
        if (epochs) c.epochs = *epochs;
        if (threshold) c.risk_threshold = *threshold;
        if (val_fraction) c.val_fraction = *val_fraction;
        if (learning_rate) c.learning_rate = *learning_rate;
        c.validate();
        err << "riskev " << kVersion << ": seed " << c.seed << ", config " << c.hash() << '\n';

        if (seg->parsed()) {
            commands::segment(c, err);
        } else if (bds->parsed()) {
            Pipeline p(c);
            commands::build_dataset(c, p.risk_lexicon(), err);
        } else if (trn->parsed()) {
            auto path = dataset_path.empty() ? (std::filesystem::path(c.output_dir) / "dataset.jsonl").string() : dataset_path;
            commands::train(c, path, err);
        } else if (scr->parsed()) {
            commands::score(Pipeline(c), err);
        } else if (hl->parsed()) {
            commands::highlight(Pipeline(c), err);
        } else if (sum->parsed()) {
            commands::summarize(Pipeline(c), err);
        } else if (evl->parsed()) {
            commands::evaluate(c, pred, gold, embeddings, out, err);
        } else if (ana->parsed()) {
            if (c.corpus.empty() && (pred.empty() || gold.empty()))
                throw InputError("analyze needs --corpus and/or --pred with --gold");
            commands::analyze(Pipeline(c), pred, gold, embeddings, bins, err);
        }
    } catch (const TransportError& e) {
        err << "error: model service (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return kExitRemote;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}

}  // namespace riskev
