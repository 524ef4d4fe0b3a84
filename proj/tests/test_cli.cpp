#include <gtest/gtest.h>

#include <riskev/cli.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace riskev;
namespace fs = std::filesystem;

namespace {

const std::string kCorpus = std::string(RISKEV_DATA_DIR) + "/synthetic_corpus.jsonl";

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "riskev");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_command(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    auto d = fs::temp_directory_path() / ("riskev_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Config, ParsesKnownKeys) {
    auto c = parse_config(R"(
corpus = "c.jsonl"
seed = 7
word_budget = 120
risk_threshold = 0.7
fill_policy = "skip"
split_on_comma = true
)");
    EXPECT_EQ(c.corpus, "c.jsonl");
    EXPECT_EQ(c.seed, 7);
    EXPECT_EQ(c.word_budget, 120);
    EXPECT_DOUBLE_EQ(c.risk_threshold, 0.7);
    EXPECT_EQ(c.highlight().fill, FillPolicy::skip_and_continue);
    EXPECT_TRUE(c.segmentation().split_on_comma);
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
    EXPECT_THROW(parse_config("budget = 3"), InputError);
    EXPECT_THROW(parse_config("seed = \"seven\""), InputError);
    EXPECT_THROW(parse_config("seed = "), InputError);
}

TEST(Config, ValidateCatchesBadValues) {
    PipelineConfig c;
    c.scorer = "magic";
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.val_fraction = 0.0;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.word_budget = 0;
    EXPECT_THROW(c.validate(), InputError);
}

TEST(Config, HashIgnoresPathsButNotSettings) {
    PipelineConfig a, b;
    b.corpus = "elsewhere.jsonl";
    b.output_dir = "/tmp/x";
    b.jobs = 8;
    EXPECT_EQ(a.hash(), b.hash());
    b.seed = 1;
    EXPECT_NE(a.hash(), b.hash());
}

TEST(ParallelMap, KeepsOrderAndPropagatesErrors) {
    auto v = parallel_map(100, 4, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
    EXPECT_THROW(parallel_map(10, 3,
                              [](std::size_t i) {
                                  if (i == 5) throw InputError("boom");
                                  return i;
                              }),
                 InputError);
}

TEST(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run({}).code, kExitInput); }

TEST(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(run({"bogus"}).code, kExitInput); }

TEST(Cli, VersionFlag) {
    auto r = run({"--version"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find(std::string(kVersion)), std::string::npos);
}

TEST(Cli, MissingCorpusIsInputError) {
    auto d = fresh_dir("missing");
    auto r = run({"segment", "--corpus", "/nonexistent.jsonl", "--out", d.string()});
    EXPECT_EQ(r.code, kExitInput);
    EXPECT_NE(r.err.find("nonexistent"), std::string::npos);
}

TEST(Cli, RemoteScorerWithoutEndpointIsInputError) {
    auto d = fresh_dir("noendpoint");
    unsetenv(kEndpointEnv);
    EXPECT_EQ(run({"score", "--corpus", kCorpus, "--scorer", "remote", "--out", d.string()}).code, kExitInput);
}

TEST(Cli, UnreachableServiceExitsTwo) {
    auto d = fresh_dir("unreachable");
    {
        std::ofstream os(d / "remote.toml");
        os << "scorer = \"remote\"\ntimeout_ms = 2000\n";
    }
    // nothing listens on port 1
    setenv(kEndpointEnv, "http://127.0.0.1:1", 1);
    auto r = run({"score", "--config", (d / "remote.toml").string(), "--corpus", kCorpus, "--out", d.string()});
    unsetenv(kEndpointEnv);
    EXPECT_EQ(r.code, kExitRemote) << r.err;
    EXPECT_NE(r.err.find("model service"), std::string::npos);
}

TEST(Cli, SegmentWritesSentencesWithOffsets) {
    auto d = fresh_dir("segment");
    ASSERT_EQ(run({"segment", "--corpus", kCorpus, "--out", d.string()}).code, kExitOk);
    std::istringstream in(slurp(d / "sentences.jsonl"));
    std::string line;
    std::getline(in, line);
    EXPECT_TRUE(nlohmann::json::parse(line).contains("_meta"));
    std::size_t n = 0;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        EXPECT_LT(j["char_start"].get<std::size_t>(), j["char_end"].get<std::size_t>());
        ++n;
    }
    EXPECT_EQ(n, 200u);
}

TEST(Cli, BuildDatasetTwiceByteIdentical) {
    auto a = fresh_dir("ds_a"), b = fresh_dir("ds_b");
    ASSERT_EQ(run({"build-dataset", "--corpus", kCorpus, "--seed", "7", "--out", a.string()}).code, kExitOk);
    ASSERT_EQ(run({"build-dataset", "--corpus", kCorpus, "--seed", "7", "--out", b.string()}).code, kExitOk);
    EXPECT_EQ(slurp(a / "dataset.jsonl"), slurp(b / "dataset.jsonl"));
    EXPECT_FALSE(slurp(a / "dataset.jsonl").empty());
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
    auto d = fresh_dir("config");
    {
        std::ofstream os(d / "run.toml");
        os << "corpus = \"" << kCorpus << "\"\nseed = 3\noutput_dir = \"" << d.string() << "\"\n";
    }
    auto r = run({"build-dataset", "--config", (d / "run.toml").string(), "--seed", "9"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.err.find("seed 9"), std::string::npos);
    auto first = slurp(d / "dataset.jsonl");
    EXPECT_NE(first.find("\"seed\":9"), std::string::npos);
}

TEST(Cli, FullPipelineProducesEveryArtifact) {
    auto d = fresh_dir("full");
    const auto out = d.string();
    ASSERT_EQ(run({"build-dataset", "--corpus", kCorpus, "--seed", "7", "--out", out}).code, kExitOk);
    ASSERT_EQ(run({"train-baseline", "--seed", "7", "--out", out}).code, kExitOk);
    const auto model = (d / "baseline_model.txt").string();
    ASSERT_EQ(run({"score", "--corpus", kCorpus, "--model", model, "--out", out}).code, kExitOk);
    ASSERT_EQ(run({"highlight", "--corpus", kCorpus, "--model", model, "--out", out}).code, kExitOk);
    ASSERT_EQ(run({"summarize", "--corpus", kCorpus, "--model", model, "--out", out}).code, kExitOk);
    const auto hl = (d / "highlights.jsonl").string();
    auto ev = run({"evaluate", "--pred", hl, "--gold", hl, "--out", out});
    ASSERT_EQ(ev.code, kExitOk) << ev.err;
    ASSERT_EQ(run({"analyze", "--corpus", kCorpus, "--model", model, "--pred", hl, "--gold", hl, "--bins", "4",
                   "--out", out})
                  .code,
              kExitOk);
    for (const auto* f : {"dataset.jsonl", "baseline_model.txt", "training_metrics.csv", "scores.jsonl",
                          "highlights.jsonl", "summaries.jsonl", "evaluation.json", "span_scores.csv", "risk_ratio.csv",
                          "precision_correlation.csv"})
        EXPECT_TRUE(fs::exists(d / f)) << f;

    auto report = nlohmann::json::parse(slurp(d / "evaluation.json"));
    EXPECT_DOUBLE_EQ(report["recall"].get<double>(), 1.0);

    auto summaries = slurp(d / "summaries.jsonl");
    EXPECT_NE(summaries.find("This person is at high risk of suicide."), std::string::npos);
    EXPECT_NE(summaries.find("This person is at low risk of suicide."), std::string::npos);
}

TEST(Cli, HighlightsRoundTripThroughReader) {
    auto d = fresh_dir("hlread");
    ASSERT_EQ(run({"highlight", "--corpus", kCorpus, "--out", d.string()}).code, kExitOk);
    auto records = read_highlights_jsonl((d / "highlights.jsonl").string());
    EXPECT_EQ(records.size(), 20u);
    for (const auto& [user, spans] : records)
        for (const auto& s : spans) EXPECT_FALSE(s.text.empty());
}
