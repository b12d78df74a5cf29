#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "test_util.hpp"

using namespace conceptscope;
using testutil::read_file;
using testutil::scratch;
using testutil::write_file;
namespace fs = std::filesystem;

namespace {

SyntheticSpec tiny_spec() {
    SyntheticSpec s;
    s.years = 6;
    s.baseline_years = 2;
    s.docs_per_year = 40;
    s.baseline_vocab_size = 120;
    s.new_per_year = 10;
    s.concepts_per_doc = 8;
    s.dimension = 16;
    s.seed = 3;
    return s;
}

// Synthetic corpus plus vectors written once per test directory; returns matching settings.
Settings tiny_settings(const fs::path& dir) {
    const auto spec = tiny_spec();
    const auto files = write_synthetic(spec, generate_synthetic(spec), dir / "data");
    Settings s;
    s.set("corpus.path", files.corpus.string());
    s.set("embedding.pretrained", files.vectors.string());
    s.set("timeline.baseline_end", std::to_string(spec.baseline_end()));
    s.set("timeline.analysis_end", std::to_string(spec.analysis_end()));
    s.set("metrics.n", "20");
    s.set("metrics.n_samples", "5");
    s.set("metrics.robustness", "10,40");
    s.set("metrics.within_docs", "30");
    s.set("report.subgraph_size", "20");
    s.set("output.dir", (dir / "out").string());
    s.set("deterministic", "true");
    return s;
}

int run_cli(const std::string& args) {
    const int status = std::system((std::string(CONCEPTSCOPE_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Pipeline, RunAllWritesEveryArtifactAndManifest) {
    const auto dir = scratch("all");
    Pipeline p(tiny_settings(dir));
    const auto summary = p.run_all();
    ASSERT_EQ(summary.stages.size(), 7u);
    const auto out = dir / "out";
    for (const char* rel : {"documents.jsonl", "ingest_report.json", "vocabulary.tsv", "embeddings.bin", "timeline.tsv",
                            "timeline.json", "growth.csv", "new_per_document.csv", "rolling_new_ratio.csv",
                            "series/w_G_20_5.csv", "series/w_N_20_5.csv", "series/dIC_20_5.csv", "series/w_G_10_5.csv",
                            "series/w_N_40_5.csv", "series/within_doc_30.csv", "samples/w_G_20_5.csv", "metrics.json",
                            "stats/ks_w_G_years.csv", "stats/ks_dIC_periods_significance.csv", "stats/trends.csv",
                            "figures/growth.svg", "figures/w_N_20_5.svg", "figures/robustness_w_G.svg",
                            "figures/ks_w_N_years.svg", "figures/subgraph_1983_20.csv",
                            "figures/subgraph_1983_20_network.svg", "figures/subgraph_1983_20_matrix.svg",
                            "manifest.json"})
        EXPECT_TRUE(fs::exists(out / rel)) << rel;

    const auto manifest = nlohmann::json::parse(read_file(summary.manifest));
    EXPECT_EQ(manifest["seed"], 1);
    EXPECT_EQ(manifest["stages"].size(), 7u);
    EXPECT_FALSE(manifest["config"].contains("output.dir"));
    for (const auto& o : manifest["outputs"])
        EXPECT_EQ(o["sha256"], sha256_file(out / o["path"].get<std::string>())) << o["path"];
    const auto series = read_series_csv(out / "series/w_G_20_5.csv");
    EXPECT_EQ(series.records.size(), 6u);
}

TEST(Pipeline, RerunReusesCachedStagesAndKeepsManifest) {
    const auto dir = scratch("cache");
    const auto settings = tiny_settings(dir);
    const auto first = Pipeline(settings).run_all();
    const auto manifest = read_file(first.manifest);
    const auto again = Pipeline(settings).run_all();
    for (const auto& s : again.stages) EXPECT_TRUE(s.cached) << stage_name(s.stage);
    EXPECT_EQ(read_file(again.manifest), manifest);
}

TEST(Pipeline, ChangingMetricSettingsRerunsOnlyDownstream) {
    const auto dir = scratch("partial");
    auto settings = tiny_settings(dir);
    Pipeline(settings).run_all();
    settings.set("metrics.n", "25");
    const auto again = Pipeline(settings).run_all();
    for (const auto& s : again.stages) {
        const bool upstream = s.stage == Stage::ingest || s.stage == Stage::vocab || s.stage == Stage::train ||
                              s.stage == Stage::timeline;
        EXPECT_EQ(s.cached, upstream) << stage_name(s.stage);
    }
    EXPECT_TRUE(fs::exists(dir / "out/series/w_G_25_5.csv"));
}

TEST(Pipeline, OutputDirectoryDoesNotAffectResults) {
    const auto dir = scratch("two_dirs");
    auto settings = tiny_settings(dir);
    const auto a = Pipeline(settings).run_all();
    settings.set("output.dir", (dir / "other").string());
    const auto b = Pipeline(settings).run_all();
    EXPECT_EQ(read_file(a.manifest), read_file(b.manifest));
    EXPECT_EQ(read_file(dir / "out/figures/w_G_20_5.svg"), read_file(dir / "other/figures/w_G_20_5.svg"));
}

TEST(Pipeline, MissingCorpusAbortsAtIngest) {
    const auto dir = scratch("missing");
    Settings s;
    s.set("corpus.path", (dir / "nope.jsonl").string());
    s.set("output.dir", (dir / "out").string());
    try {
        Pipeline(s).run_all();
        FAIL() << "expected StageFailure";
    } catch (const StageFailure& e) {
        EXPECT_EQ(e.stage(), Stage::ingest);
        EXPECT_EQ(e.exit_code(), 10);
        EXPECT_TRUE(e.partial_artifacts().empty());
    }
}

TEST(Pipeline, StageWithoutUpstreamOutputFails) {
    const auto dir = scratch("upstream");
    Pipeline p(tiny_settings(dir));
    try {
        p.run_stage(Stage::metrics);
        FAIL() << "expected StageFailure";
    } catch (const StageFailure& e) {
        EXPECT_EQ(e.stage(), Stage::metrics);
        EXPECT_EQ(e.exit_code(), 14);
        EXPECT_NE(std::string(e.what()).find("vocabulary.tsv"), std::string::npos) << e.what();
    }
}

TEST(Pipeline, TrainsEmbeddingsWhenNoPretrainedVectors) {
    const auto dir = scratch("train");
    auto settings = tiny_settings(dir);
    settings.set("embedding.pretrained", "");
    settings.set("embedding.dim", "8");
    settings.set("embedding.epochs", "1");
    settings.set("vocab.min_count", "2");
    settings.set("metrics.within_docs", "0");
    const auto summary = Pipeline(settings).run_all();
    const auto m = read_embeddings_binary(dir / "out/embeddings.bin");
    EXPECT_EQ(m.dimension(), 8u);
    EXPECT_GT(m.size(), 100u);
    EXPECT_TRUE(fs::exists(dir / "out/series/w_N_20_5.csv"));
}

TEST(Pipeline, ExternalFirstYearsReplaceCorpusDerivedYears) {
    const auto dir = scratch("first_years");
    auto settings = tiny_settings(dir);
    Pipeline(settings).run_stage(Stage::ingest);
    Pipeline(settings).run_stage(Stage::vocab);
    // every concept moved into the baseline
    std::ifstream vin(dir / "out/vocabulary.tsv");
    const auto vocab = read_vocabulary_tsv(vin);
    std::string tsv;
    for (const auto& e : vocab.entries()) tsv += e.term + "\t1977\n";
    write_file(dir / "first.tsv", tsv);
    settings.set("timeline.first_years", (dir / "first.tsv").string());
    Pipeline(settings).run_stage(Stage::timeline);
    const auto meta = nlohmann::json::parse(read_file(dir / "out/timeline.json"));
    EXPECT_EQ(meta["baseline_concepts"], vocab.size());
}

TEST(Pipeline, TrendRho) {
    MetricSeries s{"w_N", {{1, 0.1, 0.0, 1}, {2, std::nullopt, std::nullopt, 0}, {3, 0.3, 0.0, 1}, {4, 0.2, 0.0, 1}}};
    EXPECT_NEAR(*trend_rho(s), 0.5, 1e-12);
    EXPECT_FALSE(trend_rho(MetricSeries{"w_N", {{1, 0.1, 0.0, 1}}}));
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("cli");
    EXPECT_EQ(run_cli("run -c " + (dir / "absent.conf").string()), 2);
    EXPECT_EQ(run_cli("run --bogus-flag"), 2);
    EXPECT_EQ(run_cli("run --set metrics.n=1 -o " + (dir / "o").string()), 2);
    EXPECT_EQ(run_cli("run --corpus " + (dir / "absent.jsonl").string() + " -o " + (dir / "o").string()), 10);
    EXPECT_EQ(run_cli("synth -o " + (dir / "s").string() + " --years 1"), 17);
}

TEST(Cli, SynthThenRunSucceeds) {
    const auto dir = scratch("cli_run");
    ASSERT_EQ(run_cli("synth -o " + (dir / "data").string() +
                      " --years 4 --baseline-years 2 --docs-per-year 30 --baseline-vocab 80 --new-per-year 8"
                      " --concepts-per-doc 8 --dim 16"),
              0);
    EXPECT_TRUE(fs::exists(dir / "data/synthetic.conf"));
    EXPECT_EQ(run_cli("run -c " + (dir / "data/synthetic.conf").string() + " -o " + (dir / "out").string() +
                      " --n 15 --n-samples 4 --set report.subgraph_size=15 --deterministic"),
              0);
    EXPECT_TRUE(fs::exists(dir / "out/manifest.json"));
    EXPECT_EQ(run_cli("stats -c " + (dir / "data/synthetic.conf").string() + " -o " + (dir / "out").string() +
                      " --n 15 --n-samples 4 --alpha 0.01"),
              0);
}
