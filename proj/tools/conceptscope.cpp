// conceptscope: command-line driver for the concept-novelty pipeline.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "conceptscope.hpp"

namespace cs = conceptscope;

namespace {

struct PipelineFlags {
    std::string config_file;
    std::vector<std::string> assignments;
    bool deterministic = false;
    // flag name -> (config key, value)
    std::map<std::string, std::pair<std::string, std::string>> named;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& flags) {
    cmd->add_option("-c,--config", flags.config_file, "key=value configuration file");
    cmd->add_option("--set", flags.assignments, "override one configuration key (key=value), repeatable");
    cmd->add_flag("--deterministic", flags.deterministic, "single-threaded, reproducible embedding training");
    const std::vector<std::tuple<std::string, std::string, std::string>> shortcuts = {
        {"-o,--output", "output.dir", "output directory"},
        {"--corpus", "corpus.path", "corpus file (JSONL or CSV)"},
        {"--format", "corpus.format", "corpus format: auto, jsonl or csv"},
        {"--pretrained", "embedding.pretrained", "pretrained vectors (TSV or binary); skips training"},
        {"--first-years", "timeline.first_years", "term<TAB>first_year file replacing corpus-derived years"},
        {"--baseline-end", "timeline.baseline_end", "last year of the baseline window"},
        {"--analysis-end", "timeline.analysis_end", "last analysis year"},
        {"--n", "metrics.n", "subgraph size"},
        {"--n-samples", "metrics.n_samples", "subgraphs per year"},
        {"--robustness", "metrics.robustness", "extra subgraph sizes, comma separated"},
        {"--alpha", "stats.alpha", "KS significance level"},
        {"--seed", "seed", "base seed"},
        {"--threads", "threads", "worker threads"},
    };
    for (const auto& [name, key, help] : shortcuts) {
        const std::string flag_name = name;
        const std::string config_key = key;
        cmd->add_option_function<std::string>(
            name, [&flags, flag_name, config_key](const std::string& v) { flags.named[flag_name] = {config_key, v}; },
            help);
    }
}

cs::Settings resolve_settings(const PipelineFlags& flags) {
    cs::Settings settings;
    if (!flags.config_file.empty()) settings.load_file(flags.config_file);
    for (const auto& a : flags.assignments) settings.set_assignment(a);
    for (const auto& [flag, kv] : flags.named) settings.set(kv.first, kv.second);
    if (flags.deterministic) settings.set("deterministic", "true");
    return settings;
}

void print_failure(const cs::StageFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.partial_artifacts().empty()) {
        std::cerr << "partial artifacts: none\n";
    } else {
        std::cerr << "partial artifacts:\n";
        for (const auto& p : e.partial_artifacts()) std::cerr << "  " << p << '\n';
    }
}

int run_stages(const PipelineFlags& flags, const std::vector<cs::Stage>& stages, bool all) {
    std::optional<cs::Pipeline> pipeline;
    try {
        pipeline.emplace(resolve_settings(flags), &std::cerr);
    } catch (const cs::Error& e) {
        std::cerr << "error: configuration: " << e.what() << '\n';
        return cs::exit_code::config;
    }
    try {
        if (all) {
            const auto summary = pipeline->run_all();
            std::cout << summary.manifest.string() << '\n';
        } else {
            for (auto s : stages) pipeline->run_stage(s);
        }
    } catch (const cs::StageFailure& e) {
        print_failure(e);
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

struct SynthFlags {
    std::string out;
    std::string drift = "converging";
    cs::SyntheticSpec spec;
};

int run_synth(SynthFlags& flags) {
    try {
        flags.spec.drift = cs::drift_from_string(flags.drift);
        const auto corpus = cs::generate_synthetic(flags.spec);
        const auto files = cs::write_synthetic(flags.spec, corpus, flags.out);
        const auto conf = std::filesystem::path(flags.out) / "synthetic.conf";
        std::ofstream out(conf, std::ios::binary);
        out << "corpus.path = corpus.jsonl\n"
            << "corpus.format = jsonl\n"
            << "embedding.pretrained = vectors.tsv\n"
            << "embedding.format = tsv\n"
            << "timeline.baseline_end = " << flags.spec.baseline_end() << '\n'
            << "timeline.analysis_end = " << flags.spec.analysis_end() << '\n'
            << "seed = " << flags.spec.seed << '\n';
        if (!out) throw cs::IoError("cannot write '" + conf.string() + "'");
        std::cout << files.corpus.string() << '\n' << files.vectors.string() << '\n' << files.truth.string() << '\n'
                  << conf.string() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: stage 'synth' failed: " << e.what() << '\n';
        return cs::exit_code::synth;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conceptscope: concept novelty and convergence metrics over a dated text corpus"};
    app.require_subcommand(1);

    PipelineFlags flags;
    const std::vector<std::pair<cs::Stage, std::string>> stage_help = {
        {cs::Stage::ingest, "validate the corpus and write documents.jsonl"},
        {cs::Stage::vocab, "detect phrases and build the concept vocabulary"},
        {cs::Stage::train, "train SGNS embeddings (or import pretrained vectors)"},
        {cs::Stage::timeline, "first-appearance years, growth and new-concept ratios"},
        {cs::Stage::metrics, "sampled w_G, w_N and dIC series"},
        {cs::Stage::stats, "KS significance matrices and trend summary"},
        {cs::Stage::report, "SVG charts and subgraph export"},
    };
    std::vector<std::pair<CLI::App*, cs::Stage>> stage_commands;
    for (const auto& [stage, help] : stage_help) {
        auto* cmd = app.add_subcommand(cs::stage_name(stage), help);
        add_pipeline_flags(cmd, flags);
        stage_commands.emplace_back(cmd, stage);
    }
    auto* run = app.add_subcommand("run", "run every stage and write manifest.json");
    add_pipeline_flags(run, flags);

    SynthFlags synth;
    auto* gen = app.add_subcommand("synth", "generate a synthetic corpus with known drift");
    gen->add_option("-o,--out", synth.out, "output directory")->required();
    gen->add_option("--drift", synth.drift, "none, converging or diverging")->capture_default_str();
    gen->add_option("--years", synth.spec.years, "analysis years")->capture_default_str();
    gen->add_option("--baseline-years", synth.spec.baseline_years, "baseline years")->capture_default_str();
    gen->add_option("--start-year", synth.spec.start_year, "first corpus year")->capture_default_str();
    gen->add_option("--docs-per-year", synth.spec.docs_per_year, "documents per year")->capture_default_str();
    gen->add_option("--baseline-vocab", synth.spec.baseline_vocab_size, "baseline concepts")->capture_default_str();
    gen->add_option("--new-per-year", synth.spec.new_per_year, "new concepts per analysis year")->capture_default_str();
    gen->add_option("--concepts-per-doc", synth.spec.concepts_per_doc, "concepts per document")->capture_default_str();
    gen->add_option("--dim", synth.spec.dimension, "vector dimension")->capture_default_str();
    gen->add_option("--sim-start", synth.spec.sim_start, "anchor similarity at the low end")->capture_default_str();
    gen->add_option("--sim-end", synth.spec.sim_end, "anchor similarity at the high end")->capture_default_str();
    gen->add_option("--centroid-start", synth.spec.centroid_start, "centroid weight at the low end")->capture_default_str();
    gen->add_option("--centroid-end", synth.spec.centroid_end, "centroid weight at the high end")->capture_default_str();
    gen->add_option("--seed", synth.spec.seed, "seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cs::exit_code::config;
    }

    if (gen->parsed()) return run_synth(synth);
    if (run->parsed()) return run_stages(flags, {}, true);
    for (const auto& [cmd, stage] : stage_commands)
        if (cmd->parsed()) return run_stages(flags, {stage}, false);
    return cs::exit_code::config;
}
