#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "conceptscope/checksum.hpp"
#include "conceptscope/common.hpp"
#include "conceptscope/config.hpp"
#include "conceptscope/corpus.hpp"
#include "conceptscope/embedding_io.hpp"
#include "conceptscope/metrics.hpp"
#include "conceptscope/phrases.hpp"
#include "conceptscope/report.hpp"
#include "conceptscope/sgns.hpp"
#include "conceptscope/stats.hpp"
#include "conceptscope/timeline.hpp"
#include "conceptscope/vocabulary.hpp"

namespace conceptscope {

namespace fs = std::filesystem;

enum class Stage { ingest, vocab, train, timeline, metrics, stats, report };

inline constexpr Stage all_stages[] = {Stage::ingest,  Stage::vocab, Stage::train, Stage::timeline,
                                       Stage::metrics, Stage::stats, Stage::report};

inline const char* stage_name(Stage s) {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::vocab: return "vocab";
        case Stage::train: return "train";
        case Stage::timeline: return "timeline";
        case Stage::metrics: return "metrics";
        case Stage::stats: return "stats";
        case Stage::report: return "report";
    }
    return "unknown";
}

namespace exit_code {
inline constexpr int config = 2;
inline constexpr int synth = 17;
inline int for_stage(Stage s) { return 10 + static_cast<int>(s); }
}  // namespace exit_code

/// A stage aborted. Carries the stage and whatever it had already written.
class StageFailure : public Error {
public:
    StageFailure(Stage stage, const std::string& message, std::vector<std::string> partial)
        : Error(std::string("stage '") + stage_name(stage) + "' failed: " + message), stage_(stage),
          partial_(std::move(partial)) {}

    Stage stage() const { return stage_; }
    const std::vector<std::string>& partial_artifacts() const { return partial_; }
    int exit_code() const { return exit_code::for_stage(stage_); }

private:
    Stage stage_;
    std::vector<std::string> partial_;
};

struct StageResult {
    Stage stage;
    bool cached = false;
    std::vector<std::string> outputs;  // relative to the output directory
};

struct RunSummary {
    std::vector<StageResult> stages;
    fs::path manifest;
};

// ---------------------------------------------------------------------------------------------
// Small file helpers shared by the stages

namespace io {

inline void write_lines(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    body(out);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline nlohmann::ordered_json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    try {
        return nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

inline void write_samples_csv(std::ostream& out, const std::map<Year, std::vector<double>>& samples) {
    csv::write_row(out, {"year", "index", "value"});
    for (const auto& [year, values] : samples)
        for (std::size_t i = 0; i < values.size(); ++i)
            csv::write_row(out, {std::to_string(year), std::to_string(i), csv::format_real(values[i])});
}

inline std::map<Year, std::vector<double>> read_samples_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row) || row != std::vector<std::string>{"year", "index", "value"})
        throw DataError("samples csv '" + path.string() + "': bad header");
    std::map<Year, std::vector<double>> out;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 3) throw DataError("samples csv line " + std::to_string(reader.line()) + ": expected 3 fields");
        const auto v = csv::parse_real(row[2]);
        if (!v) throw DataError("samples csv line " + std::to_string(reader.line()) + ": missing value");
        out[static_cast<Year>(csv::parse_int(row[0]))].push_back(*v);
    }
    return out;
}

}  // namespace io

/// Labels per-year samples by year, dropping years without values.
inline LabeledSamples yearly_labels(const std::map<Year, std::vector<double>>& samples) {
    LabeledSamples out;
    for (const auto& [year, values] : samples)
        if (!values.empty()) out.emplace_back(std::to_string(year), values);
    return out;
}

inline std::map<Year, std::vector<double>> non_empty(const std::map<Year, std::vector<double>>& samples) {
    std::map<Year, std::vector<double>> out;
    for (const auto& [year, values] : samples)
        if (!values.empty()) out.emplace(year, values);
    return out;
}

/// Spearman rho between year and yearly mean, over years with a value.
inline std::optional<double> trend_rho(const MetricSeries& series) {
    std::vector<double> years, means;
    for (const auto& r : series.records)
        if (r.mean) {
            years.push_back(r.year);
            means.push_back(*r.mean);
        }
    if (years.size() < 2) return std::nullopt;
    return spearman(years, means);
}

// ---------------------------------------------------------------------------------------------

/// Runs the stages against one output directory. Each stage reads its inputs from files
/// written by earlier stages, so any stage can be rerun on its own.
class Pipeline {
public:
    explicit Pipeline(Settings settings, std::ostream* log = nullptr)
        : settings_(std::move(settings)), config_(RunConfig::from(settings_)), out_(config_.resolved_output_dir()),
          log_(log) {}

    const RunConfig& config() const { return config_; }
    const Settings& settings() const { return settings_; }
    const fs::path& output_dir() const { return out_; }

    StageResult run_stage(Stage stage) {
        switch (stage) {
            case Stage::ingest: return ingest();
            case Stage::vocab: return vocab();
            case Stage::train: return train();
            case Stage::timeline: return timeline();
            case Stage::metrics: return metrics();
            case Stage::stats: return stats();
            case Stage::report: return report();
        }
        throw InvalidArgument("unknown stage");
    }

    /// All stages in order, then manifest.json.
    RunSummary run_all() {
        RunSummary summary;
        for (Stage s : all_stages) summary.stages.push_back(run_stage(s));
        summary.manifest = write_manifest(summary.stages);
        return summary;
    }

    fs::path write_manifest(const std::vector<StageResult>& stages) const {
        nlohmann::ordered_json manifest;
        manifest["tool"] = "conceptscope";
        manifest["manifest_version"] = 1;
        manifest["seed"] = config_.seed;
        manifest["config_hash"] = sha256_hex(settings_.canonical());
        nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
        for (const auto& [k, v] : settings_.values())
            if (k != "output.dir") cfg[k] = v;
        manifest["config"] = std::move(cfg);
        nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
        for (const auto& [key, path] : external_inputs())
            inputs.push_back({{"key", key}, {"path", path.string()}, {"sha256", sha256_file(path)}});
        manifest["inputs"] = std::move(inputs);
        nlohmann::ordered_json stage_names = nlohmann::ordered_json::array();
        std::vector<std::string> outputs;
        for (const auto& s : stages) {
            stage_names.push_back(stage_name(s.stage));
            outputs.insert(outputs.end(), s.outputs.begin(), s.outputs.end());
        }
        manifest["stages"] = std::move(stage_names);
        std::sort(outputs.begin(), outputs.end());
        outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
        nlohmann::ordered_json listed = nlohmann::ordered_json::array();
        for (const auto& rel : outputs) listed.push_back({{"path", rel}, {"sha256", sha256_file(out_ / rel)}});
        manifest["outputs"] = std::move(listed);
        const auto path = out_ / "manifest.json";
        io::write_lines(path, [&](std::ostream& out) { out << manifest.dump(2) << '\n'; });
        return path;
    }

private:
    using Body = std::function<void()>;

    struct StageSpec {
        Stage stage;
        std::vector<std::string> config_prefixes;
        std::vector<fs::path> internal_inputs;  // relative to out_
        std::vector<fs::path> external_inputs;
    };

    void log(const std::string& line) const {
        if (log_) *log_ << line << '\n';
    }

    std::vector<std::pair<std::string, fs::path>> external_inputs() const {
        std::vector<std::pair<std::string, fs::path>> v;
        if (!config_.corpus_path.empty()) v.emplace_back("corpus.path", config_.corpus_path);
        if (!config_.pretrained.empty()) v.emplace_back("embedding.pretrained", config_.pretrained);
        if (!config_.first_years.empty()) v.emplace_back("timeline.first_years", config_.first_years);
        return v;
    }

    /// Registers an output path (relative), creating its directory.
    fs::path artifact(const std::string& rel) {
        const auto path = out_ / rel;
        fs::create_directories(path.parent_path());
        written_.push_back(rel);
        return path;
    }

    fs::path input(const std::string& rel, Stage producer) const {
        const auto path = out_ / rel;
        if (!fs::exists(path))
            throw DataError("missing input '" + rel + "'; run stage '" + stage_name(producer) + "' first");
        return path;
    }

    std::string cache_key(const StageSpec& spec) const {
        Sha256 h;
        h.update(std::string("stage=") + stage_name(spec.stage) + "\n");
        h.update(settings_.canonical(spec.config_prefixes));
        for (const auto& rel : spec.internal_inputs)
            h.update("input " + rel.generic_string() + " " + sha256_file(out_ / rel) + "\n");
        for (const auto& path : spec.external_inputs) h.update("external " + sha256_file(path) + "\n");
        return h.hex();
    }

    fs::path sidecar(Stage s) const { return out_ / ".stage" / (std::string(stage_name(s)) + ".json"); }

    std::optional<std::vector<std::string>> cached_outputs(Stage s, const std::string& key) const {
        const auto path = sidecar(s);
        if (!fs::exists(path)) return std::nullopt;
        try {
            const auto meta = io::read_json(path);
            if (meta.value("key", "") != key) return std::nullopt;
            std::vector<std::string> outputs;
            for (const auto& [rel, sum] : meta.at("outputs").items()) {
                const auto file = out_ / rel;
                if (!fs::exists(file) || sha256_file(file) != sum.get<std::string>()) return std::nullopt;
                outputs.push_back(rel);
            }
            return outputs;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    StageResult execute(const StageSpec& spec, const Body& body) {
        written_.clear();
        StageResult result{spec.stage, false, {}};
        try {
            fs::create_directories(out_);
            for (const auto& path : spec.external_inputs)
                if (!fs::exists(path)) throw IoError("input file '" + path.string() + "' does not exist");
            for (const auto& rel : spec.internal_inputs)
                if (!fs::exists(out_ / rel)) throw DataError("missing input '" + rel.generic_string() + "'");
            const std::string key = cache_key(spec);
            if (auto outputs = cached_outputs(spec.stage, key)) {
                result.cached = true;
                result.outputs = std::move(*outputs);
                log(std::string("[") + stage_name(spec.stage) + "] up to date, reusing " +
                    std::to_string(result.outputs.size()) + " artifacts");
                return result;
            }
            fs::remove(sidecar(spec.stage));
            body();
            nlohmann::ordered_json meta;
            meta["stage"] = stage_name(spec.stage);
            meta["key"] = key;
            meta["seed"] = config_.seed;
            nlohmann::ordered_json sums = nlohmann::ordered_json::object();
            std::sort(written_.begin(), written_.end());
            for (const auto& rel : written_) sums[rel] = sha256_file(out_ / rel);
            meta["outputs"] = std::move(sums);
            fs::create_directories(sidecar(spec.stage).parent_path());
            io::write_lines(sidecar(spec.stage), [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
            result.outputs = written_;
            return result;
        } catch (const StageFailure&) {
            throw;
        } catch (const std::exception& e) {
            std::vector<std::string> partial;
            for (const auto& rel : written_)
                if (fs::exists(out_ / rel)) partial.push_back(rel);
            throw StageFailure(spec.stage, e.what(), std::move(partial));
        }
    }

    // -- loaders -------------------------------------------------------------------------------

    std::vector<Document> load_documents() const {
        return ingest_documents(input("documents.jsonl", Stage::ingest), CorpusFormat::jsonl).documents;
    }

    Vocabulary load_vocabulary() const {
        std::ifstream in(input("vocabulary.tsv", Stage::vocab), std::ios::binary);
        return read_vocabulary_tsv(in);
    }

    EmbeddingMatrix load_matrix(const Vocabulary& vocab) const {
        auto m = read_embeddings_binary(input("embeddings.bin", Stage::train), true);
        if (m.size() != vocab.size()) throw DataError("embeddings.bin does not match vocabulary.tsv");
        for (std::size_t i = 0; i < vocab.size(); ++i)
            if (m.term(static_cast<ConceptId>(i)) != vocab.term(static_cast<ConceptId>(i)))
                throw DataError("embeddings.bin row order does not match vocabulary.tsv");
        return m;
    }

    ConceptTimeline load_timeline(const Vocabulary& vocab) const {
        const auto meta = io::read_json(input("timeline.json", Stage::timeline));
        std::ifstream in(input("timeline.tsv", Stage::timeline), std::ios::binary);
        const auto imported = read_timeline_tsv(in, vocab);
        return build_timeline(imported.first, vocab, meta.at("baseline_end").get<Year>(),
                              meta.at("analysis_end").get<Year>());
    }

    EmbeddingMatrix load_pretrained() const {
        const auto format = config_.embedding_format == "auto" ? guess_embedding_format(config_.pretrained)
                                                               : embedding_format_from_string(config_.embedding_format);
        return load_embeddings(config_.pretrained, format);
    }

    std::vector<Metric> main_metrics() const { return {Metric::w_G, Metric::w_N, Metric::delta_ic}; }

    std::string stem(Metric metric, std::size_t n) const {
        return series_stem(metric_name(metric), n, config_.n_samples);
    }

    std::vector<std::size_t> robustness_sizes() const {
        std::vector<std::size_t> sizes;
        for (auto n : config_.robustness)
            if (n != config_.n && std::find(sizes.begin(), sizes.end(), n) == sizes.end()) sizes.push_back(n);
        return sizes;
    }

    // -- stages --------------------------------------------------------------------------------

    StageResult ingest() {
        if (config_.corpus_path.empty())
            throw StageFailure(Stage::ingest, "corpus.path is not set", {});
        StageSpec spec{Stage::ingest, {"corpus"}, {}, {config_.corpus_path}};
        return execute(spec, [&] {
            const auto format = config_.corpus_format == "auto" ? guess_corpus_format(config_.corpus_path)
                                                                : corpus_format_from_string(config_.corpus_format);
            auto result = ingest_documents(config_.corpus_path, format, {config_.year_min, config_.year_max});
            if (result.documents.empty()) throw DataError("corpus contains no valid documents");
            io::write_lines(artifact("documents.jsonl"),
                            [&](std::ostream& out) { write_documents_jsonl(out, result.documents); });
            std::map<Year, std::size_t> per_year;
            for (const auto& d : result.documents) ++per_year[d.year];
            nlohmann::ordered_json report;
            report["accepted"] = result.report.accepted;
            report["skipped"] = result.report.skipped;
            nlohmann::ordered_json years = nlohmann::ordered_json::object();
            for (const auto& [y, c] : per_year) years[std::to_string(y)] = c;
            report["documents_per_year"] = std::move(years);
            report["diagnostics"] = result.report.diagnostics;
            io::write_lines(artifact("ingest_report.json"), [&](std::ostream& out) { out << report.dump(2) << '\n'; });
            log("[ingest] " + std::to_string(result.report.accepted) + " documents accepted, " +
                std::to_string(result.report.skipped) + " skipped");
        });
    }

    StageResult vocab() {
        StageSpec spec{Stage::vocab, {"vocab", "embedding.pretrained", "embedding.format"}, {"documents.jsonl"}, {}};
        if (!config_.pretrained.empty()) spec.external_inputs.push_back(config_.pretrained);
        return execute(spec, [&] {
            const auto docs = load_documents();
            Vocabulary vocab;
            if (!config_.pretrained.empty()) {
                // The pretrained term table is the working vocabulary, in its own row order.
                const auto m = load_pretrained();
                Vocabulary plain;
                for (std::size_t i = 0; i < m.size(); ++i) plain.add(m.term(static_cast<ConceptId>(i)), 0);
                std::vector<std::uint64_t> freq(plain.size(), 0);
                for (const auto& doc : docs)
                    for (const auto& [id, count] : extract_concepts(doc, plain)) freq[id] += count;
                for (std::size_t i = 0; i < plain.size(); ++i) vocab.add(plain.term(static_cast<ConceptId>(i)), freq[i]);
            } else {
                std::vector<TokenizedSentence> sentences;
                for (const auto& doc : docs)
                    for (auto& s : document_sentences(doc)) sentences.push_back(std::move(s));
                vocab = detect_phrases(sentences, config_.vocab);
            }
            if (vocab.empty()) throw DataError("vocabulary is empty");
            io::write_lines(artifact("vocabulary.tsv"), [&](std::ostream& out) { write_vocabulary_tsv(out, vocab); });
            log("[vocab] " + std::to_string(vocab.size()) + " concepts");
        });
    }

    StageResult train() {
        StageSpec spec{Stage::train,
                       {"embedding", "seed", "deterministic", "threads"},
                       {"documents.jsonl", "vocabulary.tsv"},
                       {}};
        if (!config_.pretrained.empty()) spec.external_inputs.push_back(config_.pretrained);
        return execute(spec, [&] {
            const auto vocab = load_vocabulary();
            EmbeddingMatrix m;
            if (!config_.pretrained.empty()) {
                m = load_pretrained();
                log("[train] using pretrained vectors (" + std::to_string(m.size()) + " x " +
                    std::to_string(m.dimension()) + ")");
            } else {
                const auto docs = load_documents();
                std::vector<std::vector<ConceptId>> sentences;
                for (const auto& doc : docs)
                    for (const auto& s : document_sentences(doc)) {
                        auto ids = segment(s.tokens, vocab);
                        if (!ids.empty()) sentences.push_back(std::move(ids));
                    }
                m = train_sgns(sentences, vocab, config_.train);
                log(std::string("[train] trained ") + std::to_string(m.size()) + " x " + std::to_string(m.dimension()) +
                    (config_.train.deterministic || config_.train.threads <= 1 ? " (deterministic)" : " (hogwild)"));
            }
            save_embeddings(artifact("embeddings.bin"), m, EmbeddingFormat::binary);
        });
    }

    StageResult timeline() {
        StageSpec spec{Stage::timeline,
                       {"timeline", "metrics.rolling_window"},
                       {"documents.jsonl", "vocabulary.tsv"},
                       {}};
        if (!config_.first_years.empty()) spec.external_inputs.push_back(config_.first_years);
        return execute(spec, [&] {
            const auto docs = load_documents();
            const auto vocab = load_vocabulary();
            const auto concepts = extract_all(docs, vocab);
            FirstAppearance first;
            std::size_t unknown_terms = 0;
            if (!config_.first_years.empty()) {
                std::ifstream in(config_.first_years, std::ios::binary);
                if (!in) throw IoError("cannot read '" + config_.first_years.string() + "'");
                auto imported = read_timeline_tsv(in, vocab);
                first = std::move(imported.first);
                unknown_terms = imported.unknown_terms;
            } else {
                first = first_appearance_years(concepts, vocab.size());
            }
            Year min_year = docs.front().year, max_year = docs.front().year;
            for (const auto& d : docs) {
                min_year = std::min(min_year, d.year);
                max_year = std::max(max_year, d.year);
            }
            const Year baseline_end = config_.baseline_end.value_or(min_year + 4);
            const Year analysis_end = config_.analysis_end.value_or(max_year);
            const auto tl = build_timeline(first, vocab, baseline_end, analysis_end);

            io::write_lines(artifact("timeline.tsv"), [&](std::ostream& out) { write_timeline_tsv(out, first, vocab); });
            nlohmann::ordered_json meta;
            meta["baseline_end"] = baseline_end;
            meta["analysis_start"] = tl.analysis_start();
            meta["analysis_end"] = analysis_end;
            meta["baseline_concepts"] = tl.baseline().size();
            meta["observed_in_range"] = tl.observed_in_range();
            meta["unobserved"] = tl.unobserved().size();
            meta["excluded_after_analysis_end"] = tl.excluded().size();
            meta["unknown_terms"] = unknown_terms;
            meta["baseline_coverage"] = baseline_coverage(tl, concepts);
            io::write_lines(artifact("timeline.json"), [&](std::ostream& out) { out << meta.dump(2) << '\n'; });

            io::write_lines(artifact("growth.csv"), [&](std::ostream& out) {
                csv::write_row(out, {"year", "new", "cumulative", "new_share"});
                for (const auto& g : growth_series(tl))
                    csv::write_row(out, {std::to_string(g.year), std::to_string(g.new_count), std::to_string(g.cumulative),
                                         csv::format_real(g.new_share)});
            });
            io::write_lines(artifact("new_per_document.csv"), [&](std::ostream& out) {
                csv::write_row(out, {"year", "documents", "mean_new", "mean_total"});
                for (const auto& r : new_concepts_per_document(concepts, tl))
                    csv::write_row(out, {std::to_string(r.year), std::to_string(r.documents), csv::format_real(r.mean_new),
                                         csv::format_real(r.mean_total)});
            });
            io::write_lines(artifact("rolling_new_ratio.csv"), [&](std::ostream& out) {
                csv::write_row(out, {"first_year", "last_year", "new", "unique", "ratio"});
                for (const auto& r : rolling_new_ratio(tl, concepts, config_.rolling_window))
                    csv::write_row(out, {std::to_string(r.first_year), std::to_string(r.last_year),
                                         std::to_string(r.new_count), std::to_string(r.unique),
                                         csv::format_real(r.ratio)});
            });
            log("[timeline] baseline " + std::to_string(tl.baseline().size()) + " concepts through " +
                std::to_string(baseline_end) + ", analysis " + std::to_string(tl.analysis_start()) + "-" +
                std::to_string(analysis_end));
        });
    }

    StageResult metrics() {
        StageSpec spec{Stage::metrics,
                       {"metrics", "seed"},
                       {"vocabulary.tsv", "embeddings.bin", "timeline.tsv", "timeline.json"},
                       {}};
        if (config_.within_docs > 0) spec.internal_inputs.push_back("documents.jsonl");
        return execute(spec, [&] {
            const auto vocab = load_vocabulary();
            const auto m = load_matrix(vocab);
            const auto tl = load_timeline(vocab);
            nlohmann::ordered_json meta;
            auto run = [&](Metric metric, std::size_t n) {
                SeriesOptions opt{n, config_.n_samples, config_.eps, config_.seed, config_.threads};
                const auto result = yearly_metric_series(tl, m, metric, opt);
                const auto name = stem(metric, n);
                emit_series_csv(result.series, artifact("series/" + name + ".csv"));
                io::write_lines(artifact("samples/" + name + ".csv"),
                                [&](std::ostream& out) { io::write_samples_csv(out, result.samples); });
                meta[name]["full_set_years"] = result.full_set_years;
                log("[metrics] " + name);
            };
            for (Metric metric : main_metrics()) run(metric, config_.n);
            for (auto n : robustness_sizes())
                for (Metric metric : {Metric::w_G, Metric::w_N}) run(metric, n);
            if (config_.within_docs > 0) {
                const auto docs = load_documents();
                const auto series = within_document_similarity(extract_all(docs, vocab), m, config_.within_docs,
                                                               config_.seed);
                emit_series_csv(series, artifact("series/within_doc_" + std::to_string(config_.within_docs) + ".csv"));
            }
            io::write_lines(artifact("metrics.json"), [&](std::ostream& out) { out << meta.dump(2) << '\n'; });
        });
    }

    std::vector<std::pair<std::string, LabeledSamples>> ks_inputs(Year analysis_start) const {
        std::vector<std::pair<std::string, LabeledSamples>> out;
        for (Metric metric : main_metrics()) {
            const auto name = metric_name(metric);
            const auto samples = non_empty(io::read_samples_csv(out_ / ("samples/" + stem(metric, config_.n) + ".csv")));
            auto years = yearly_labels(samples);
            if (years.size() >= 2) out.emplace_back("ks_" + name + "_years", std::move(years));
            auto periods = pool_periods(samples, config_.period, analysis_start);
            std::erase_if(periods, [](const auto& p) { return p.second.empty(); });
            if (periods.size() >= 2) out.emplace_back("ks_" + name + "_periods", std::move(periods));
        }
        return out;
    }

    StageResult stats() {
        StageSpec spec{Stage::stats, {"stats", "metrics.n", "metrics.n_samples"}, {"timeline.json"}, {}};
        for (Metric metric : main_metrics()) {
            spec.internal_inputs.push_back("samples/" + stem(metric, config_.n) + ".csv");
            spec.internal_inputs.push_back("series/" + stem(metric, config_.n) + ".csv");
        }
        return execute(spec, [&] {
            const auto meta = io::read_json(input("timeline.json", Stage::timeline));
            for (const auto& [name, samples] : ks_inputs(meta.at("analysis_start").get<Year>())) {
                const auto matrix = ks_matrix(samples, config_.alpha);
                io::write_lines(artifact("stats/" + name + ".csv"),
                                [&](std::ostream& out) { write_ks_matrix_csv(out, matrix); });
                io::write_lines(artifact("stats/" + name + "_significance.csv"),
                                [&](std::ostream& out) { write_significance_csv(out, matrix); });
            }
            io::write_lines(artifact("stats/trends.csv"), [&](std::ostream& out) {
                csv::write_row(out, {"metric", "first_year", "last_year", "first_mean", "last_mean", "relative_change",
                                     "spearman_rho"});
                for (Metric metric : main_metrics()) {
                    const auto series = read_series_csv(out_ / ("series/" + stem(metric, config_.n) + ".csv"));
                    const MetricRecord* first = nullptr;
                    const MetricRecord* last = nullptr;
                    for (const auto& r : series.records)
                        if (r.mean) {
                            if (!first) first = &r;
                            last = &r;
                        }
                    MaybeReal change;
                    if (first && *first->mean != 0.0) change = (*last->mean - *first->mean) / *first->mean;
                    csv::write_row(out, {series.metric, first ? std::to_string(first->year) : "",
                                         last ? std::to_string(last->year) : "",
                                         first ? csv::format_real(first->mean) : "",
                                         last ? csv::format_real(last->mean) : "", csv::format_real(change),
                                         csv::format_real(trend_rho(series))});
                }
            });
            log("[stats] KS matrices written");
        });
    }

    StageResult report() {
        StageSpec spec{Stage::report,
                       {"report", "stats", "metrics", "seed"},
                       {"vocabulary.tsv", "embeddings.bin", "timeline.tsv", "timeline.json", "growth.csv",
                        "new_per_document.csv", "rolling_new_ratio.csv"},
                       {}};
        for (Metric metric : main_metrics()) {
            spec.internal_inputs.push_back("series/" + stem(metric, config_.n) + ".csv");
            spec.internal_inputs.push_back("samples/" + stem(metric, config_.n) + ".csv");
        }
        for (auto n : robustness_sizes())
            for (Metric metric : {Metric::w_G, Metric::w_N})
                spec.internal_inputs.push_back("series/" + stem(metric, n) + ".csv");
        return execute(spec, [&] {
            auto svg = [&](const std::string& rel, const ChartSpec& chart, const ChartData& data) {
                write_text_file(artifact(rel), render_chart(chart, data));
            };

            // concept growth: cumulative count and new share on two axes
            {
                MetricSeries cumulative{"cumulative_concepts", {}}, share{"new_share", {}};
                std::ifstream in(input("growth.csv", Stage::timeline), std::ios::binary);
                csv::Reader reader(in);
                std::vector<std::string> row;
                reader.next(row);
                while (reader.next(row)) {
                    if (row.size() != 4) continue;
                    const auto year = static_cast<Year>(csv::parse_int(row[0]));
                    cumulative.records.push_back({year, csv::parse_real(row[2]), 0.0, 1});
                    share.records.push_back({year, csv::parse_real(row[3]), 0.0, 1});
                }
                svg("figures/growth.svg",
                    {ChartKind::dual_axis_line, "Concept growth", "Year", "Cumulative concepts", "New-concept share",
                     {"cumulative_concepts", "new_share"}},
                    std::vector<MetricSeries>{cumulative, share});
            }
            {
                MetricSeries per_doc{"new_per_document", {}};
                std::ifstream in(input("new_per_document.csv", Stage::timeline), std::ios::binary);
                csv::Reader reader(in);
                std::vector<std::string> row;
                reader.next(row);
                while (reader.next(row))
                    if (row.size() == 4)
                        per_doc.records.push_back({static_cast<Year>(csv::parse_int(row[0])), csv::parse_real(row[2]),
                                                   std::nullopt, static_cast<std::size_t>(csv::parse_int(row[1]))});
                if (std::any_of(per_doc.records.begin(), per_doc.records.end(), [](const auto& r) { return r.mean; }))
                    svg("figures/new_per_document.svg",
                        {ChartKind::line_with_errorbars, "New concepts per document", "Year", "New concepts", "", {}},
                        std::vector<MetricSeries>{per_doc});
            }
            {
                MetricSeries ratio{"rolling_new_ratio", {}};
                std::ifstream in(input("rolling_new_ratio.csv", Stage::timeline), std::ios::binary);
                csv::Reader reader(in);
                std::vector<std::string> row;
                reader.next(row);
                while (reader.next(row))
                    if (row.size() == 5)
                        ratio.records.push_back({static_cast<Year>(csv::parse_int(row[1])), csv::parse_real(row[4]),
                                                 std::nullopt, 1});
                if (std::any_of(ratio.records.begin(), ratio.records.end(), [](const auto& r) { return r.mean; }))
                    svg("figures/rolling_new_ratio.svg",
                        {ChartKind::line_with_errorbars, "Rolling new-concept ratio", "Last year of window", "Ratio", "",
                         {}},
                        std::vector<MetricSeries>{ratio});
            }

            static const std::map<std::string, std::string> titles = {
                {"w_G", "Mean similarity among all concepts (w_G)"},
                {"w_N", "Mean similarity of new to prior concepts (w_N)"},
                {"dIC", "Information gain of new concepts (bits)"}};
            for (Metric metric : main_metrics()) {
                const auto name = stem(metric, config_.n);
                const auto series = read_series_csv(out_ / ("series/" + name + ".csv"));
                svg("figures/" + name + ".svg",
                    {ChartKind::line_with_errorbars, titles.at(metric_name(metric)), "Year", metric_name(metric), "", {}},
                    std::vector<MetricSeries>{series});
            }
            if (config_.within_docs > 0) {
                const auto name = "within_doc_" + std::to_string(config_.within_docs);
                const auto series = read_series_csv(out_ / ("series/" + name + ".csv"));
                svg("figures/" + name + ".svg",
                    {ChartKind::line_with_errorbars, "Similarity within documents", "Year", "Mean pairwise cosine", "",
                     {}},
                    std::vector<MetricSeries>{series});
            }
            const auto sizes = robustness_sizes();
            if (!sizes.empty()) {
                std::vector<std::size_t> all = sizes;
                all.push_back(config_.n);
                std::sort(all.begin(), all.end());
                for (Metric metric : {Metric::w_G, Metric::w_N}) {
                    std::vector<MetricSeries> overlay;
                    for (auto n : all) {
                        auto s = read_series_csv(out_ / ("series/" + stem(metric, n) + ".csv"));
                        s.metric += " n=" + std::to_string(n);
                        overlay.push_back(std::move(s));
                    }
                    svg("figures/robustness_" + metric_name(metric) + ".svg",
                        {ChartKind::line_with_errorbars, "Subgraph size robustness: " + metric_name(metric), "Year",
                         metric_name(metric), "", {}},
                        overlay);
                }
            }

            const auto meta = io::read_json(input("timeline.json", Stage::timeline));
            for (const auto& [name, samples] : ks_inputs(meta.at("analysis_start").get<Year>()))
                svg("figures/" + name + ".svg",
                    {ChartKind::heatmap, "KS tests: " + name.substr(3), "", "", "", {}}, ks_matrix(samples, config_.alpha));

            const auto vocab = load_vocabulary();
            const auto m = load_matrix(vocab);
            const auto tl = load_timeline(vocab);
            const Year year = tl.analysis_end();
            const auto sample = sample_subgraph(tl, year, config_.subgraph_size, derive_seed(config_.seed, "report-subgraph", year));
            const std::string prefix = "figures/subgraph_" + std::to_string(year) + "_" + std::to_string(sample.size());
            artifact(prefix + ".csv");
            artifact(prefix + "_matrix.svg");
            artifact(prefix + "_network.svg");
            export_subgraph(sample, m, out_ / prefix);
            log("[report] figures written");
        });
    }

    Settings settings_;
    RunConfig config_;
    fs::path out_;
    std::ostream* log_;
    std::vector<std::string> written_;
};

}  // namespace conceptscope
