#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conceptscope/common.hpp"
#include "conceptscope/metrics.hpp"
#include "conceptscope/phrases.hpp"
#include "conceptscope/sgns.hpp"

namespace conceptscope {

class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Flat key=value run settings. Every known key always has a value (possibly empty), so the
/// canonical text form is stable and can be hashed.
class Settings {
public:
    static const std::map<std::string, std::string>& defaults() {
        static const std::map<std::string, std::string> d = {
            {"corpus.path", ""},
            {"corpus.format", "auto"},
            {"corpus.year_min", ""},
            {"corpus.year_max", ""},
            {"timeline.baseline_end", ""},
            {"timeline.analysis_end", ""},
            {"timeline.first_years", ""},
            {"vocab.min_count", "5"},
            {"vocab.threshold", "0.5"},
            {"vocab.max_n", "4"},
            {"embedding.pretrained", ""},
            {"embedding.format", "auto"},
            {"embedding.dim", "300"},
            {"embedding.window", "5"},
            {"embedding.negatives", "5"},
            {"embedding.epochs", "5"},
            {"embedding.lr_start", "0.025"},
            {"embedding.lr_end", "0.0001"},
            {"embedding.min_count", "1"},
            {"metrics.n", "1000"},
            {"metrics.n_samples", "100"},
            {"metrics.eps", "1e-6"},
            {"metrics.robustness", ""},
            {"metrics.within_docs", "0"},
            {"metrics.rolling_window", "5"},
            {"stats.alpha", "0.05"},
            {"stats.period", "5"},
            {"report.subgraph_size", "30"},
            {"output.dir", ""},
            {"seed", "1"},
            {"threads", "1"},
            {"deterministic", "false"},
        };
        return d;
    }

    static bool is_path_key(const std::string& key) {
        return key == "corpus.path" || key == "timeline.first_years" || key == "embedding.pretrained" ||
               key == "output.dir";
    }

    Settings() : values_(defaults()) {}

    void set(const std::string& key, const std::string& value) {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
        it->second = value;
    }

    /// "key=value" as given on the command line.
    void set_assignment(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
        set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
    }

    /// Reads a key=value file ('#' starts a comment). Relative paths resolve against the
    /// file's directory.
    void load_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
        const auto base = path.parent_path();
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (is_path_key(key) && !value.empty() && std::filesystem::path(value).is_relative())
                value = (base / value).lexically_normal().string();
            try {
                set(key, value);
            } catch (const ConfigError& e) {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
    }

    const std::string& get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
        return it->second;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

    /// Sorted "key=value" lines for keys starting with any prefix (all keys when empty).
    /// output.dir never takes part: where results go does not change what they are.
    std::string canonical(const std::vector<std::string>& prefixes = {}) const {
        std::string out;
        for (const auto& [k, v] : values_) {
            if (k == "output.dir") continue;
            bool match = prefixes.empty();
            for (const auto& p : prefixes) match = match || k == p || k.starts_with(p + ".");
            if (match) out += k + "=" + v + "\n";
        }
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
    }

    std::map<std::string, std::string> values_;
};

struct RunConfig {
    std::filesystem::path corpus_path;
    std::string corpus_format = "auto";
    std::optional<Year> year_min, year_max;
    std::optional<Year> baseline_end, analysis_end;
    std::filesystem::path first_years;

    PhraseConfig vocab;
    std::filesystem::path pretrained;
    std::string embedding_format = "auto";
    TrainConfig train;

    std::size_t n = 1000;
    std::size_t n_samples = 100;
    double eps = 1e-6;
    std::vector<std::size_t> robustness;
    std::size_t within_docs = 0;
    int rolling_window = 5;

    double alpha = 0.05;
    int period = 5;
    std::size_t subgraph_size = 30;

    std::filesystem::path output_dir;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool deterministic = false;

    static RunConfig from(const Settings& s) {
        RunConfig c;
        c.corpus_path = s.get("corpus.path");
        c.corpus_format = s.get("corpus.format");
        c.year_min = optional_int(s, "corpus.year_min");
        c.year_max = optional_int(s, "corpus.year_max");
        c.baseline_end = optional_int(s, "timeline.baseline_end");
        c.analysis_end = optional_int(s, "timeline.analysis_end");
        c.first_years = s.get("timeline.first_years");

        c.vocab.min_count = integer<std::uint64_t>(s, "vocab.min_count", 1);
        c.vocab.score_threshold = real(s, "vocab.threshold");
        c.vocab.max_n = integer<int>(s, "vocab.max_n", 1);
        if (c.vocab.max_n > 4) throw ConfigError("vocab.max_n must be <= 4");
        if (c.vocab.score_threshold < -1.0 || c.vocab.score_threshold > 1.0)
            throw ConfigError("vocab.threshold must lie in [-1, 1]");

        c.pretrained = s.get("embedding.pretrained");
        c.embedding_format = s.get("embedding.format");
        c.train.dimension = integer<std::size_t>(s, "embedding.dim", 2);
        c.train.window = integer<int>(s, "embedding.window", 1);
        c.train.negatives = integer<int>(s, "embedding.negatives", 1);
        c.train.epochs = integer<int>(s, "embedding.epochs", 0);
        c.train.lr_start = real(s, "embedding.lr_start");
        c.train.lr_end = real(s, "embedding.lr_end");
        c.train.min_count = integer<std::uint64_t>(s, "embedding.min_count", 1);

        c.n = integer<std::size_t>(s, "metrics.n", 2);
        c.n_samples = integer<std::size_t>(s, "metrics.n_samples", 1);
        c.eps = real(s, "metrics.eps");
        if (!(c.eps > 0.0 && c.eps < 1.0)) throw ConfigError("metrics.eps must lie in (0, 1)");
        const std::string rob = s.get("metrics.robustness");
        for (std::size_t pos = 0; pos < rob.size();) {
            auto comma = rob.find(',', pos);
            if (comma == std::string::npos) comma = rob.size();
            std::size_t v = 0;
            const auto piece = rob.substr(pos, comma - pos);
            auto [p, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
            if (ec != std::errc() || p != piece.data() + piece.size() || v < 2)
                throw ConfigError("metrics.robustness must be a comma-separated list of sizes >= 2");
            c.robustness.push_back(v);
            pos = comma + 1;
        }
        c.within_docs = integer<std::size_t>(s, "metrics.within_docs", 0);
        c.rolling_window = integer<int>(s, "metrics.rolling_window", 1);

        c.alpha = real(s, "stats.alpha");
        if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("stats.alpha must lie in (0, 1)");
        c.period = integer<int>(s, "stats.period", 1);
        c.subgraph_size = integer<std::size_t>(s, "report.subgraph_size", 2);
        if (c.subgraph_size > 200) throw ConfigError("report.subgraph_size must be <= 200");

        c.output_dir = s.get("output.dir");
        c.seed = integer<std::uint64_t>(s, "seed", 0);
        c.threads = integer<unsigned>(s, "threads", 1);
        const std::string det = s.get("deterministic");
        if (det != "true" && det != "false") throw ConfigError("deterministic must be true or false");
        c.deterministic = det == "true";

        c.train.seed = c.seed;
        c.train.deterministic = c.deterministic;
        c.train.threads = c.threads;
        c.vocab.threads = c.threads;
        try {
            c.train.validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
        if (c.baseline_end && c.analysis_end && *c.baseline_end >= *c.analysis_end)
            throw ConfigError("timeline.baseline_end must precede timeline.analysis_end");
        return c;
    }

    /// output.dir, else $CONCEPTSCOPE_OUTPUT_ROOT, else ./conceptscope-out. A relative
    /// output.dir is placed under the root when the variable is set.
    std::filesystem::path resolved_output_dir() const {
        const char* root = std::getenv("CONCEPTSCOPE_OUTPUT_ROOT");
        if (output_dir.empty()) return root && *root ? std::filesystem::path(root) : "conceptscope-out";
        if (output_dir.is_relative() && root && *root) return std::filesystem::path(root) / output_dir;
        return output_dir;
    }

private:
    template <typename T>
    static T integer(const Settings& s, const std::string& key, long long min) {
        const auto& text = s.get(key);
        long long v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || p != text.data() + text.size())
            throw ConfigError(key + ": expected an integer, got '" + text + "'");
        if (v < min) throw ConfigError(key + " must be >= " + std::to_string(min));
        return static_cast<T>(v);
    }

    static std::optional<Year> optional_int(const Settings& s, const std::string& key) {
        if (s.get(key).empty()) return std::nullopt;
        return integer<Year>(s, key, std::numeric_limits<int>::min());
    }

    static double real(const Settings& s, const std::string& key) {
        const auto& text = s.get(key);
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
            throw ConfigError(key + ": expected a number, got '" + text + "'");
        return v;
    }
};

}  // namespace conceptscope
