#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "conceptscope/common.hpp"
#include "conceptscope/csv.hpp"

namespace conceptscope {

struct Document {
    std::string id;
    Year year = 0;
    std::string title;
    std::string abstract;

    bool operator==(const Document&) const = default;
};

enum class CorpusFormat { jsonl, csv };

inline CorpusFormat corpus_format_from_string(const std::string& name) {
    if (name == "jsonl" || name == "json") return CorpusFormat::jsonl;
    if (name == "csv") return CorpusFormat::csv;
    throw InvalidArgument("unknown corpus format '" + name + "' (expected jsonl or csv)");
}

/// Picks the format from a file extension; defaults to JSONL.
inline CorpusFormat guess_corpus_format(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? CorpusFormat::csv : CorpusFormat::jsonl;
}

struct IngestOptions {
    std::optional<Year> year_min;
    std::optional<Year> year_max;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t skipped = 0;
    std::vector<std::string> diagnostics;
};

namespace detail {

class DocumentValidator {
public:
    DocumentValidator(const IngestOptions& options, IngestReport& report) : options_(options), report_(report) {}

    bool accept(const Document& doc, std::size_t line) {
        if (doc.id.empty()) return reject(line, "empty id");
        if (options_.year_min && doc.year < *options_.year_min) return reject(line, "year before corpus range");
        if (options_.year_max && doc.year > *options_.year_max) return reject(line, "year after corpus range");
        if (!ids_.insert(doc.id).second) return reject(line, "duplicate id '" + doc.id + "'");
        ++report_.accepted;
        return true;
    }

    bool reject(std::size_t line, const std::string& why) {
        ++report_.skipped;
        report_.diagnostics.push_back("line " + std::to_string(line) + ": " + why);
        return false;
    }

private:
    const IngestOptions& options_;
    IngestReport& report_;
    std::unordered_set<std::string> ids_;
};

inline void read_jsonl(std::istream& in, DocumentValidator& validator,
                       const std::function<void(Document&&)>& sink) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            validator.reject(line_no, "invalid JSON");
            continue;
        }
        if (!record.is_object()) {
            validator.reject(line_no, "record is not an object");
            continue;
        }
        const char* missing = nullptr;
        for (const char* key : {"id", "year", "title", "abstract"})
            if (!record.contains(key)) {
                missing = key;
                break;
            }
        if (missing) {
            validator.reject(line_no, std::string("missing field '") + missing + "'");
            continue;
        }
        const auto& year = record["year"];
        if (!record["id"].is_string() || !year.is_number_integer() || !record["title"].is_string() ||
            !record["abstract"].is_string()) {
            validator.reject(line_no, "field has wrong type");
            continue;
        }
        Document doc{record["id"].get<std::string>(), year.get<Year>(), record["title"].get<std::string>(),
                     record["abstract"].get<std::string>()};
        if (validator.accept(doc, line_no)) sink(std::move(doc));
    }
}

inline void read_csv(std::istream& in, DocumentValidator& validator, const std::function<void(Document&&)>& sink) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return;
    int col_id = -1, col_year = -1, col_title = -1, col_abstract = -1;
    for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
        std::string name = fields[i];
        if (i == 0 && name.starts_with("\xEF\xBB\xBF")) name.erase(0, 3);
        if (name == "id") col_id = i;
        else if (name == "year") col_year = i;
        else if (name == "title") col_title = i;
        else if (name == "abstract") col_abstract = i;
    }
    if (col_id < 0 || col_year < 0 || col_title < 0 || col_abstract < 0)
        throw DataError("csv header must contain id,year,title,abstract");
    const int needed = std::max({col_id, col_year, col_title, col_abstract}) + 1;
    while (reader.next(fields)) {
        const std::size_t line_no = reader.line();
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (static_cast<int>(fields.size()) < needed) {
            validator.reject(line_no, "too few fields");
            continue;
        }
        if (fields[col_year].empty()) {
            validator.reject(line_no, "missing field 'year'");
            continue;
        }
        long long year = 0;
        try {
            year = csv::parse_int(fields[col_year]);
        } catch (const DataError&) {
            validator.reject(line_no, "year is not an integer");
            continue;
        }
        Document doc{fields[col_id], static_cast<Year>(year), fields[col_title], fields[col_abstract]};
        if (validator.accept(doc, line_no)) sink(std::move(doc));
    }
}

}  // namespace detail

/// Streams documents from a JSONL or CSV corpus in file order.
/// Malformed records are skipped and counted; only an unreadable file is fatal.
inline IngestReport for_each_document(const std::filesystem::path& path, CorpusFormat format,
                                      const std::function<void(Document&&)>& sink,
                                      const IngestOptions& options = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read corpus file '" + path.string() + "'");
    IngestReport report;
    detail::DocumentValidator validator(options, report);
    if (format == CorpusFormat::jsonl)
        detail::read_jsonl(in, validator, sink);
    else
        detail::read_csv(in, validator, sink);
    return report;
}

struct IngestResult {
    std::vector<Document> documents;
    IngestReport report;
};

inline IngestResult ingest_documents(const std::filesystem::path& path, CorpusFormat format,
                                     const IngestOptions& options = {}) {
    IngestResult result;
    result.report = for_each_document(
        path, format, [&](Document&& doc) { result.documents.push_back(std::move(doc)); }, options);
    return result;
}

inline void write_documents_jsonl(std::ostream& out, const std::vector<Document>& documents) {
    for (const auto& doc : documents) {
        nlohmann::ordered_json record;
        record["id"] = doc.id;
        record["year"] = doc.year;
        record["title"] = doc.title;
        record["abstract"] = doc.abstract;
        out << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    }
}

}  // namespace conceptscope
