#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "conceptscope/common.hpp"
#include "conceptscope/csv.hpp"
#include "conceptscope/embedding.hpp"
#include "conceptscope/metrics.hpp"
#include "conceptscope/stats.hpp"

namespace conceptscope {

// ---------------------------------------------------------------------------------------------
// Series CSV: metric,year,mean,std,n_samples (missing values are empty fields)

inline void write_series_csv(std::ostream& out, const MetricSeries& series) {
    csv::write_row(out, {"metric", "year", "mean", "std", "n_samples"});
    for (const auto& r : series.records)
        csv::write_row(out, {series.metric, std::to_string(r.year), csv::format_real(r.mean), csv::format_real(r.std),
                             std::to_string(r.n_samples)});
}

inline void emit_series_csv(const MetricSeries& series, const std::filesystem::path& path) {
    if (series.records.empty()) throw InvalidArgument("emit_series_csv: series '" + series.metric + "' is empty");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_series_csv(out, series);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline MetricSeries read_series_csv(std::istream& in) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row) || row != std::vector<std::string>{"metric", "year", "mean", "std", "n_samples"})
        throw DataError("series csv: bad header");
    MetricSeries series;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 5) throw DataError("series csv line " + std::to_string(reader.line()) + ": expected 5 fields");
        if (series.records.empty())
            series.metric = row[0];
        else if (row[0] != series.metric)
            throw DataError("series csv: mixed metrics");
        MetricRecord r;
        r.year = static_cast<Year>(csv::parse_int(row[1]));
        r.mean = csv::parse_real(row[2]);
        r.std = csv::parse_real(row[3]);
        r.n_samples = static_cast<std::size_t>(csv::parse_int(row[4]));
        if (!series.records.empty() && r.year <= series.records.back().year)
            throw DataError("series csv: years must strictly increase");
        series.records.push_back(r);
    }
    return series;
}

inline MetricSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    return read_series_csv(in);
}

/// Naming convention for metric artifacts: <metric>_<n>_<n_samples>.
inline std::string series_stem(const std::string& metric, std::size_t n, std::size_t n_samples) {
    return metric + "_" + std::to_string(n) + "_" + std::to_string(n_samples);
}

// ---------------------------------------------------------------------------------------------
// SVG rendering

enum class ChartKind { line_with_errorbars, dual_axis_line, heatmap, adjacency_matrix };

struct ChartSpec {
    ChartKind kind = ChartKind::line_with_errorbars;
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string y2_label;              // dual-axis only
    std::vector<std::string> series;   // metric names the chart draws (line kinds)
};

struct AdjacencyData {
    std::vector<std::string> labels;
    std::vector<double> values;  // row-major n x n
    std::vector<bool> highlighted;
};

using ChartData = std::variant<std::vector<MetricSeries>, SignificanceMatrix, AdjacencyData>;

namespace svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

inline std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    return colors[i % 6];
}

class Document {
public:
    Document(double width, double height) : width_(width), height_(height) {}

    Document& raw(const std::string& element) {
        body_ << element << '\n';
        return *this;
    }
    void text(double x, double y, std::string_view content, const std::string& extra = {}) {
        body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\"" << (extra.empty() ? "" : " ") << extra << ">"
              << escape(content) << "</text>\n";
    }
    void line(double x1, double y1, double x2, double y2, const std::string& extra) {
        body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
              << "\" " << extra << "/>\n";
    }
    std::string str() const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width_) << "\" height=\""
            << num(height_) << "\" viewBox=\"0 0 " << num(width_) << " " << num(height_)
            << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
            << "<rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\"" << num(height_)
            << "\" fill=\"#ffffff\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    double width_, height_;
    std::ostringstream body_;
};

struct Range {
    double lo = 0, hi = 1;
    void pad() {
        if (hi - lo < 1e-12) {
            const double w = std::max(std::abs(lo) * 0.05, 0.5);
            lo -= w;
            hi += w;
        } else {
            const double w = (hi - lo) * 0.05;
            lo -= w;
            hi += w;
        }
    }
};

inline Range value_range(const MetricSeries& s) {
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& rec : s.records) {
        if (!rec.mean) continue;
        const double sd = rec.std.value_or(0.0);
        r.lo = std::min(r.lo, *rec.mean - sd);
        r.hi = std::max(r.hi, *rec.mean + sd);
    }
    return r;
}

struct Frame {
    double left = 72, right = 72, top = 44, bottom = 56, width = 760, height = 440;
    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

inline void draw_series(Document& doc, const Frame& f, const MetricSeries& s, Range xr, Range yr, const char* color) {
    auto px = [&](double x) { return f.left + (x - xr.lo) / (xr.hi - xr.lo) * f.plot_w(); };
    auto py = [&](double y) { return f.top + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * f.plot_h(); };

    // polyline segments break at missing values
    std::vector<std::string> segments;
    std::string current;
    std::size_t points_in_current = 0;
    auto close_segment = [&] {
        if (points_in_current >= 2) segments.push_back(current);
        current.clear();
        points_in_current = 0;
    };
    for (const auto& rec : s.records) {
        if (!rec.mean) {
            close_segment();
            continue;
        }
        if (!current.empty()) current += ' ';
        current += num(px(rec.year)) + "," + num(py(*rec.mean));
        ++points_in_current;
    }
    close_segment();
    for (const auto& pts : segments)
        doc.raw("<polyline class=\"series-line\" data-series=\"" + escape(s.metric) + "\" points=\"" + pts +
                "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>");

    for (const auto& rec : s.records) {
        if (!rec.mean) continue;
        const std::string meta = "data-series=\"" + escape(s.metric) + "\" data-year=\"" + std::to_string(rec.year) + "\"";
        const double x = px(rec.year);
        if (rec.std && *rec.std > 0.0) {
            const double y1 = py(*rec.mean - *rec.std), y2 = py(*rec.mean + *rec.std);
            doc.line(x, y1, x, y2, "class=\"errorbar\" " + meta + " stroke=\"" + color + "\" stroke-width=\"1\"");
            doc.line(x - 3, y1, x + 3, y1, "class=\"errorbar-cap\" " + meta + " stroke=\"" + color + "\"");
            doc.line(x - 3, y2, x + 3, y2, "class=\"errorbar-cap\" " + meta + " stroke=\"" + color + "\"");
        }
        doc.raw("<circle class=\"point\" " + meta + " data-mean=\"" + csv::format_real(*rec.mean) + "\" data-std=\"" +
                csv::format_real(rec.std) + "\" cx=\"" + num(x) + "\" cy=\"" + num(py(*rec.mean)) +
                "\" r=\"3\" fill=\"" + color + "\"/>");
    }
}

inline void draw_y_axis(Document& doc, const Frame& f, Range yr, bool right, const std::string& label) {
    const double x = right ? f.left + f.plot_w() : f.left;
    doc.line(x, f.top, x, f.top + f.plot_h(), "stroke=\"#000000\"");
    for (int i = 0; i <= 5; ++i) {
        const double v = yr.lo + (yr.hi - yr.lo) * i / 5.0;
        const double y = f.top + (1.0 - i / 5.0) * f.plot_h();
        doc.line(x, y, right ? x + 4 : x - 4, y, "stroke=\"#000000\"");
        doc.text(right ? x + 7 : x - 7, y + 4, tick_label(v), right ? "" : "text-anchor=\"end\"");
    }
    const double lx = right ? f.width - 14 : 16;
    const double ly = f.top + f.plot_h() / 2;
    doc.text(lx, ly, label, "text-anchor=\"middle\" transform=\"rotate(-90 " + num(lx) + " " + num(ly) + ")\"");
}

inline void draw_x_axis(Document& doc, const Frame& f, Range xr, Year first, Year last, const std::string& label) {
    const double y = f.top + f.plot_h();
    doc.line(f.left, y, f.left + f.plot_w(), y, "stroke=\"#000000\"");
    const int span = last - first + 1;
    const int step = std::max(1, (span + 9) / 10);
    for (Year yr = first; yr <= last; yr += step) {
        const double x = f.left + (yr - xr.lo) / (xr.hi - xr.lo) * f.plot_w();
        doc.line(x, y, x, y + 4, "stroke=\"#000000\"");
        doc.text(x, y + 16, std::to_string(yr), "text-anchor=\"middle\"");
    }
    doc.text(f.left + f.plot_w() / 2, f.height - 12, label, "text-anchor=\"middle\"");
}

inline std::string render_lines(const ChartSpec& spec, const std::vector<MetricSeries>& all) {
    std::vector<const MetricSeries*> chosen;
    for (const auto& name : spec.series) {
        auto it = std::find_if(all.begin(), all.end(), [&](const MetricSeries& s) { return s.metric == name; });
        if (it == all.end()) throw InvalidArgument("render_chart: series '" + name + "' not in data");
        chosen.push_back(&*it);
    }
    if (chosen.empty())
        for (const auto& s : all) chosen.push_back(&s);
    const bool dual = spec.kind == ChartKind::dual_axis_line;
    if (dual && chosen.size() != 2) throw InvalidArgument("render_chart: dual-axis chart needs exactly 2 series");

    Year first = std::numeric_limits<Year>::max(), last = std::numeric_limits<Year>::min();
    bool any = false;
    for (const auto* s : chosen) {
        for (std::size_t i = 0; i < s->records.size(); ++i) {
            if (i > 0 && s->records[i].year <= s->records[i - 1].year)
                throw InvalidArgument("render_chart: years must strictly increase in '" + s->metric + "'");
            if (!s->records[i].mean) continue;
            any = true;
            first = std::min(first, s->records[i].year);
            last = std::max(last, s->records[i].year);
        }
    }
    if (!any) throw InvalidArgument("render_chart: no data points");

    Frame f;
    Document doc(f.width, f.height);
    doc.text(f.width / 2, 22, spec.title, "text-anchor=\"middle\" font-size=\"14\"");
    Range xr{static_cast<double>(first), static_cast<double>(last)};
    if (first == last) {
        xr.lo -= 1;
        xr.hi += 1;
    } else {
        xr.lo -= 0.5;
        xr.hi += 0.5;
    }
    draw_x_axis(doc, f, xr, first, last, spec.x_label);

    if (dual) {
        for (std::size_t k = 0; k < 2; ++k) {
            Range yr = value_range(*chosen[k]);
            yr.pad();
            draw_y_axis(doc, f, yr, k == 1, k == 0 ? spec.y_label : spec.y2_label);
            draw_series(doc, f, *chosen[k], xr, yr, palette(k));
        }
    } else {
        Range yr{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (const auto* s : chosen) {
            const auto r = value_range(*s);
            yr.lo = std::min(yr.lo, r.lo);
            yr.hi = std::max(yr.hi, r.hi);
        }
        yr.pad();
        draw_y_axis(doc, f, yr, false, spec.y_label);
        for (std::size_t k = 0; k < chosen.size(); ++k) draw_series(doc, f, *chosen[k], xr, yr, palette(k));
    }
    for (std::size_t k = 0; k < chosen.size(); ++k) {
        const double ly = f.top + 12 + 14.0 * k;
        const double lx = f.left + 10;
        doc.line(lx, ly - 4, lx + 16, ly - 4, std::string("stroke=\"") + palette(k) + "\" stroke-width=\"2\"");
        doc.text(lx + 22, ly, chosen[k]->metric);
    }
    return doc.str();
}

inline std::string render_heatmap(const ChartSpec& spec, const SignificanceMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) throw InvalidArgument("render_chart: empty matrix");
    const double cell = std::clamp(480.0 / n, 8.0, 40.0);
    const double left = 90, top = 56;
    Document doc(left + cell * n + 30, top + cell * n + 90);
    doc.text(left + cell * n / 2, 22, spec.title, "text-anchor=\"middle\" font-size=\"14\"");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& r = m.at(i, j);
            std::string cls, fill;
            if (i == j) {
                cls = "cell diag";
                fill = "#bdbdbd";
            } else if (!m.significant(i, j)) {
                cls = "cell dark";
                fill = "#252525";
            } else {
                cls = "cell light";
                fill = "#f0f0f0";
            }
            doc.raw("<rect class=\"" + cls + "\" data-row=\"" + escape(m.labels[i]) + "\" data-col=\"" +
                    escape(m.labels[j]) + "\" data-d=\"" + csv::format_real(r.statistic) + "\" data-p=\"" +
                    csv::format_real(r.p_value) + "\" x=\"" + num(left + j * cell) + "\" y=\"" + num(top + i * cell) +
                    "\" width=\"" + num(cell) + "\" height=\"" + num(cell) + "\" fill=\"" + fill +
                    "\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>");
        }
        doc.text(left - 4, top + i * cell + cell / 2 + 4, m.labels[i], "text-anchor=\"end\"");
        const double tx = left + i * cell + cell / 2, ty = top + n * cell + 8;
        doc.text(tx, ty, m.labels[i], "text-anchor=\"end\" transform=\"rotate(-60 " + num(tx) + " " + num(ty) + ")\"");
    }
    doc.text(left, top + cell * n + 80,
             "dark: not significantly different (p >= " + csv::format_real(m.alpha) + ")", "");
    return doc.str();
}

inline std::string render_adjacency(const ChartSpec& spec, const AdjacencyData& a) {
    const std::size_t n = a.labels.size();
    if (n == 0 || a.values.size() != n * n) throw InvalidArgument("render_chart: bad adjacency data");
    const double cell = std::clamp(600.0 / n, 4.0, 20.0);
    const double left = 170, top = 170;
    Document doc(left + cell * n + 20, top + cell * n + 30);
    doc.text((left + cell * n) / 2, 22, spec.title, "text-anchor=\"middle\" font-size=\"14\"");
    double lo = 1.0, hi = -1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) {
                lo = std::min(lo, a.values[i * n + j]);
                hi = std::max(hi, a.values[i * n + j]);
            }
    if (hi <= lo) hi = lo + 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = a.values[i * n + j];
            const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - t)));
            char fill[8];
            std::snprintf(fill, sizeof fill, "#%02x%02x%02x", shade, shade, 255);
            doc.raw("<rect class=\"adj\" data-row=\"" + escape(a.labels[i]) + "\" data-col=\"" + escape(a.labels[j]) +
                    "\" data-sim=\"" + csv::format_real(v) + "\" x=\"" + num(left + j * cell) + "\" y=\"" +
                    num(top + i * cell) + "\" width=\"" + num(cell) + "\" height=\"" + num(cell) + "\" fill=\"" + fill +
                    "\"/>");
        }
        const bool hl = i < a.highlighted.size() && a.highlighted[i];
        const std::string color = hl ? " fill=\"#d62728\" font-weight=\"bold\"" : "";
        doc.text(left - 4, top + i * cell + cell * 0.75, a.labels[i], "text-anchor=\"end\"" + color);
        const double tx = left + i * cell + cell * 0.75, ty = top - 4;
        doc.text(tx, ty, a.labels[i], "transform=\"rotate(-90 " + num(tx) + " " + num(ty) + ")\"" + color);
    }
    return doc.str();
}

}  // namespace svg

/// Deterministic SVG 1.1 rendering. Every data mark carries data-series/data-year (or
/// row/column labels) so it can be traced back to its CSV row.
inline std::string render_chart(const ChartSpec& spec, const ChartData& data) {
    switch (spec.kind) {
        case ChartKind::line_with_errorbars:
        case ChartKind::dual_axis_line: {
            const auto* series = std::get_if<std::vector<MetricSeries>>(&data);
            if (!series) throw InvalidArgument("render_chart: line charts need series data");
            if (series->empty()) throw InvalidArgument("render_chart: no series");
            return svg::render_lines(spec, *series);
        }
        case ChartKind::heatmap: {
            const auto* m = std::get_if<SignificanceMatrix>(&data);
            if (!m) throw InvalidArgument("render_chart: heatmap needs a significance matrix");
            return svg::render_heatmap(spec, *m);
        }
        case ChartKind::adjacency_matrix: {
            const auto* a = std::get_if<AdjacencyData>(&data);
            if (!a) throw InvalidArgument("render_chart: adjacency chart needs adjacency data");
            return svg::render_adjacency(spec, *a);
        }
    }
    throw InvalidArgument("render_chart: unknown chart kind");
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------------------------
// Subgraph export (similarity matrix + filtered network)

struct SubgraphExport {
    std::vector<std::string> labels;
    std::vector<double> matrix;  // row-major, diagonal exactly 1
    std::vector<bool> new_flags;
    double edge_threshold = 0.0;
    std::size_t edges_drawn = 0;
};

/// Nearest-rank percentile of the upper-triangle similarities.
inline double similarity_percentile(const std::vector<double>& matrix, std::size_t n, double q) {
    std::vector<double> upper;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) upper.push_back(matrix[i * n + j]);
    if (upper.empty()) return 1.0;
    std::sort(upper.begin(), upper.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * upper.size()));
    return upper[std::clamp<std::size_t>(rank, 1, upper.size()) - 1];
}

inline std::string render_network_svg(const SubgraphExport& g, const std::string& title) {
    const std::size_t n = g.labels.size();
    const double cx = 400, cy = 400, radius = 300;
    svg::Document doc(800, 820);
    doc.text(cx, 24, title, "text-anchor=\"middle\" font-size=\"14\"");
    constexpr double pi = 3.14159265358979323846;
    auto pos = [&](std::size_t i) {
        const double a = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n) - pi / 2.0;
        return std::pair{cx + radius * std::cos(a), cy + radius * std::sin(a)};
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = g.matrix[i * n + j];
            if (s < g.edge_threshold) continue;
            const auto [x1, y1] = pos(i);
            const auto [x2, y2] = pos(j);
            doc.line(x1, y1, x2, y2,
                     "class=\"edge\" data-a=\"" + svg::escape(g.labels[i]) + "\" data-b=\"" + svg::escape(g.labels[j]) +
                         "\" data-sim=\"" + csv::format_real(s) + "\" stroke=\"#7f7f7f\" stroke-width=\"" +
                         svg::num(0.5 + 2.5 * std::max(0.0, s)) + "\"");
        }
    for (std::size_t i = 0; i < n; ++i) {
        const auto [x, y] = pos(i);
        const bool fresh = g.new_flags[i];
        doc.raw(std::string("<circle class=\"node ") + (fresh ? "new" : "prior") + "\" data-term=\"" +
                svg::escape(g.labels[i]) + "\" cx=\"" + svg::num(x) + "\" cy=\"" + svg::num(y) + "\" r=\"" +
                (fresh ? "8" : "5") + "\" fill=\"" + (fresh ? "#d62728" : "#1f77b4") + "\"/>");
        const double lx = cx + (radius + 14) * (x - cx) / radius, ly = cy + (radius + 14) * (y - cy) / radius;
        doc.text(lx, ly + 4, g.labels[i],
                 std::string(lx < cx ? "text-anchor=\"end\"" : "text-anchor=\"start\"") +
                     (fresh ? " fill=\"#d62728\" font-weight=\"bold\"" : ""));
    }
    doc.text(20, 800, "edges: similarity >= " + csv::format_real(g.edge_threshold) + "; red: new concepts", "");
    return doc.str();
}

/// Writes <prefix>.csv (labeled symmetric similarity matrix with a new-concept flag column),
/// <prefix>_matrix.svg (adjacency heatmap) and <prefix>_network.svg (circular layout with
/// edges at or above the 90th-percentile similarity).
inline SubgraphExport export_subgraph(const SubgraphSample& sample, const EmbeddingMatrix& m,
                                      const std::filesystem::path& prefix, std::optional<double> threshold = {}) {
    const std::size_t n = sample.size();
    if (n == 0 || n > 200) throw InvalidArgument("export_subgraph: sample size must be in 1..200");
    SubgraphExport g;
    g.new_flags = sample.new_flags;
    for (ConceptId id : sample.ids) g.labels.push_back(m.term(id));
    g.matrix.assign(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            g.matrix[i * n + j] = g.matrix[j * n + i] = cosine_similarity(sample.ids[i], sample.ids[j], m);
    g.edge_threshold = threshold.value_or(similarity_percentile(g.matrix, n, 0.9));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (g.matrix[i * n + j] >= g.edge_threshold) ++g.edges_drawn;

    std::ostringstream table;
    std::vector<std::string> row{"term", "new"};
    row.insert(row.end(), g.labels.begin(), g.labels.end());
    csv::write_row(table, row);
    for (std::size_t i = 0; i < n; ++i) {
        row = {g.labels[i], g.new_flags[i] ? "1" : "0"};
        for (std::size_t j = 0; j < n; ++j) row.push_back(csv::format_real(g.matrix[i * n + j]));
        csv::write_row(table, row);
    }
    const auto base = prefix.string();
    write_text_file(base + ".csv", table.str());

    const std::string title = "Subgraph of " + std::to_string(n) + " concepts cumulative to " +
                              std::to_string(sample.year) + " (" + std::to_string(sample.new_count()) + " new)";
    ChartSpec spec{ChartKind::adjacency_matrix, title, "", "", "", {}};
    write_text_file(base + "_matrix.svg", render_chart(spec, AdjacencyData{g.labels, g.matrix, g.new_flags}));
    write_text_file(base + "_network.svg", render_network_svg(g, title));
    return g;
}

}  // namespace conceptscope
