#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conceptscope/common.hpp"
#include "conceptscope/csv.hpp"

namespace conceptscope {

struct KSResult {
    double statistic = 0.0;  // D
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Survival function of the Kolmogorov distribution, Q(lambda) = P(K > lambda).
///
/// Uses the alternating series 2 sum (-1)^(j-1) exp(-2 j^2 lambda^2) for lambda >= 1.18 and the
/// Jacobi theta form of the CDF below that, where the alternating series converges slowly.
/// Summation stops when a term falls below 1e-10 of the running sum, or after 100 terms.
inline double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    constexpr double pi = 3.14159265358979323846;
    constexpr int max_terms = 100;
    constexpr double tolerance = 1e-10;
    double q;
    if (lambda < 1.18) {
        const double k = -pi * pi / (8.0 * lambda * lambda);
        double cdf = 0.0;
        for (int j = 1; j <= max_terms; ++j) {
            const double odd = 2.0 * j - 1.0;
            const double term = std::exp(k * odd * odd);
            cdf += term;
            if (term <= tolerance * cdf) break;
        }
        q = 1.0 - std::sqrt(2.0 * pi) / lambda * cdf;
    } else {
        double sum = 0.0;
        for (int j = 1; j <= max_terms; ++j) {
            const double term = std::exp(-2.0 * j * j * lambda * lambda);
            sum += (j % 2 == 1) ? term : -term;
            if (term <= tolerance * std::abs(sum)) break;
        }
        q = 2.0 * sum;
    }
    return std::clamp(q, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov test. D is the largest gap between the two empirical CDFs,
/// evaluated at every distinct merged point (right-continuous, so ties are fully counted);
/// p uses the asymptotic distribution with effective size n1 n2 / (n1 + n2).
inline KSResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: both samples must be non-empty");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() || j < y.size()) {
        double v;
        if (j >= y.size() || (i < x.size() && x[i] <= y[j]))
            v = x[i];
        else
            v = y[j];
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
    }
    KSResult r;
    r.statistic = d;
    r.n1 = x.size();
    r.n2 = y.size();
    const double effective = n1 * n2 / (n1 + n2);
    r.p_value = kolmogorov_survival(std::sqrt(effective) * d);
    return r;
}

using LabeledSamples = std::vector<std::pair<std::string, std::vector<double>>>;

/// Concatenates consecutive years into `period`-year buckets aligned to `start`
/// (default: the first year present). A trailing partial bucket keeps its own label.
inline LabeledSamples pool_periods(const std::map<Year, std::vector<double>>& yearly, int period = 5,
                                   std::optional<Year> start = std::nullopt) {
    require(period >= 1, "pool_periods: period must be >= 1");
    LabeledSamples out;
    if (yearly.empty()) return out;
    const Year first = start.value_or(yearly.begin()->first);
    const Year last = yearly.rbegin()->first;
    for (Year lo = first; lo <= last; lo += period) {
        const Year hi = std::min(lo + period - 1, last);
        std::vector<double> pooled;
        for (auto it = yearly.lower_bound(lo); it != yearly.end() && it->first <= hi; ++it)
            pooled.insert(pooled.end(), it->second.begin(), it->second.end());
        const std::string label = lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
        out.emplace_back(label, std::move(pooled));
    }
    return out;
}

/// Pairwise KS results over labeled samples; cell (i, j) equals cell (j, i).
struct SignificanceMatrix {
    std::vector<std::string> labels;
    std::vector<KSResult> cells;  // row-major, labels.size()^2
    double alpha = 0.05;

    std::size_t size() const { return labels.size(); }
    const KSResult& at(std::size_t i, std::size_t j) const { return cells[i * labels.size() + j]; }
    bool significant(std::size_t i, std::size_t j) const { return at(i, j).p_value < alpha; }
};

inline SignificanceMatrix ks_matrix(const LabeledSamples& samples, double alpha = 0.05) {
    require(samples.size() >= 2, "ks_matrix: need at least 2 labeled samples");
    SignificanceMatrix m;
    m.alpha = alpha;
    const std::size_t n = samples.size();
    for (const auto& [label, values] : samples) m.labels.push_back(label);
    m.cells.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        m.cells[i * n + i] = {0.0, 1.0, samples[i].second.size(), samples[i].second.size()};
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto r = ks_two_sample(samples[i].second, samples[j].second);
            m.cells[i * n + j] = r;
            m.cells[j * n + i] = {r.statistic, r.p_value, r.n2, r.n1};
        }
    }
    return m;
}

/// Cells formatted as "D:p".
inline void write_ks_matrix_csv(std::ostream& out, const SignificanceMatrix& m) {
    std::vector<std::string> row{""};
    row.insert(row.end(), m.labels.begin(), m.labels.end());
    csv::write_row(out, row);
    for (std::size_t i = 0; i < m.size(); ++i) {
        row = {m.labels[i]};
        for (std::size_t j = 0; j < m.size(); ++j)
            row.push_back(csv::format_real(m.at(i, j).statistic) + ":" + csv::format_real(m.at(i, j).p_value));
        csv::write_row(out, row);
    }
}

/// 1 where p < alpha (distributions differ significantly), 0 otherwise.
inline void write_significance_csv(std::ostream& out, const SignificanceMatrix& m) {
    std::vector<std::string> row{""};
    row.insert(row.end(), m.labels.begin(), m.labels.end());
    csv::write_row(out, row);
    for (std::size_t i = 0; i < m.size(); ++i) {
        row = {m.labels[i]};
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m.significant(i, j) ? "1" : "0");
        csv::write_row(out, row);
    }
}

namespace detail {
inline std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}
}  // namespace detail

/// Spearman rank correlation with average ranks for ties.
inline double spearman(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "spearman: need two equal-length samples of size >= 2");
    const auto rx = detail::average_ranks(x);
    const auto ry = detail::average_ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace conceptscope
