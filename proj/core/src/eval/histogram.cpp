#include "forgan/eval/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "forgan/error.hpp"

namespace forgan::eval {

Histogram::Histogram(std::vector<double> edges) : edges_(std::move(edges)) {
    if (edges_.size() < 2) throw ContractError("histogram needs at least two edges");
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (!(edges_[i] > edges_[i - 1])) throw ContractError("histogram edges must be strictly increasing");
    }
    counts_.assign(edges_.size() - 1, 0);
}

Histogram::Histogram(std::vector<double> edges, std::span<const double> values) : Histogram(std::move(edges)) {
    add(values);
}

std::size_t Histogram::bin_of(double x) const {
    if (counts_.empty()) throw ContractError("histogram has no bins");
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    if (it == edges_.begin()) return 0;
    const auto i = static_cast<std::size_t>(it - edges_.begin()) - 1;
    return std::min(i, counts_.size() - 1);
}

void Histogram::add(double x) {
    ++counts_[bin_of(x)];
    ++total_;
}

void Histogram::add(std::span<const double> values) {
    for (double v : values) add(v);
}

std::vector<double> Histogram::masses() const {
    std::vector<double> m(counts_.size(), 0.0);
    if (total_ == 0) return m;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<double>(counts_[i]) / static_cast<double>(total_);
    return m;
}

std::vector<double> equal_width_edges(double lo, double hi, std::size_t bins) {
    if (bins == 0) throw ContractError("histogram needs at least one bin");
    if (!(hi > lo)) throw ContractError("equal-width edges need hi > lo");
    std::vector<double> edges(bins + 1);
    for (std::size_t k = 0; k < bins; ++k) {
        edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    }
    edges[bins] = hi;
    return edges;
}

std::size_t knuth_max_bins(std::size_t n) {
    return std::clamp<std::size_t>((n + 9) / 10, 1, 200);
}

double knuth_log_posterior(std::span<const double> samples, std::size_t bins) {
    if (samples.empty()) throw ContractError("knuth_log_posterior: no samples");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    const Histogram h(equal_width_edges(*lo, *hi, bins), samples);
    const double n = static_cast<double>(samples.size());
    const double m = static_cast<double>(bins);
    double f = n * std::log(m) + std::lgamma(m / 2.0) - m * std::lgamma(0.5) - std::lgamma(n + m / 2.0);
    for (std::size_t c : h.counts()) f += std::lgamma(static_cast<double>(c) + 0.5);
    return f;
}

KnuthResult knuth_bins(std::span<const double> samples, std::size_t max_bins) {
    if (samples.size() < 2) throw ContractError("knuth_bins: need at least two samples");
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) throw ContractError("knuth_bins: all samples are identical (degenerate support)");
    if (max_bins == 0) max_bins = knuth_max_bins(samples.size());

    const double n = static_cast<double>(samples.size());
    KnuthResult result;
    result.log_posterior.reserve(max_bins);
    std::vector<std::size_t> counts;
    double best = -INFINITY;
    for (std::size_t bins = 1; bins <= max_bins; ++bins) {
        const auto edges = equal_width_edges(lo, hi, bins);
        counts.assign(bins, 0);
        const double scale = static_cast<double>(bins) / (hi - lo);
        for (double x : samples) {
            // Direct index, then nudged so it agrees exactly with Histogram::bin_of.
            auto idx = static_cast<std::size_t>(std::clamp((x - lo) * scale, 0.0, static_cast<double>(bins - 1)));
            while (idx > 0 && x < edges[idx]) --idx;
            while (idx + 1 < bins && x >= edges[idx + 1]) ++idx;
            ++counts[idx];
        }
        const double m = static_cast<double>(bins);
        double f = n * std::log(m) + std::lgamma(m / 2.0) - m * std::lgamma(0.5) - std::lgamma(n + m / 2.0);
        for (std::size_t c : counts) f += std::lgamma(static_cast<double>(c) + 0.5);
        result.log_posterior.push_back(f);
        if (f > best) {
            best = f;
            result.bins = bins;
            result.edges = edges;
        }
    }
    return result;
}

std::optional<double> kld(const Histogram& p, const Histogram& q) {
    if (p.edges() != q.edges()) throw ContractError("kld: histograms do not share bin edges");
    if (p.total() == 0 || q.total() == 0) throw ContractError("kld: empty histogram");
    const auto pm = p.masses();
    const auto qm = q.masses();
    double sum = 0.0;
    for (std::size_t i = 0; i < pm.size(); ++i) {
        if (pm[i] == 0.0) continue;
        if (qm[i] == 0.0) return std::nullopt;
        sum += pm[i] * std::log(pm[i] / qm[i]);
    }
    return std::max(sum, 0.0);  // rounding can leave -1e-17 for P == Q
}

}  // namespace forgan::eval
