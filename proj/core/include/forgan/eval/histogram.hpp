#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace forgan::eval {

/// Counts over fixed, strictly increasing bin edges. Values outside the edges are clamped
/// into the first or last bin, so every added value is counted.
class Histogram {
public:
    Histogram() = default;
    explicit Histogram(std::vector<double> edges);
    Histogram(std::vector<double> edges, std::span<const double> values);

    const std::vector<double>& edges() const noexcept { return edges_; }
    const std::vector<std::size_t>& counts() const noexcept { return counts_; }
    std::size_t bins() const noexcept { return counts_.size(); }
    std::size_t total() const noexcept { return total_; }

    /// Bin i covers [edges[i], edges[i+1]); the last bin also includes its upper edge.
    std::size_t bin_of(double x) const;
    void add(double x);
    void add(std::span<const double> values);
    /// Normalized masses (sum to 1); all zeros when empty.
    std::vector<double> masses() const;

private:
    std::vector<double> edges_;
    std::vector<std::size_t> counts_;
    std::size_t total_ = 0;
};

/// M + 1 equal-width edges spanning [lo, hi].
std::vector<double> equal_width_edges(double lo, double hi, std::size_t bins);

/// Largest bin count scanned by `knuth_bins`: min(200, ceil(N / 10)), at least 1.
std::size_t knuth_max_bins(std::size_t n);

/// Knuth's log-posterior for an M-bin equal-width histogram over [min, max] of `samples`:
///   N log M + lgamma(M/2) - M lgamma(1/2) - lgamma(N + M/2) + sum_k lgamma(n_k + 1/2)
double knuth_log_posterior(std::span<const double> samples, std::size_t bins);

struct KnuthResult {
    std::size_t bins = 0;
    std::vector<double> edges;
    /// log_posterior[M - 1] for every scanned M.
    std::vector<double> log_posterior;
};

/// Scans M = 1..max_bins (default `knuth_max_bins(N)`) and returns the maximizer (smallest
/// on ties). Throws ContractError unless the samples hold at least two distinct values.
KnuthResult knuth_bins(std::span<const double> samples, std::size_t max_bins = 0);

/// Discrete KL divergence sum P_i log(P_i / Q_i) in nats over normalized masses.
/// Returns nullopt (undefined) if some bin has P_i > 0 and Q_i = 0. Throws ContractError
/// if the edges differ or either histogram is empty.
std::optional<double> kld(const Histogram& p, const Histogram& q);

}  // namespace forgan::eval
