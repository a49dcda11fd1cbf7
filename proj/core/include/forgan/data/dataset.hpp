#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forgan/random.hpp"

namespace forgan::data {

/// x -> (x - offset) / scale. Fitted as min-max onto [0, 1].
struct AffineScaler {
    double offset = 0.0;
    double scale = 1.0;

    /// Min-max fit; an empty or constant sample maps its value to 0.5 with unit scale.
    static AffineScaler fit(std::span<const double> values);

    double forward(double x) const noexcept { return (x - offset) / scale; }
    double inverse(double y) const noexcept { return y * scale + offset; }

    friend bool operator==(const AffineScaler&, const AffineScaler&) = default;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

/// Sizes of the 50 / 10 / 40 split of `n` windows; the rounding leftover goes to test.
struct SplitSizes {
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;
};
SplitSizes split_sizes(std::size_t n);

/// Consecutive blocks in index order.
SplitIndices chronological_split(std::size_t n);
/// Blocks of a seeded permutation.
SplitIndices shuffled_split(std::size_t n, Rng& rng);

/// Where a dataset came from; `params_json` is a JSON object text.
struct Provenance {
    std::string kind;
    std::string params_json = "{}";
    std::uint64_t seed = 0;
};

/// Aligned (condition window, next value) pairs in original units, with the split and the
/// train-fitted scaler. Immutable after construction.
class WindowedDataset {
public:
    WindowedDataset() = default;
    /// `conditions` is row-major [targets.size() x condition_len]. Splits chronologically
    /// unless `split` is supplied; the scaler is fitted on the train windows only.
    WindowedDataset(std::size_t condition_len, std::vector<double> conditions, std::vector<double> targets,
                    std::vector<int> clusters = {}, std::optional<SplitIndices> split = std::nullopt,
                    Provenance provenance = {});

    std::size_t size() const noexcept { return targets_.size(); }
    bool empty() const noexcept { return targets_.empty(); }
    std::size_t condition_len() const noexcept { return condition_len_; }

    std::span<const double> condition(std::size_t i) const;
    /// The trailing `len` steps of window i.
    std::span<const double> condition_tail(std::size_t i, std::size_t len) const;
    double target(std::size_t i) const { return targets_.at(i); }

    bool has_clusters() const noexcept { return !clusters_.empty(); }
    int cluster(std::size_t i) const { return clusters_.at(i); }

    std::span<const double> conditions() const noexcept { return conditions_; }
    std::span<const double> targets() const noexcept { return targets_; }
    std::span<const int> clusters() const noexcept { return clusters_; }

    const SplitIndices& split() const noexcept { return split_; }
    const AffineScaler& scaler() const noexcept { return scaler_; }
    const Provenance& provenance() const noexcept { return provenance_; }
    /// Records the root seed the dataset was generated from.
    void stamp_seed(std::uint64_t seed) noexcept { provenance_.seed = seed; }

    std::vector<double> targets_of(std::span<const std::size_t> indices) const;

private:
    std::size_t condition_len_ = 0;
    std::vector<double> conditions_;
    std::vector<double> targets_;
    std::vector<int> clusters_;
    SplitIndices split_;
    AffineScaler scaler_;
    Provenance provenance_;
};

/// Stride-1 windows: condition = series[i, i+C), target = series[i+C]; chronological split.
WindowedDataset window_series(std::span<const double> series, std::size_t condition_len,
                              Provenance provenance = {});

}  // namespace forgan::data
