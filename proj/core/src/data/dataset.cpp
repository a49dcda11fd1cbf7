#include "forgan/data/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "forgan/error.hpp"

namespace forgan::data {

AffineScaler AffineScaler::fit(std::span<const double> values) {
    if (values.empty()) return {};
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*hi > *lo) return {*lo, *hi - *lo};
    return {*lo - 0.5, 1.0};
}

SplitSizes split_sizes(std::size_t n) {
    SplitSizes s;
    s.train = n * 5 / 10;
    s.validation = n / 10;
    s.test = n - s.train - s.validation;
    return s;
}

namespace {

SplitIndices split_order(const std::vector<std::size_t>& order) {
    const SplitSizes s = split_sizes(order.size());
    SplitIndices out;
    auto it = order.begin();
    out.train.assign(it, it + static_cast<std::ptrdiff_t>(s.train));
    it += static_cast<std::ptrdiff_t>(s.train);
    out.validation.assign(it, it + static_cast<std::ptrdiff_t>(s.validation));
    it += static_cast<std::ptrdiff_t>(s.validation);
    out.test.assign(it, order.end());
    return out;
}

void validate_split(const SplitIndices& split, std::size_t n) {
    std::vector<char> seen(n, 0);
    auto mark = [&](const std::vector<std::size_t>& part) {
        for (std::size_t i : part) {
            if (i >= n) throw ContractError("split index " + std::to_string(i) + " out of range");
            if (seen[i]) throw ContractError("split index " + std::to_string(i) + " appears twice");
            seen[i] = 1;
        }
    };
    mark(split.train);
    mark(split.validation);
    mark(split.test);
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw ContractError("split does not cover every window");
    }
}

}  // namespace

SplitIndices chronological_split(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return split_order(order);
}

SplitIndices shuffled_split(std::size_t n, Rng& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Fisher-Yates with an explicit draw so the permutation does not depend on the
    // standard library's shuffle implementation.
    for (std::size_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng)]);
    }
    return split_order(order);
}

WindowedDataset::WindowedDataset(std::size_t condition_len, std::vector<double> conditions,
                                 std::vector<double> targets, std::vector<int> clusters,
                                 std::optional<SplitIndices> split, Provenance provenance)
    : condition_len_(condition_len),
      conditions_(std::move(conditions)),
      targets_(std::move(targets)),
      clusters_(std::move(clusters)),
      provenance_(std::move(provenance)) {
    if (condition_len_ == 0) throw ContractError("condition length must be at least 1");
    if (conditions_.size() != targets_.size() * condition_len_) {
        throw ContractError("dataset holds " + std::to_string(targets_.size()) + " targets but " +
                            std::to_string(conditions_.size()) + " condition values (window " +
                            std::to_string(condition_len_) + ")");
    }
    if (!clusters_.empty() && clusters_.size() != targets_.size()) {
        throw ContractError("cluster labels do not match the number of windows");
    }
    split_ = split ? std::move(*split) : chronological_split(targets_.size());
    validate_split(split_, targets_.size());

    std::vector<double> train_values;
    train_values.reserve(split_.train.size() * (condition_len_ + 1));
    for (std::size_t i : split_.train) {
        auto c = condition(i);
        train_values.insert(train_values.end(), c.begin(), c.end());
        train_values.push_back(targets_[i]);
    }
    scaler_ = AffineScaler::fit(train_values);
}

std::span<const double> WindowedDataset::condition(std::size_t i) const {
    if (i >= size()) throw ContractError("window index " + std::to_string(i) + " out of range");
    return std::span<const double>(conditions_).subspan(i * condition_len_, condition_len_);
}

std::span<const double> WindowedDataset::condition_tail(std::size_t i, std::size_t len) const {
    if (len == 0 || len > condition_len_) {
        throw ContractError("requested condition length " + std::to_string(len) + " exceeds dataset window " +
                            std::to_string(condition_len_));
    }
    return condition(i).subspan(condition_len_ - len);
}

std::vector<double> WindowedDataset::targets_of(std::span<const std::size_t> indices) const {
    std::vector<double> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(targets_.at(i));
    return out;
}

WindowedDataset window_series(std::span<const double> series, std::size_t condition_len, Provenance provenance) {
    if (condition_len == 0) throw ContractError("condition length must be at least 1");
    if (series.size() <= condition_len) {
        throw DataError("series of length " + std::to_string(series.size()) +
                        " is too short for condition length " + std::to_string(condition_len));
    }
    const std::size_t n = series.size() - condition_len;
    std::vector<double> conditions;
    conditions.reserve(n * condition_len);
    std::vector<double> targets;
    targets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        conditions.insert(conditions.end(), series.begin() + static_cast<std::ptrdiff_t>(i),
                          series.begin() + static_cast<std::ptrdiff_t>(i + condition_len));
        targets.push_back(series[i + condition_len]);
    }
    return WindowedDataset(condition_len, std::move(conditions), std::move(targets), {}, std::nullopt,
                           std::move(provenance));
}

}  // namespace forgan::data
