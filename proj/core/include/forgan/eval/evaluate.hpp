#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forgan/data/dataset.hpp"
#include "forgan/eval/histogram.hpp"
#include "forgan/random.hpp"

namespace forgan::eval {

/// Anything that produces one-step-ahead forecasts in original units.
class Forecaster {
public:
    virtual ~Forecaster() = default;

    virtual std::string label() const = 0;
    /// True when repeated forecasts for one window are always identical.
    virtual bool deterministic() const = 0;
    /// Fills out[row * samples + s] with the s-th forecast for window indices[row].
    virtual void forecast(const data::WindowedDataset& ds, std::span<const std::size_t> indices, std::size_t samples,
                          Rng& rng, std::span<double> out) const = 0;
};

struct EvalOptions {
    std::size_t samples_per_condition = 100;
    std::size_t runs = 100;
};

/// Mean and sample standard deviation of a metric over runs (std = 0 for one run).
struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;
    std::vector<double> per_run;

    static MetricSummary of(std::vector<double> values);
};

struct ClusterReport {
    int cluster = 0;
    std::size_t windows = 0;
    std::optional<double> kld;
    Histogram truth;
    Histogram predicted;
};

/// Everything needed to tabulate and re-plot one evaluation. `truth` and `predicted`
/// always share edges (Knuth-optimal on the ground truth of the evaluated windows).
struct EvaluationReport {
    std::string model;
    std::string protocol;
    std::size_t windows = 0;
    std::size_t runs = 0;
    std::size_t samples_per_condition = 0;
    /// Total forecasts requested from the forecaster.
    std::size_t forecast_draws = 0;
    MetricSummary rmse;
    MetricSummary mae;
    /// Absent when some ground-truth value is zero.
    std::optional<MetricSummary> mape;
    /// Absent (undefined) when the predictions miss ground-truth support.
    std::optional<double> kld;
    Histogram truth;
    Histogram predicted;
    std::vector<ClusterReport> clusters;
};

/// Stochastic protocol: `samples_per_condition` forecasts per window pooled into the KLD
/// histogram; point-wise metrics per run with one forecast per window, summarized over
/// `runs`. Run r uses the r-th draw of every window.
EvaluationReport evaluate_probabilistic(const Forecaster& model, const data::WindowedDataset& ds,
                                        std::span<const std::size_t> indices, const EvalOptions& options, Rng& rng);

/// One forecast per window; KLD from the histogram of those forecasts; std fields 0.
EvaluationReport evaluate_deterministic(const Forecaster& model, const data::WindowedDataset& ds,
                                        std::span<const std::size_t> indices);

/// KLD between the ground truth of `indices` and `samples` pooled forecasts per window.
/// Used for checkpoint selection and tuning fitness.
std::optional<double> sampled_kld(const Forecaster& model, const data::WindowedDataset& ds,
                                  std::span<const std::size_t> indices, std::size_t samples, Rng& rng);

}  // namespace forgan::eval
