#include "forgan/eval/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "forgan/error.hpp"
#include "forgan/eval/metrics.hpp"

namespace forgan::eval {
namespace {

// Knuth edges on the ground truth; a constant ground truth gets one unit-wide bin.
std::vector<double> truth_edges(std::span<const double> truth) {
    const auto [lo, hi] = std::minmax_element(truth.begin(), truth.end());
    if (truth.size() < 2 || !(*hi > *lo)) {
        const double pad = std::max(0.5, std::abs(*lo) * 1e-6);
        return {*lo - pad, *lo + pad};
    }
    return knuth_bins(truth).edges;
}

struct Draws {
    std::vector<double> truth;
    std::vector<double> values;  // [row * per_row + s]
    std::size_t per_row = 0;
};

Draws draw(const Forecaster& model, const data::WindowedDataset& ds, std::span<const std::size_t> indices,
           std::size_t per_row, Rng& rng) {
    if (indices.empty()) throw ContractError("evaluation needs a non-empty set of windows");
    if (per_row == 0) throw ContractError("evaluation needs at least one forecast per window");
    Draws d;
    d.truth = ds.targets_of(indices);
    d.per_row = per_row;
    d.values.assign(indices.size() * per_row, 0.0);
    model.forecast(ds, indices, per_row, rng, d.values);
    for (double v : d.values) {
        if (!std::isfinite(v)) throw NumericError("forecaster '" + model.label() + "' produced a non-finite value");
    }
    return d;
}

Histogram pooled(const std::vector<double>& edges, const Draws& d, std::span<const std::size_t> rows,
                 std::size_t samples) {
    Histogram h(edges);
    for (std::size_t r : rows) {
        for (std::size_t s = 0; s < samples; ++s) h.add(d.values[r * d.per_row + s]);
    }
    return h;
}

void fill_report(EvaluationReport& rep, const data::WindowedDataset& ds, std::span<const std::size_t> indices,
                 const Draws& d, std::size_t samples, std::size_t runs) {
    const std::size_t n = indices.size();
    rep.windows = n;
    rep.runs = runs;
    rep.samples_per_condition = samples;
    rep.forecast_draws = d.values.size();

    const auto edges = truth_edges(d.truth);
    rep.truth = Histogram(edges, d.truth);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    rep.predicted = pooled(edges, d, all, samples);
    rep.kld = kld(rep.truth, rep.predicted);

    const bool has_zero = std::find(d.truth.begin(), d.truth.end(), 0.0) != d.truth.end();
    std::vector<double> rmse_runs, mae_runs, mape_runs;
    std::vector<double> column(n);
    for (std::size_t r = 0; r < runs; ++r) {
        for (std::size_t i = 0; i < n; ++i) column[i] = d.values[i * d.per_row + r];
        rmse_runs.push_back(rmse(d.truth, column));
        mae_runs.push_back(mae(d.truth, column));
        if (!has_zero) mape_runs.push_back(mape(d.truth, column));
    }
    rep.rmse = MetricSummary::of(std::move(rmse_runs));
    rep.mae = MetricSummary::of(std::move(mae_runs));
    if (!has_zero) rep.mape = MetricSummary::of(std::move(mape_runs));

    if (ds.has_clusters()) {
        std::map<int, std::vector<std::size_t>> rows_by_cluster;
        for (std::size_t i = 0; i < n; ++i) rows_by_cluster[ds.cluster(indices[i])].push_back(i);
        for (const auto& [label, rows] : rows_by_cluster) {
            ClusterReport c;
            c.cluster = label;
            c.windows = rows.size();
            c.truth = Histogram(edges);
            for (std::size_t r : rows) c.truth.add(d.truth[r]);
            c.predicted = pooled(edges, d, rows, samples);
            c.kld = kld(c.truth, c.predicted);
            rep.clusters.push_back(std::move(c));
        }
    }
}

}  // namespace

MetricSummary MetricSummary::of(std::vector<double> values) {
    MetricSummary s;
    s.per_run = std::move(values);
    if (s.per_run.empty()) return s;
    const double n = static_cast<double>(s.per_run.size());
    s.mean = std::accumulate(s.per_run.begin(), s.per_run.end(), 0.0) / n;
    if (s.per_run.size() > 1) {
        double ss = 0.0;
        for (double v : s.per_run) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / (n - 1.0));
    }
    return s;
}

EvaluationReport evaluate_probabilistic(const Forecaster& model, const data::WindowedDataset& ds,
                                        std::span<const std::size_t> indices, const EvalOptions& options, Rng& rng) {
    if (options.samples_per_condition == 0 || options.runs == 0) {
        throw ContractError("evaluation needs at least one sample per condition and one run");
    }
    const Draws d = draw(model, ds, indices, std::max(options.samples_per_condition, options.runs), rng);
    EvaluationReport rep;
    rep.model = model.label();
    rep.protocol = "probabilistic";
    fill_report(rep, ds, indices, d, options.samples_per_condition, options.runs);
    return rep;
}

EvaluationReport evaluate_deterministic(const Forecaster& model, const data::WindowedDataset& ds,
                                        std::span<const std::size_t> indices) {
    Rng unused(0);
    const Draws d = draw(model, ds, indices, 1, unused);
    EvaluationReport rep;
    rep.model = model.label();
    rep.protocol = "deterministic";
    fill_report(rep, ds, indices, d, 1, 1);
    return rep;
}

std::optional<double> sampled_kld(const Forecaster& model, const data::WindowedDataset& ds,
                                  std::span<const std::size_t> indices, std::size_t samples, Rng& rng) {
    const Draws d = draw(model, ds, indices, samples, rng);
    const auto edges = truth_edges(d.truth);
    const Histogram truth(edges, d.truth);
    const Histogram pred(edges, d.values);
    return kld(truth, pred);
}

}  // namespace forgan::eval
