#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "forgan/data/dataset.hpp"
#include "forgan/data/lorenz.hpp"
#include "forgan/error.hpp"
#include "forgan/eval/evaluate.hpp"
#include "forgan/eval/histogram.hpp"
#include "forgan/eval/metrics.hpp"
#include "forgan/eval/report.hpp"
#include "knuth_oracle.hpp"

using namespace forgan;
using namespace forgan::eval;

namespace {

class Oracle final : public Forecaster {
public:
    std::string label() const override { return "oracle"; }
    bool deterministic() const override { return true; }
    void forecast(const data::WindowedDataset& ds, std::span<const std::size_t> idx, std::size_t samples, Rng&,
                  std::span<double> out) const override {
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t s = 0; s < samples; ++s) out[r * samples + s] = ds.target(idx[r]);
    }
};

class Constant final : public Forecaster {
public:
    explicit Constant(double v) : v_(v) {}
    std::string label() const override { return "constant"; }
    bool deterministic() const override { return true; }
    void forecast(const data::WindowedDataset&, std::span<const std::size_t>, std::size_t, Rng&,
                  std::span<double> out) const override {
        std::fill(out.begin(), out.end(), v_);
    }

private:
    double v_;
};

// Truth plus unit Gaussian noise; counts every draw it is asked for.
class Noisy final : public Forecaster {
public:
    std::string label() const override { return "noisy"; }
    bool deterministic() const override { return false; }
    void forecast(const data::WindowedDataset& ds, std::span<const std::size_t> idx, std::size_t samples, Rng& rng,
                  std::span<double> out) const override {
        std::normal_distribution<double> n;
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t s = 0; s < samples; ++s) out[r * samples + s] = ds.target(idx[r]) + n(rng);
        draws += idx.size() * samples;
        ++calls;
    }
    mutable std::size_t draws = 0;
    mutable std::size_t calls = 0;
};

data::WindowedDataset ramp(std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 1.0 + std::sin(0.1 * static_cast<double>(i)) + 0.001 * i;
    return data::window_series(s, 4);
}

}  // namespace

TEST(Metrics, HandValues) {
    const std::vector<double> z{0, 0}, p{3, 4};
    EXPECT_NEAR(rmse(z, p), std::sqrt(12.5), 1e-12);
    EXPECT_NEAR(mae(z, p), 3.5, 1e-12);
    const std::vector<double> x{1, 2}, xh{1.1, 1.8};
    EXPECT_NEAR(mape(x, xh), 10.0, 1e-12);
    EXPECT_EQ(rmse(p, p), 0.0);
    EXPECT_EQ(mae(p, p), 0.0);
    EXPECT_EQ(mape(x, x), 0.0);
}

TEST(Metrics, Errors) {
    const std::vector<double> a{1, 0}, b{1, 1}, c{1};
    EXPECT_THROW(mape(a, b), ContractError);
    EXPECT_THROW(rmse(b, c), ContractError);
    EXPECT_THROW(mae(std::vector<double>{}, std::vector<double>{}), ContractError);
}

TEST(Metrics, HomogeneityAndJensen) {
    Rng rng(12);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(37), y(37), kx(37), ky(37);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = n(rng);
            y[i] = n(rng);
            kx[i] = -3.0 * x[i];
            ky[i] = -3.0 * y[i];
        }
        EXPECT_NEAR(rmse(kx, ky), 3.0 * rmse(x, y), 1e-12);
        EXPECT_LE(mae(x, y), rmse(x, y) + 1e-15);
        EXPECT_GE(mae(x, y), 0.0);
    }
}

TEST(Kld, HandValues) {
    const std::vector<double> e{0, 1, 2};
    Histogram p(e), q(e);
    p.add(std::vector<double>{0.5, 1.5});
    q.add(std::vector<double>{0.5, 1.5, 1.5, 1.5});
    EXPECT_NEAR(*kld(p, q), 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-12);
    EXPECT_EQ(*kld(p, p), 0.0);

    Histogram a(e), b(e);
    a.add(0.5);
    b.add(1.5);
    EXPECT_FALSE(kld(a, b).has_value());
}

TEST(Kld, ZeroMassInTruthContributesNothing) {
    const std::vector<double> e{0, 1, 2, 3};
    Histogram p(e, std::vector<double>{0.5, 1.5});
    Histogram q(e, std::vector<double>{0.5, 1.5, 2.5, 2.5});
    EXPECT_NEAR(*kld(p, q), std::log(2.0), 1e-12);
}

TEST(Kld, EdgeMismatchAndEmpty) {
    Histogram p(std::vector<double>{0, 1, 2}, std::vector<double>{0.5});
    Histogram q(std::vector<double>{0, 1, 3}, std::vector<double>{0.5});
    EXPECT_THROW(kld(p, q), ContractError);
    EXPECT_THROW(kld(p, Histogram(std::vector<double>{0, 1, 2})), ContractError);
}

TEST(Kld, NonNegativeOnRandomHistograms) {
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    const auto e = equal_width_edges(0.0, 10.0, 12);
    for (int t = 0; t < 100; ++t) {
        Histogram p(e), q(e);
        for (int i = 0; i < 50; ++i) p.add(u(rng));
        for (int i = 0; i < 500; ++i) q.add(u(rng));
        if (const auto k = kld(p, q)) EXPECT_GE(*k, 0.0);
    }
}

TEST(Histogram, BinsAndClamping) {
    Histogram h(equal_width_edges(0.0, 4.0, 4));
    h.add(std::vector<double>{-10.0, 0.0, 0.999, 1.0, 4.0, 99.0});
    EXPECT_EQ(h.counts(), (std::vector<std::size_t>{3, 1, 0, 2}));
    EXPECT_EQ(h.total(), 6u);
    const auto m = h.masses();
    EXPECT_NEAR(std::accumulate(m.begin(), m.end(), 0.0), 1.0, 1e-15);
    EXPECT_THROW(Histogram(std::vector<double>{0.0, 0.0}), ContractError);
}

TEST(Knuth, ArgmaxOnRandomSets) {
    Rng rng(77);
    for (int set = 0; set < 50; ++set) {
        std::size_t n = std::uniform_int_distribution<std::size_t>(20, 3000)(rng);
        std::vector<double> x(n);
        if (set % 2 == 0) {
            std::normal_distribution<double> d(set, 1.0 + set);
            for (double& v : x) v = d(rng);
        } else {
            std::exponential_distribution<double> d(0.5);
            for (double& v : x) v = d(rng);
        }
        const auto r = knuth_bins(x);
        ASSERT_EQ(r.log_posterior.size(), knuth_max_bins(n));
        ASSERT_EQ(r.edges.size(), r.bins + 1);
        const double best = oracle::knuth_log_posterior(x, r.bins);
        for (std::size_t m = 1; m <= knuth_max_bins(n); ++m) {
            const double f = oracle::knuth_log_posterior(x, m);
            EXPECT_NEAR(r.log_posterior[m - 1], f, 1e-8 * std::abs(f));
            EXPECT_GE(best + 1e-9 * std::abs(best), f) << "set " << set << " M=" << m;
        }
    }
}

TEST(Knuth, StandardNormalBand) {
    Rng rng(5);
    std::normal_distribution<double> d;
    std::vector<double> x(10000);
    for (double& v : x) v = d(rng);
    const auto r = knuth_bins(x);
    EXPECT_GE(r.bins, 15u);
    EXPECT_LE(r.bins, 60u);
    EXPECT_DOUBLE_EQ(r.edges.front(), *std::min_element(x.begin(), x.end()));
    EXPECT_DOUBLE_EQ(r.edges.back(), *std::max_element(x.begin(), x.end()));
}

TEST(Knuth, AffineInvariance) {
    Rng rng(6);
    std::gamma_distribution<double> d(2.0, 1.0);
    std::vector<double> x(2000), y(2000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = d(rng);
        y[i] = 4.0 * x[i] - 7.0;
    }
    EXPECT_EQ(knuth_bins(x).bins, knuth_bins(y).bins);
}

TEST(Knuth, TwoPointsAndDegenerate) {
    const std::vector<double> two{0.0, 1.0};
    EXPECT_EQ(knuth_bins(two).bins, 1u);
    EXPECT_THROW(knuth_bins(std::vector<double>{3.0, 3.0, 3.0}), ContractError);
    EXPECT_EQ(knuth_max_bins(5), 1u);
    EXPECT_EQ(knuth_max_bins(101), 11u);
    EXPECT_EQ(knuth_max_bins(1000000), 200u);
}

TEST(Evaluate, OraclePredictorIsPerfect) {
    const auto ds = ramp(300);
    Oracle o;
    Rng rng(1);
    const auto rep = evaluate_probabilistic(o, ds, ds.split().test, {100, 100}, rng);
    EXPECT_EQ(rep.rmse.mean, 0.0);
    EXPECT_EQ(rep.rmse.std, 0.0);
    EXPECT_EQ(rep.mae.mean, 0.0);
    ASSERT_TRUE(rep.mape.has_value());
    EXPECT_EQ(rep.mape->mean, 0.0);
    ASSERT_TRUE(rep.kld.has_value());
    EXPECT_NEAR(*rep.kld, 0.0, 1e-15);

    const auto det = evaluate_deterministic(o, ds, ds.split().test);
    EXPECT_EQ(det.rmse.mean, 0.0);
    EXPECT_EQ(det.rmse.std, 0.0);
    EXPECT_NEAR(*det.kld, 0.0, 1e-15);
    EXPECT_EQ(det.runs, 1u);
}

TEST(Evaluate, SingleRunHasZeroStd) {
    const auto ds = ramp(300);
    Noisy m;
    Rng rng(2);
    const auto rep = evaluate_probabilistic(m, ds, ds.split().test, {10, 1}, rng);
    EXPECT_EQ(rep.rmse.std, 0.0);
    EXPECT_EQ(rep.mae.std, 0.0);
    EXPECT_GT(rep.rmse.mean, 0.0);
}

TEST(Evaluate, ProtocolCounts) {
    const auto ds = ramp(200);
    Noisy m;
    Rng rng(3);
    const auto idx = ds.split().test;
    const auto rep = evaluate_probabilistic(m, ds, idx, {100, 100}, rng);
    EXPECT_EQ(rep.runs, 100u);
    EXPECT_EQ(rep.rmse.per_run.size(), 100u);
    EXPECT_EQ(rep.samples_per_condition, 100u);
    EXPECT_EQ(rep.predicted.total(), 100u * idx.size());
    EXPECT_EQ(rep.truth.total(), idx.size());
    EXPECT_EQ(m.draws, 100u * idx.size());
    EXPECT_EQ(rep.forecast_draws, m.draws);
    EXPECT_GT(rep.rmse.std, 0.0);
    EXPECT_EQ(rep.truth.edges(), rep.predicted.edges());
    EXPECT_EQ(rep.truth.edges(), knuth_bins(ds.targets_of(idx)).edges);
}

TEST(Evaluate, ConstantPredictorMissesSupport) {
    const auto ds = ramp(3000);
    Constant c(1.0);
    const auto rep = evaluate_deterministic(c, ds, ds.split().test);
    EXPECT_FALSE(rep.kld.has_value());
    EXPECT_GT(rep.rmse.mean, 0.0);
    EXPECT_EQ(rep.rmse.std, 0.0);
}

TEST(Evaluate, ZeroTruthOmitsMape) {
    std::vector<double> s(100, 0.0);
    for (std::size_t i = 0; i < s.size(); i += 3) s[i] = 1.0;
    const auto ds = data::window_series(s, 2);
    Oracle o;
    const auto rep = evaluate_deterministic(o, ds, ds.split().test);
    EXPECT_FALSE(rep.mape.has_value());
}

TEST(Evaluate, NonFiniteForecastIsNumericError) {
    const auto ds = ramp(100);
    Constant c(std::nan(""));
    EXPECT_THROW(evaluate_deterministic(c, ds, ds.split().test), NumericError);
}

TEST(Evaluate, ClusterReportsShareEdges) {
    Rng rng(4);
    const auto ds = data::build_lorenz_dataset(data::LorenzParams{}, 600, rng);
    Noisy m;
    Rng er(1);
    const auto rep = evaluate_probabilistic(m, ds, ds.split().test, {20, 5}, er);
    ASSERT_EQ(rep.clusters.size(), 5u);
    std::size_t windows = 0;
    for (const auto& c : rep.clusters) {
        EXPECT_EQ(c.truth.edges(), rep.truth.edges());
        EXPECT_EQ(c.predicted.total(), 20u * c.windows);
        windows += c.windows;
    }
    EXPECT_EQ(windows, rep.windows);
}

TEST(Evaluate, SeededRerunIsIdentical) {
    const auto ds = ramp(300);
    Noisy m;
    Rng a(9), b(9);
    const auto x = evaluate_probabilistic(m, ds, ds.split().test, {30, 30}, a);
    const auto y = evaluate_probabilistic(m, ds, ds.split().test, {30, 30}, b);
    EXPECT_EQ(report_to_json(x), report_to_json(y));
}

TEST(Report, JsonFields) {
    const auto ds = ramp(3000);
    Constant c(1.0);
    const auto rep = evaluate_deterministic(c, ds, ds.split().test);
    const auto doc = nlohmann::json::parse(report_to_json(rep));
    EXPECT_EQ(doc["kld"], "undefined");
    EXPECT_EQ(doc["model"], "constant");
    EXPECT_EQ(doc["runs"], 1);
    EXPECT_EQ(doc["rmse"]["std"], 0.0);
    EXPECT_EQ(doc["histogram"]["edges"].size(), doc["histogram"]["p_counts"].size() + 1);
    EXPECT_EQ(doc["histogram"]["q_counts"].size(), doc["histogram"]["p_counts"].size());
}

TEST(Report, HistogramCsv) {
    const auto dir = std::filesystem::temp_directory_path() / "forgan_test_eval";
    std::filesystem::remove_all(dir);
    const auto e = equal_width_edges(0.0, 2.0, 2);
    write_histogram_csv(Histogram(e, std::vector<double>{0.5, 1.5}), Histogram(e, std::vector<double>{0.5}),
                        dir / "h.csv");
    std::ifstream in(dir / "h.csv");
    std::string header, row1, row2;
    std::getline(in, header);
    std::getline(in, row1);
    std::getline(in, row2);
    EXPECT_EQ(header, "edge_low,edge_high,p_mass,q_mass");
    EXPECT_EQ(row1, "0,1,0.5,1");
    EXPECT_EQ(row2, "1,2,0.5,0");
    EXPECT_THROW(write_histogram_csv(Histogram(e), Histogram(equal_width_edges(0.0, 3.0, 2)), dir / "x.csv"),
                 ContractError);
}
