#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>

#include "forgan/data/csv.hpp"
#include "forgan/data/dataset.hpp"
#include "forgan/data/dataset_io.hpp"
#include "forgan/data/lorenz.hpp"
#include "forgan/data/mackey_glass.hpp"
#include "forgan/data/ode.hpp"
#include "forgan/data/toy.hpp"
#include "forgan/error.hpp"

using namespace forgan;
using namespace forgan::data;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("forgan_test_data_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Lorenz, DerivativeHandValues) {
    const LorenzParams p;
    EXPECT_EQ(lorenz_derivative({0, 0, 0}, p), (State<3>{0, 0, 0}));
    const auto d = lorenz_derivative({1, 2, 3}, p);
    EXPECT_NEAR(d[0], 16.0, 1e-12);
    EXPECT_NEAR(d[1], 40.92, 1e-12);
    EXPECT_NEAR(d[2], -10.0, 1e-12);
    EXPECT_NEAR(lorenz_derivative({1, 1, p.rho - 1.0}, p)[2], -178.68, 1e-12);
}

TEST(Lorenz, TrajectoryLength) {
    const LorenzParams p;
    EXPECT_EQ(integrate_lorenz(p, 1.0001).size(), 1301u);
    EXPECT_EQ(p.condition_steps(), 250u);
}

TEST(Lorenz, StepHalvingAtOneSecond) {
    LorenzParams p;
    const std::size_t at = p.sample_index(1.0);
    const double coarse = integrate_lorenz(p, 1.0001)[at];
    p.substeps *= 2;
    const double fine = integrate_lorenz(p, 1.0001)[at];
    EXPECT_LT(std::abs(coarse - fine), 1e-5);
}

TEST(Lorenz, SeedsDivergeByTwentySeconds) {
    const LorenzParams p;
    const auto a = integrate_lorenz(p, 1.0001);
    const auto b = integrate_lorenz(p, 1.000000000001);
    const std::size_t early = p.sample_index(5.0);
    const std::size_t late = p.sample_index(20.0);
    EXPECT_LT(std::abs(a[early] - b[early]), 1e-3);
    double apart = 0.0;
    for (std::size_t i = late; i < a.size(); ++i) apart = std::max(apart, std::abs(a[i] - b[i]));
    EXPECT_GT(apart, p.noise_std);
}

TEST(Lorenz, ZeroNoiseGivesIdenticalClusterWindows) {
    LorenzParams p;
    p.noise_std = 0.0;
    Rng rng(2);
    const auto ds = build_lorenz_dataset(p, 300, rng);
    std::map<int, std::vector<double>> seen;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto c = ds.condition(i);
        auto [it, fresh] = seen.emplace(ds.cluster(i), std::vector<double>(c.begin(), c.end()));
        if (!fresh) {
            EXPECT_TRUE(std::equal(c.begin(), c.end(), it->second.begin()));
        }
    }
}

TEST(Lorenz, ClusterCountsWithinMultinomialBounds) {
    const LorenzParams p;
    const std::size_t n = 20000;
    Rng rng(9);
    const auto ds = build_lorenz_dataset(p, n, rng);
    std::vector<std::size_t> counts(p.occurrence.size());
    for (int c : ds.clusters()) ++counts.at(static_cast<std::size_t>(c));
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double expected = p.occurrence[k] * n;
        const double sigma = std::sqrt(n * p.occurrence[k] * (1.0 - p.occurrence[k]));
        EXPECT_LE(std::abs(counts[k] - expected), 3.0 * sigma) << "cluster " << k;
    }
}

TEST(Lorenz, InjectedNoiseStd) {
    const LorenzParams p;
    Rng rng(10);
    const auto ds = build_lorenz_dataset(p, 2000, rng);
    std::vector<std::vector<double>> clean;
    for (double y0 : p.cluster_y0) clean.push_back(integrate_lorenz(p, y0));
    const std::size_t start = p.sample_index(p.condition_start);
    double ss = 0.0;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto c = ds.condition(i);
        const auto& x = clean[static_cast<std::size_t>(ds.cluster(i))];
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double e = c[k] - x[start + k];
            sum += e;
            ss += e * e;
            ++n;
        }
    }
    const double mean = sum / n;
    EXPECT_NEAR(std::sqrt(ss / n - mean * mean), 7.2, 0.1);
}

TEST(Lorenz, SeededBuildsAreIdentical) {
    Rng a(4), b(4);
    const auto x = build_lorenz_dataset(LorenzParams{}, 100, a);
    const auto y = build_lorenz_dataset(LorenzParams{}, 100, b);
    EXPECT_TRUE(std::equal(x.conditions().begin(), x.conditions().end(), y.conditions().begin()));
    EXPECT_TRUE(std::equal(x.targets().begin(), x.targets().end(), y.targets().begin()));
    EXPECT_EQ(x.split().test, y.split().test);
}

TEST(Rk4, FourthOrderOnExponential) {
    auto f = [](double, const State<1>& y) { return State<1>{y[0]}; };
    auto err = [&](std::size_t steps) {
        State<1> y{1.0};
        const double h = 1.0 / static_cast<double>(steps);
        for (std::size_t i = 0; i < steps; ++i) y = rk4_step<1>(f, i * h, y, h);
        return std::abs(y[0] - std::exp(1.0));
    };
    EXPECT_NEAR(std::log2(err(10) / err(20)), 4.0, 0.2);
}

TEST(MackeyGlass, DerivativeHandValues) {
    MackeyGlassParams p;
    p.a = 0.1;
    p.b = 0.2;
    EXPECT_EQ(mackey_glass_derivative(0.0, 0.0, p), 0.0);
    EXPECT_NEAR(mackey_glass_derivative(1.0, 1.0, p), -0.15, 1e-15);
    EXPECT_NEAR(mackey_glass_derivative(0.0, 1.0, p), 0.05, 1e-15);
}

TEST(MackeyGlass, LengthAndRange) {
    const auto s = integrate_mackey_glass(MackeyGlassParams{}, 20000);
    ASSERT_EQ(s.size(), 20000u);
    for (double v : s) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 2.0);
    }
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    EXPECT_GT(*hi - *lo, 0.5);  // chaotic oscillation, not a decayed fixed point
}

TEST(MackeyGlass, ZeroHistoryStaysZero) {
    MackeyGlassParams p;
    p.history_init = 0.0;
    for (double v : integrate_mackey_glass(p, 500)) EXPECT_EQ(v, 0.0);
}

TEST(MackeyGlass, StepMustDivideDelay) {
    MackeyGlassParams p;
    p.dt = 0.3;
    EXPECT_THROW(integrate_mackey_glass(p, 10), ContractError);
}

TEST(Window, SmallSeries) {
    const std::vector<double> s{1, 2, 3, 4};
    const auto ds = window_series(s, 2);
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds.condition(0)[0], 1.0);
    EXPECT_EQ(ds.condition(0)[1], 2.0);
    EXPECT_EQ(ds.target(0), 3.0);
    EXPECT_EQ(ds.condition(1)[0], 2.0);
    EXPECT_EQ(ds.target(1), 4.0);
}

TEST(Window, MackeyGlassSplitSizes) {
    const std::vector<double> s(20000, 0.5);
    const auto ds = window_series(s, 32);
    EXPECT_EQ(ds.size(), 19968u);
    EXPECT_EQ(ds.split().train.size(), 9984u);
    EXPECT_EQ(ds.split().validation.size(), 1996u);
    EXPECT_EQ(ds.split().test.size(), 7988u);
    EXPECT_EQ(ds.split().train.back() + 1, ds.split().validation.front());
}

TEST(Window, TooShortThrows) {
    const std::vector<double> s{1, 2};
    EXPECT_THROW(window_series(s, 2), DataError);
}

TEST(Scaler, RoundTrip) {
    Rng rng(6);
    std::uniform_real_distribution<double> u(-50.0, 300.0);
    std::vector<double> v(1000);
    for (double& x : v) x = u(rng);
    const auto s = AffineScaler::fit(v);
    for (double x : v) EXPECT_NEAR(s.inverse(s.forward(x)), x, 1e-12);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    EXPECT_DOUBLE_EQ(s.forward(*lo), 0.0);
    EXPECT_DOUBLE_EQ(s.forward(*hi), 1.0);
}

TEST(Scaler, ConstantMapsToHalf) {
    const std::vector<double> v(10, 5.0);
    EXPECT_EQ(AffineScaler::fit(v).forward(5.0), 0.5);
}

TEST(Scaler, FittedOnTrainOnly) {
    std::vector<double> s(100);
    std::iota(s.begin(), s.end(), 0.0);
    const auto ds = window_series(s, 4);
    // Train windows cover values 0 .. train_size + 3.
    const double hi = static_cast<double>(ds.split().train.size() + 3);
    EXPECT_DOUBLE_EQ(ds.scaler().forward(hi), 1.0);
}

TEST(Split, ShuffledIsPermutation) {
    Rng rng(1);
    const auto s = shuffled_split(101, rng);
    std::vector<std::size_t> all = s.train;
    all.insert(all.end(), s.validation.begin(), s.validation.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
    EXPECT_EQ(s.train.size(), 50u);
    EXPECT_EQ(s.validation.size(), 10u);
}

TEST(Toy, EightyPercentOnes) {
    Rng rng(3);
    const auto ds = build_toy_bimodal(10000, rng);
    const auto t = ds.targets();
    const double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
    EXPECT_NEAR(mean, 0.8, 0.02);
    for (double v : t) EXPECT_TRUE(v == 0.0 || v == 1.0);
}

TEST(Toy, SingleSample) {
    Rng rng(3);
    EXPECT_EQ(build_toy_bimodal(1, rng).size(), 1u);
}

TEST(Csv, ThreeRows) {
    const auto dir = temp_dir("rows");
    const auto s = ingest_csv_series(write_file(dir / "a.csv", "1\n2\n3\n"));
    EXPECT_EQ(s, (std::vector<double>{1, 2, 3}));
}

TEST(Csv, BadValueNamesLine) {
    const auto dir = temp_dir("bad");
    const auto p = write_file(dir / "b.csv", "1\nabc\n3\n");
    try {
        ingest_csv_series(p);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(Csv, ColumnByName) {
    const auto dir = temp_dir("named");
    const auto p = write_file(dir / "c.csv", "time,bits\n0,1e8\n1,2.5e8\n");
    EXPECT_EQ(ingest_csv_series(p, std::string("bits")), (std::vector<double>{1e8, 2.5e8}));
    EXPECT_EQ(ingest_csv_series(p, std::size_t{1}), (std::vector<double>{1e8, 2.5e8}));
    EXPECT_THROW(ingest_csv_series(p, std::string("missing")), DataError);
}

TEST(Csv, MissingFile) {
    EXPECT_THROW(ingest_csv_series("/nonexistent/traffic.csv"), DataError);
}

TEST(Csv, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -7.2e-300, 123456789.0}) {
        EXPECT_EQ(*parse_double(format_double(v)), v);
    }
}

TEST(DatasetFile, RoundTripAndDeterministicBytes) {
    const auto dir = temp_dir("io");
    Rng a(8), b(8);
    const auto ds = build_lorenz_dataset(LorenzParams{}, 50, a);
    write_dataset(ds, dir / "x.csv");
    write_dataset(build_lorenz_dataset(LorenzParams{}, 50, b), dir / "y.csv");
    EXPECT_EQ(slurp(dir / "x.csv"), slurp(dir / "y.csv"));

    const auto back = read_dataset(dir / "x.csv");
    EXPECT_EQ(back.size(), ds.size());
    EXPECT_EQ(back.condition_len(), ds.condition_len());
    EXPECT_TRUE(std::equal(back.conditions().begin(), back.conditions().end(), ds.conditions().begin()));
    EXPECT_TRUE(std::equal(back.targets().begin(), back.targets().end(), ds.targets().begin()));
    EXPECT_TRUE(std::equal(back.clusters().begin(), back.clusters().end(), ds.clusters().begin()));
    EXPECT_EQ(back.split().validation, ds.split().validation);
    EXPECT_EQ(back.scaler(), ds.scaler());
    EXPECT_EQ(back.provenance().kind, "lorenz");
}

TEST(DatasetFile, TruncatedCsvIsRejected) {
    const auto dir = temp_dir("trunc");
    const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    write_dataset(window_series(s, 3), dir / "d.csv");
    auto text = slurp(dir / "d.csv");
    text.resize(text.rfind('\n', text.size() - 2) + 1);
    write_file(dir / "d.csv", text);
    EXPECT_THROW(read_dataset(dir / "d.csv"), Error);
}
