#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "forgan/error.hpp"
#include "forgan/tune/genetic.hpp"
#include "ga_oracle.hpp"

using namespace forgan;
using namespace forgan::tune;
using model::HyperParams;

namespace {

const HyperParams kA{nn::CellKind::gru, 1, 2, 1, 4, 1};
const HyperParams kB{nn::CellKind::lstm, 256, 128, 32, 64, 7};

bool in_domains(const HyperParams& h) {
    auto has = [](auto d, auto v) { return std::find(d.begin(), d.end(), v) != d.end(); };
    return h.valid() && has(model::width_domain(), h.condition_len);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

FitnessFn distance_to(const HyperParams& target) {
    return [target](const HyperParams& h, std::uint64_t) { return oracle::gene_distance(h, target); };
}

}  // namespace

TEST(RandomGene, CoversEveryDomainValue) {
    Rng rng(1);
    std::set<std::size_t> rg, rd, n, c, d;
    std::set<nn::CellKind> cells;
    for (int i = 0; i < 1000; ++i) {
        const auto g = random_gene(rng);
        ASSERT_TRUE(in_domains(g));
        cells.insert(g.cell);
        rg.insert(g.gen_hidden);
        rd.insert(g.dis_hidden);
        n.insert(g.noise_dim);
        c.insert(g.condition_len);
        d.insert(g.d_iters);
    }
    EXPECT_EQ(cells.size(), 2u);
    EXPECT_EQ(rg.size(), 9u);
    EXPECT_EQ(rd.size(), 9u);
    EXPECT_EQ(n.size(), 6u);
    EXPECT_EQ(c.size(), 9u);
    EXPECT_EQ(d.size(), 7u);
}

TEST(RandomGene, SeededDrawsRepeat) {
    Rng a(5), b(5);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(random_gene(a), random_gene(b));
}

TEST(Crossover, IdenticalParentsAndContainment) {
    Rng rng(2);
    EXPECT_EQ(crossover(kA, kA, rng), kA);
    for (int i = 0; i < 200; ++i) {
        const auto c = crossover(kA, kB, rng);
        EXPECT_TRUE(c.cell == kA.cell || c.cell == kB.cell);
        EXPECT_TRUE(c.gen_hidden == kA.gen_hidden || c.gen_hidden == kB.gen_hidden);
        EXPECT_TRUE(c.dis_hidden == kA.dis_hidden || c.dis_hidden == kB.dis_hidden);
        EXPECT_TRUE(c.noise_dim == kA.noise_dim || c.noise_dim == kB.noise_dim);
        EXPECT_TRUE(c.condition_len == kA.condition_len || c.condition_len == kB.condition_len);
        EXPECT_TRUE(c.d_iters == kA.d_iters || c.d_iters == kB.d_iters);
    }
}

TEST(Crossover, InheritanceFrequencyIsHalf) {
    Rng rng(3);
    std::array<int, 6> from_a{};
    for (int i = 0; i < 1000; ++i) {
        const auto c = crossover(kA, kB, rng);
        from_a[0] += c.cell == kA.cell;
        from_a[1] += c.gen_hidden == kA.gen_hidden;
        from_a[2] += c.dis_hidden == kA.dis_hidden;
        from_a[3] += c.noise_dim == kA.noise_dim;
        from_a[4] += c.condition_len == kA.condition_len;
        from_a[5] += c.d_iters == kA.d_iters;
    }
    for (int f : from_a) EXPECT_NEAR(f / 1000.0, 0.5, 0.05);
}

TEST(Mutate, RateZeroAndOne) {
    Rng rng(4);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(mutate(kB, 0.0, rng), kB);
    std::array<int, 6> changed{};
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        const auto m = mutate(kB, 1.0, rng);
        ASSERT_TRUE(in_domains(m));
        changed[0] += m.cell != kB.cell;
        changed[1] += m.gen_hidden != kB.gen_hidden;
        changed[2] += m.dis_hidden != kB.dis_hidden;
        changed[3] += m.noise_dim != kB.noise_dim;
        changed[4] += m.condition_len != kB.condition_len;
        changed[5] += m.d_iters != kB.d_iters;
    }
    const std::array<double, 6> sizes{2, 9, 9, 6, 9, 7};
    for (std::size_t f = 0; f < 6; ++f) {
        const double p = 1.0 - 1.0 / sizes[f];
        EXPECT_NEAR(changed[f] / static_cast<double>(n), p, 4.0 * std::sqrt(p * (1 - p) / n)) << "field " << f;
    }
}

TEST(Mutate, DefaultRateChangesAboutOneField) {
    Rng rng(7);
    double fields = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const auto m = mutate(kB, 1.0 / 6.0, rng);
        fields += (m.cell != kB.cell) + (m.gen_hidden != kB.gen_hidden) + (m.dis_hidden != kB.dis_hidden) +
                  (m.noise_dim != kB.noise_dim) + (m.condition_len != kB.condition_len) + (m.d_iters != kB.d_iters);
    }
    // Each field is resampled with prob 1/6 and then differs with prob 1 - 1/|domain|.
    const double expected = (1.0 / 6.0) * ((1 - 1 / 2.0) + 3 * (1 - 1 / 9.0) + (1 - 1 / 6.0) + (1 - 1 / 7.0));
    EXPECT_NEAR(fields / 2000.0, expected, 0.06);
}

TEST(GaConfig, Validation) {
    GaConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.crossover_count = 2;
    cfg.mutation_count = 1;
    EXPECT_THROW(cfg.validate(), ContractError);
    cfg = GaConfig{};
    cfg.survivors = 9;
    EXPECT_THROW(cfg.validate(), ContractError);
    cfg = GaConfig{};
    cfg.survivors = 1;
    cfg.crossover_count = 7;
    EXPECT_THROW(cfg.validate(), ContractError);
    cfg = GaConfig{};
    cfg.mutation_rate = 1.5;
    EXPECT_THROW(cfg.validate(), ContractError);
}

TEST(RunGa, PoolInvariantsAndElitism) {
    Rng rng(8);
    const auto target = random_gene(rng);
    GaConfig cfg;
    cfg.seed = 11;
    std::size_t calls = 0;
    const auto r = run_ga(cfg, [&](const HyperParams& h, std::uint64_t) {
        ++calls;
        return oracle::gene_distance(h, target);
    });
    ASSERT_EQ(r.iterations.size(), 8u);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& it : r.iterations) {
        ASSERT_EQ(it.pool.size(), 8u);
        for (const auto& g : it.pool) {
            EXPECT_TRUE(in_domains(g.hyper));
            ASSERT_TRUE(g.fitness.has_value());
        }
        EXPECT_TRUE(std::is_sorted(it.pool.begin(), it.pool.end(),
                                   [](const Gene& a, const Gene& b) { return *a.fitness < *b.fitness; }));
        EXPECT_LE(*it.best.fitness, prev);
        prev = *it.best.fitness;
    }
    EXPECT_EQ(calls, r.evaluations);
    EXPECT_LE(calls, 64u);
    EXPECT_EQ(*r.best.fitness, oracle::gene_distance(r.best.hyper, target));
    EXPECT_FALSE(r.all_undefined);
}

TEST(RunGa, BestGeneIsKept) {
    Rng rng(9);
    const auto target = random_gene(rng);
    const auto r = run_ga(GaConfig{}, distance_to(target));
    for (std::size_t i = 1; i < r.iterations.size(); ++i) {
        const auto& pool = r.iterations[i].pool;
        const Gene& champion = r.iterations[i - 1].pool.front();
        EXPECT_LE(*pool.front().fitness, *champion.fitness);
        EXPECT_TRUE(std::any_of(pool.begin(), pool.end(), [&](const Gene& g) {
            return g.hyper == champion.hyper || *g.fitness < *champion.fitness;
        }));
    }
}

TEST(RunGa, CacheAvoidsRepeatEvaluations) {
    std::map<std::string, int> seen;
    const auto r = run_ga(GaConfig{}, [&](const HyperParams& h, std::uint64_t) {
        EXPECT_EQ(++seen[h.describe()], 1) << h.describe();
        return static_cast<double>(h.gen_hidden);
    });
    EXPECT_EQ(r.evaluations, seen.size());
}

TEST(RunGa, UndefinedNeverOutranksFinite) {
    GaConfig cfg;
    cfg.seed = 2;
    const auto r = run_ga(cfg, [](const HyperParams& h, std::uint64_t) {
        if (h.cell == nn::CellKind::lstm) return std::numeric_limits<double>::quiet_NaN();
        return static_cast<double>(h.noise_dim);
    });
    for (const auto& it : r.iterations) {
        bool seen_inf = false;
        for (const auto& g : it.pool) {
            if (std::isinf(*g.fitness)) seen_inf = true;
            else EXPECT_FALSE(seen_inf) << "finite gene ranked after an undefined one";
        }
    }
    EXPECT_EQ(r.best.hyper.cell, nn::CellKind::gru);

    const auto none = run_ga(cfg, [](const HyperParams&, std::uint64_t) {
        return std::numeric_limits<double>::infinity();
    });
    EXPECT_TRUE(none.all_undefined);
}

TEST(RunGa, SeededTrajectoryRepeats) {
    const auto target = kB;
    GaConfig cfg;
    cfg.seed = 21;
    const auto a = run_ga(cfg, distance_to(target));
    const auto b = run_ga(cfg, distance_to(target));
    ASSERT_EQ(a.iterations.size(), b.iterations.size());
    for (std::size_t i = 0; i < a.iterations.size(); ++i) {
        for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(a.iterations[i].pool[k].hyper, b.iterations[i].pool[k].hyper);
    }
}

TEST(RunGa, GeneSeedsAreDistinct) {
    std::set<std::uint64_t> seeds;
    std::size_t calls = 0;
    run_ga(GaConfig{}, [&](const HyperParams& h, std::uint64_t s) {
        ++calls;
        seeds.insert(s);
        return static_cast<double>(h.dis_hidden);
    });
    EXPECT_EQ(seeds.size(), calls);
}

TEST(RunGa, BeatsRandomSearch) {
    int wins = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto trial = oracle::ga_vs_random(t);
        EXPECT_TRUE(trial.monotone);
        wins += trial.ga_best < trial.random_best;
    }
    EXPECT_GE(wins, 95);
}

TEST(GaLog, LinesAndResume) {
    const auto dir = std::filesystem::temp_directory_path() / "forgan_test_tune";
    std::filesystem::remove_all(dir);
    GaConfig cfg;
    cfg.seed = 31;
    const auto fit = distance_to(kA);
    const auto full = run_ga(cfg, fit, {dir / "full.jsonl", false});
    const std::string text = slurp(dir / "full.jsonl");
    std::vector<std::string> lines;
    for (std::size_t p = 0, q; (q = text.find('\n', p)) != std::string::npos; p = q + 1) lines.push_back(text.substr(p, q - p));
    ASSERT_EQ(lines.size(), 8u);
    const auto first = nlohmann::json::parse(lines[0]);
    EXPECT_EQ(first["iteration"], 0);
    EXPECT_EQ(first["pool"].size(), 8u);
    EXPECT_TRUE(first.contains("best"));

    // Simulate an interrupted run: keep three complete lines plus a torn fourth.
    {
        std::ofstream out(dir / "cut.jsonl");
        for (int i = 0; i < 3; ++i) out << lines[i] << '\n';
        out << lines[3].substr(0, lines[3].size() / 2);
    }
    std::size_t calls = 0;
    const auto resumed = run_ga(cfg, [&](const HyperParams& h, std::uint64_t s) {
        ++calls;
        return fit(h, s);
    }, {dir / "cut.jsonl", true});
    EXPECT_EQ(resumed.best.hyper, full.best.hyper);
    EXPECT_EQ(*resumed.best.fitness, *full.best.fitness);
    EXPECT_EQ(resumed.evaluations, full.evaluations);
    EXPECT_LT(calls, full.evaluations);
    const auto& a = full.iterations.back().pool;
    const auto& b = resumed.iterations.back().pool;
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].hyper, b[k].hyper);
}

TEST(GaLog, UndefinedFitnessSerialized) {
    const auto j = nlohmann::json::parse(gene_to_json({kA, std::numeric_limits<double>::infinity()}));
    EXPECT_EQ(j["fitness"], "undefined");
    EXPECT_TRUE(nlohmann::json::parse(gene_to_json({kA, std::nullopt}))["fitness"].is_null());
    EXPECT_EQ(nlohmann::json::parse(gene_to_json({kA, 0.25}))["fitness"], 0.25);
}

TEST(TrainingFitness, InfeasibleWindowIsInfinite) {
    std::vector<double> s(300);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(0.2 * static_cast<double>(i));
    const auto ds = data::window_series(s, 4);
    model::TrainConfig train;
    train.generator_steps = 3;
    train.batch_size = 8;
    train.validation_samples = 5;
    const auto fit = make_training_fitness(ds, train);
    EXPECT_TRUE(std::isinf(fit({nn::CellKind::gru, 2, 2, 1, 8, 1}, 1)));
    const double f = fit({nn::CellKind::gru, 2, 2, 1, 4, 1}, 1);
    EXPECT_FALSE(std::isnan(f));
    EXPECT_EQ(f, fit({nn::CellKind::gru, 2, 2, 1, 4, 1}, 1));
}
