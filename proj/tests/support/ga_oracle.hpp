#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "forgan/model/hyper_params.hpp"
#include "forgan/random.hpp"
#include "forgan/tune/genetic.hpp"

namespace forgan::oracle {

template <class T>
double domain_index(std::span<const T> domain, T v) {
    return static_cast<double>(std::find(domain.begin(), domain.end(), v) - domain.begin());
}

/// L1 distance between domain indices of every field; 0 only at `target`.
inline double gene_distance(const model::HyperParams& g, const model::HyperParams& target) {
    using namespace model;
    auto d = [](auto domain, auto a, auto b) { return std::abs(domain_index(domain, a) - domain_index(domain, b)); };
    return d(cell_domain(), g.cell, target.cell) + d(width_domain(), g.gen_hidden, target.gen_hidden) +
           d(width_domain(), g.dis_hidden, target.dis_hidden) + d(noise_domain(), g.noise_dim, target.noise_dim) +
           d(width_domain(), g.condition_len, target.condition_len) + d(d_iter_domain(), g.d_iters, target.d_iters);
}

struct GaTrial {
    double ga_best = 0.0;
    double random_best = 0.0;
    bool monotone = true;
};

/// One seeded trial: GA (pool 8, 8 iterations) against the best of 8 random genes, both on
/// the distance to a random target.
inline GaTrial ga_vs_random(std::uint64_t seed) {
    Rng rng = make_rng(seed, "oracle");
    const auto target = tune::random_gene(rng);
    double random_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 8; ++i) random_best = std::min(random_best, gene_distance(tune::random_gene(rng), target));

    tune::GaConfig cfg;
    cfg.seed = seed;
    const auto r = tune::run_ga(cfg, [&](const model::HyperParams& h, std::uint64_t) {
        return gene_distance(h, target);
    });
    GaTrial t{*r.best.fitness, random_best, true};
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& it : r.iterations) {
        const double m = *it.pool.front().fitness;
        if (m > prev || *it.best.fitness > prev) t.monotone = false;
        prev = std::min(prev, m);
    }
    return t;
}

}  // namespace forgan::oracle
