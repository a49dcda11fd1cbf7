#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "forgan/data/dataset.hpp"
#include "forgan/model/hyper_params.hpp"
#include "forgan/model/training.hpp"
#include "forgan/random.hpp"

namespace forgan::tune {

/// One hyperparameter assignment. `fitness` is empty until evaluated; an undefined
/// validation KLD is stored as +infinity.
struct Gene {
    model::HyperParams hyper;
    std::optional<double> fitness;
};

struct GaConfig {
    std::size_t pool_size = 8;
    std::size_t iterations = 8;
    std::size_t survivors = 4;
    std::size_t crossover_count = 4;
    std::size_t mutation_count = 4;
    double mutation_rate = 1.0 / 6.0;
    std::uint64_t seed = 0;
    /// Training budget for each candidate when fitness comes from make_training_fitness.
    model::TrainConfig train;

    /// Throws ContractError unless survivors <= pool_size <= survivors + crossover + mutation,
    /// there are at least two survivors for crossover, and the rate lies in [0, 1].
    void validate() const;
};

/// Lower is better. `seed` is the isolated stream for this evaluation.
using FitnessFn = std::function<double(const model::HyperParams& hyper, std::uint64_t seed)>;

model::HyperParams random_gene(Rng& rng);
model::HyperParams crossover(const model::HyperParams& a, const model::HyperParams& b, Rng& rng);
model::HyperParams mutate(const model::HyperParams& g, double rate, Rng& rng);

struct IterationLog {
    std::size_t iteration = 0;
    /// The evaluated pool, best first.
    std::vector<Gene> pool;
    Gene best;
    /// Distinct fitness evaluations so far.
    std::size_t evaluations = 0;
};

struct GaResult {
    Gene best;
    std::vector<IterationLog> iterations;
    std::size_t evaluations = 0;
    /// Set when no evaluated gene had a finite fitness.
    bool all_undefined = false;
};

struct GaLogOptions {
    /// JSON-lines log, one line per iteration; empty disables logging.
    std::filesystem::path path;
    /// Continue from the last complete line of an existing log.
    bool resume = false;
};

/// Truncation selection with elitism. The best `survivors` of the pool breed crossover
/// children (random distinct survivor pairs) and mutants (random survivors); the next pool
/// is the best `pool_size` of survivors and offspring together. Fitness is cached per
/// distinct gene, so at most pool_size + (iterations - 1) * offspring evaluations run.
GaResult run_ga(const GaConfig& cfg, const FitnessFn& fitness, const GaLogOptions& log = {});

/// Trains a ForGAN per gene on `ds` with `train` and returns its best validation KLD
/// (+infinity when undefined or when C exceeds the dataset window).
FitnessFn make_training_fitness(const data::WindowedDataset& ds, const model::TrainConfig& train);

std::string gene_to_json(const Gene& gene);

}  // namespace forgan::tune
