#include "forgan/data/toy.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "forgan/error.hpp"

namespace forgan::data {

WindowedDataset build_toy_bimodal(std::size_t n, Rng& rng, const ToyBimodalParams& p) {
    if (n == 0) throw ContractError("toy dataset needs at least one sample");
    if (p.steps == 0) throw ContractError("toy dataset needs at least one condition step");
    if (!(p.p_one >= 0.0 && p.p_one <= 1.0)) throw ContractError("toy p_one must lie in [0, 1]");

    std::vector<double> templ(p.steps);
    for (std::size_t k = 0; k < p.steps; ++k) {
        templ[k] = 0.5 + 0.3 * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p.steps));
    }

    std::normal_distribution<double> noise(0.0, p.noise_std);
    std::bernoulli_distribution one(p.p_one);
    std::vector<double> conditions;
    conditions.reserve(n * p.steps);
    std::vector<double> targets;
    targets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double v : templ) conditions.push_back(v + noise(rng));
        targets.push_back(one(rng) ? 1.0 : 0.0);
    }
    SplitIndices split = shuffled_split(n, rng);
    nlohmann::json params = {{"n", n}, {"steps", p.steps}, {"p_one", p.p_one}, {"noise_std", p.noise_std}};
    return WindowedDataset(p.steps, std::move(conditions), std::move(targets), {}, std::move(split),
                           Provenance{"toy-bimodal", params.dump(), 0});
}

}  // namespace forgan::data
