#include "forgan/data/lorenz.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "forgan/error.hpp"

namespace forgan::data {

void LorenzParams::validate() const {
    if (cluster_y0.empty() || cluster_y0.size() != occurrence.size()) {
        throw ContractError("Lorenz cluster seeds and occurrences must be non-empty and of equal length");
    }
    const double total = std::accumulate(occurrence.begin(), occurrence.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) {
        throw ContractError("Lorenz cluster occurrences sum to " + std::to_string(total) + ", expected 1");
    }
    for (double w : occurrence) {
        if (!(w >= 0.0)) throw ContractError("Lorenz cluster occurrence must be non-negative");
    }
    if (!(dt > 0.0) || !(horizon > 0.0) || substeps == 0) throw ContractError("Lorenz dt/horizon must be positive");
    if (!(noise_std >= 0.0)) throw ContractError("Lorenz noise_std must be non-negative");
    if (!(condition_start >= 0.0 && condition_end > condition_start && condition_end <= horizon)) {
        throw ContractError("Lorenz condition window must lie inside [0, horizon]");
    }
    if (target_times.empty()) throw ContractError("Lorenz needs at least one target time");
    for (double t : target_times) {
        if (t < 0.0 || t > horizon) throw ContractError("Lorenz target time outside the horizon");
    }
}

std::size_t LorenzParams::record_count() const {
    return static_cast<std::size_t>(std::llround(horizon / dt)) + 1;
}

std::size_t LorenzParams::sample_index(double t) const {
    return static_cast<std::size_t>(std::llround(t / dt));
}

std::size_t LorenzParams::condition_steps() const {
    return sample_index(condition_end) - sample_index(condition_start);
}

State<3> lorenz_derivative(const State<3>& s, const LorenzParams& p) {
    const auto [x, y, z] = s;
    return {p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z};
}

std::vector<double> integrate_lorenz(const LorenzParams& p, double y0) {
    if (!(p.dt > 0.0) || p.substeps == 0) throw ContractError("Lorenz dt and substeps must be positive");
    const std::size_t n = p.record_count();
    const double h = p.dt / static_cast<double>(p.substeps);
    auto f = [&p](double, const State<3>& s) { return lorenz_derivative(s, p); };

    std::vector<double> xs;
    xs.reserve(n);
    State<3> s{p.x0, y0, p.z0};
    xs.push_back(s[0]);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t k = 0; k < p.substeps; ++k) s = rk4_step(f, 0.0, s, h);
        if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2])) {
            throw NumericError("Lorenz integration diverged at t = " + std::to_string(static_cast<double>(i) * p.dt));
        }
        xs.push_back(s[0]);
    }
    return xs;
}

WindowedDataset build_lorenz_dataset(const LorenzParams& p, std::size_t n, Rng& rng) {
    p.validate();
    if (n == 0) throw ContractError("Lorenz dataset needs at least one sample");

    std::vector<std::vector<double>> clean;
    clean.reserve(p.cluster_y0.size());
    for (double y0 : p.cluster_y0) clean.push_back(integrate_lorenz(p, y0));

    const std::size_t first = p.sample_index(p.condition_start);
    const std::size_t steps = p.condition_steps();
    std::vector<std::size_t> target_idx;
    for (double t : p.target_times) target_idx.push_back(p.sample_index(t));

    std::discrete_distribution<int> pick_cluster(p.occurrence.begin(), p.occurrence.end());
    std::uniform_int_distribution<std::size_t> pick_target(0, target_idx.size() - 1);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::vector<double> conditions;
    conditions.reserve(n * steps);
    std::vector<double> targets;
    targets.reserve(n);
    std::vector<int> clusters;
    clusters.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        const int c = pick_cluster(rng);
        const auto& x = clean[static_cast<std::size_t>(c)];
        for (std::size_t k = 0; k < steps; ++k) conditions.push_back(x[first + k] + p.noise_std * noise(rng));
        const std::size_t t = target_idx[pick_target(rng)];
        targets.push_back(x[t] + p.noise_std * noise(rng));
        clusters.push_back(c);
    }
    SplitIndices split = shuffled_split(n, rng);

    nlohmann::json params = {
        {"sigma", p.sigma},         {"rho", p.rho},
        {"beta", p.beta},           {"x0", p.x0},
        {"z0", p.z0},               {"cluster_y0", p.cluster_y0},
        {"occurrence", p.occurrence}, {"noise_std", p.noise_std},
        {"dt", p.dt},               {"horizon", p.horizon},
        {"substeps", p.substeps},   {"condition_start", p.condition_start},
        {"condition_end", p.condition_end}, {"target_times", p.target_times},
        {"n", n},
    };
    return WindowedDataset(steps, std::move(conditions), std::move(targets), std::move(clusters), std::move(split),
                           Provenance{"lorenz", params.dump(), 0});
}

}  // namespace forgan::data
