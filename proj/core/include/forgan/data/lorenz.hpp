#pragma once

#include <cstddef>
#include <vector>

#include "forgan/data/dataset.hpp"
#include "forgan/data/ode.hpp"
#include "forgan/random.hpp"

namespace forgan::data {

/// Multimodal Lorenz benchmark: five nearly identical y0 seeds whose trajectories split
/// apart after t ~ 15 s. Conditions come from the [12, 17) s window, targets from one of a
/// few later instants; every recorded value carries additive Gaussian noise.
struct LorenzParams {
    double sigma = 16.0;
    double rho = 45.92;
    double beta = 4.0;
    double x0 = 1.0;
    double z0 = 1.0;
    std::vector<double> cluster_y0{1.0001, 1.000001, 1.00000001, 1.0000000001, 1.000000000001};
    std::vector<double> occurrence{0.055, 0.22, 0.42, 0.24, 0.065};
    double noise_std = 7.2;
    double dt = 0.02;
    double horizon = 26.0;
    /// RK4 steps per recorded sample.
    std::size_t substeps = 10;
    double condition_start = 12.0;
    double condition_end = 17.0;
    std::vector<double> target_times{20.0, 22.0, 25.0};

    /// Throws ContractError on inconsistent values (occurrences not summing to 1, window
    /// outside the horizon, ...).
    void validate() const;
    std::size_t record_count() const;
    std::size_t sample_index(double t) const;
    std::size_t condition_steps() const;
};

State<3> lorenz_derivative(const State<3>& s, const LorenzParams& p);

/// x(t) for t = 0, dt, ..., horizon (1301 samples with the defaults).
/// Throws NumericError if the state stops being finite.
std::vector<double> integrate_lorenz(const LorenzParams& p, double y0);

/// `n` independent (condition, target) samples. Each picks a cluster by `occurrence`, takes
/// that cluster's x over the condition window plus noise, and a target at a uniformly chosen
/// target time plus noise. Cluster labels are retained; the split is a seeded shuffle.
WindowedDataset build_lorenz_dataset(const LorenzParams& p, std::size_t n, Rng& rng);

}  // namespace forgan::data
