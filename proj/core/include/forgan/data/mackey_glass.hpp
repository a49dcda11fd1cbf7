#pragma once

#include <cstddef>
#include <vector>

namespace forgan::data {

/// dx/dt = a x(t - tau) / (1 + x(t - tau)^10) - b x(t), with constant history x(t <= 0).
/// The defaults are the chaotic tau = 17 regime; with a < b the series decays to 0.
struct MackeyGlassParams {
    double a = 0.2;
    double b = 0.1;
    double tau = 17.0;
    double dt = 0.1;
    double record_interval = 1.0;
    std::size_t washout = 1000;
    double history_init = 1.2;
};

double mackey_glass_derivative(double x_now, double x_delayed, const MackeyGlassParams& p);

/// Fixed-step RK4 on the delay equation. The delayed term at half steps is the average of
/// the two neighbouring stored points. `washout` recorded points are discarded, then
/// `length` values are returned, one per `record_interval`.
/// Throws ContractError unless dt divides both tau and record_interval.
std::vector<double> integrate_mackey_glass(const MackeyGlassParams& p, std::size_t length);

}  // namespace forgan::data
