#include "forgan/data/mackey_glass.hpp"

#include <cmath>
#include <string>

#include "forgan/error.hpp"

namespace forgan::data {
namespace {

std::size_t exact_ratio(double num, double den, const char* what) {
    const double r = num / den;
    const double rounded = std::round(r);
    if (rounded < 1.0 || std::abs(r - rounded) > 1e-9 * std::max(1.0, r)) {
        throw ContractError(std::string("Mackey-Glass dt must divide ") + what + " exactly");
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace

double mackey_glass_derivative(double x_now, double x_delayed, const MackeyGlassParams& p) {
    return p.a * x_delayed / (1.0 + std::pow(x_delayed, 10)) - p.b * x_now;
}

std::vector<double> integrate_mackey_glass(const MackeyGlassParams& p, std::size_t length) {
    if (!(p.dt > 0.0)) throw ContractError("Mackey-Glass dt must be positive");
    const std::size_t delay = exact_ratio(p.tau, p.dt, "tau");
    const std::size_t every = exact_ratio(p.record_interval, p.dt, "record_interval");
    const std::size_t total_steps = (p.washout + length) * every;

    // x[k] holds x(k dt - delay dt); the first `delay + 1` entries are the constant history.
    std::vector<double> x(delay + 1 + total_steps, p.history_init);
    auto delayed = [&](std::size_t k) { return x[k - delay]; };

    std::vector<double> out;
    out.reserve(length);
    const double h = p.dt;
    for (std::size_t k = delay; k < delay + total_steps; ++k) {
        const double xd0 = delayed(k);
        const double xd1 = delayed(k + 1);
        const double xdm = 0.5 * (xd0 + xd1);
        const double xn = x[k];
        const double k1 = mackey_glass_derivative(xn, xd0, p);
        const double k2 = mackey_glass_derivative(xn + 0.5 * h * k1, xdm, p);
        const double k3 = mackey_glass_derivative(xn + 0.5 * h * k2, xdm, p);
        const double k4 = mackey_glass_derivative(xn + h * k3, xd1, p);
        x[k + 1] = xn + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(x[k + 1])) throw NumericError("Mackey-Glass integration diverged");

        const std::size_t step = k + 1 - delay;
        if (step % every == 0 && step / every > p.washout) out.push_back(x[k + 1]);
    }
    return out;
}

}  // namespace forgan::data
