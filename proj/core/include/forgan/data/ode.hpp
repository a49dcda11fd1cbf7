#pragma once

#include <array>
#include <cstddef>

namespace forgan::data {

template <std::size_t N>
using State = std::array<double, N>;

/// One classical fourth-order Runge-Kutta step of y' = f(t, y).
template <std::size_t N, class F>
State<N> rk4_step(F&& f, double t, const State<N>& y, double h) {
    auto axpy = [](const State<N>& a, double s, const State<N>& b) {
        State<N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const State<N> k1 = f(t, y);
    const State<N> k2 = f(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const State<N> k3 = f(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const State<N> k4 = f(t + h, axpy(y, h, k3));
    State<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace forgan::data
