#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "forgan/nn/dense.hpp"
#include "forgan/nn/recurrent.hpp"
#include "forgan/nn/tape.hpp"
#include "forgan/random.hpp"

namespace forgan::oracle {

struct GradMismatch {
    std::string tensor;
    std::size_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};

struct GradCheckResult {
    std::size_t checked = 0;
    double worst_rel_error = 0.0;
    std::vector<GradMismatch> failures;
};

/// |a - n| / max(|a|, |n|, floor). The floor keeps gradients that are zero up to rounding
/// from producing meaningless ratios.
inline double relative_error(double a, double n, double floor = 1e-6) {
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

/// A small recurrent network with a two-layer head, in the shape of the generator:
///   h = rnn(steps); o = dense2(tanh(dense1([h ++ extra]))); loss = mean((o - y)^2) - mean(log sigmoid(o))
/// Step 0 is itself a trainable tensor so input gradients are exercised too.
struct ProbeNet {
    nn::RecurrentCell cell;
    nn::DenseLayer hidden;
    nn::DenseLayer out;
    nn::Tensor first_step;
    std::vector<nn::Tensor> steps;
    nn::Tensor extra;
    nn::Tensor target;

    ProbeNet(nn::CellKind kind, std::size_t batch, std::size_t in, std::size_t width, std::size_t t_len,
             std::size_t extra_width, Rng& rng)
        : cell(kind, in, width),
          hidden(width + extra_width, width, nn::Activation::tanh),
          out(width, 1, nn::Activation::identity) {
        cell.initialize(rng);
        hidden.initialize(rng);
        out.initialize(rng);
        std::normal_distribution<double> n(0.0, 1.0);
        auto random = [&](nn::Shape s) {
            nn::Tensor t(s);
            for (double& v : t.values()) v = n(rng);
            return t;
        };
        // Randomize biases too, so every gate is away from its symmetric starting point.
        for (nn::Tensor* p : cell.parameters()) {
            for (double& v : p->values()) v += 0.1 * n(rng);
        }
        for (double& v : hidden.bias().values()) v = 0.1 * n(rng);
        first_step = random({batch, in});
        for (std::size_t t = 1; t < t_len; ++t) steps.push_back(random({batch, in}));
        extra = random({batch, extra_width});
        target = random({batch, 1});
    }

    std::vector<std::pair<std::string, nn::Tensor*>> parameters() {
        std::vector<std::pair<std::string, nn::Tensor*>> ps;
        std::size_t k = 0;
        for (nn::Tensor* p : cell.parameters()) ps.emplace_back("rnn[" + std::to_string(k++) + "]", p);
        ps.emplace_back("hidden.weights", &hidden.weights());
        ps.emplace_back("hidden.bias", &hidden.bias());
        ps.emplace_back("out.weights", &out.weights());
        ps.emplace_back("out.bias", &out.bias());
        ps.emplace_back("input.step0", &first_step);
        return ps;
    }

    double loss(bool with_backward) {
        nn::Tape tape;
        std::vector<nn::Var> xs{with_backward ? tape.parameter(first_step) : tape.constant(first_step)};
        for (const auto& s : steps) xs.push_back(tape.constant(s));
        const auto binding = with_backward ? nn::Binding::trainable : nn::Binding::frozen;
        nn::Var h0 = tape.constant(nn::Tensor({first_step.rows(), cell.hidden_width()}));
        nn::Var h = cell.forward(tape, xs, h0, binding);
        nn::Var j = tape.concat_cols(h, tape.constant(extra));
        nn::Var o = out.forward(tape, hidden.forward(tape, j, binding), binding);
        nn::Var l = tape.mean(tape.square(o - tape.constant(target))) -
                    tape.mean(tape.log(tape.sigmoid(o), 1e-12));
        const double value = tape.value(l)[0];
        if (with_backward) tape.backward(l);
        return value;
    }
};

/// Central finite differences against the tape's analytic gradients for every element of
/// every parameter. The numeric value Richardson-combines steps h and h/2,
/// (4 D(h/2) - D(h)) / 3, which cancels the h^2 term while keeping rounding noise near
/// 1e-13 at h = 1e-3.
inline GradCheckResult check_gradients(ProbeNet& net, double tolerance, double h = 1e-3) {
    GradCheckResult r;
    for (auto& [name, p] : net.parameters()) p->zero_grad();
    net.loss(true);
    for (auto& [name, p] : net.parameters()) {
        const std::vector<double> analytic(p->grad().begin(), p->grad().end());
        for (std::size_t i = 0; i < p->size(); ++i) {
            const double saved = (*p)[i];
            auto central = [&](double step) {
                (*p)[i] = saved + step;
                const double up = net.loss(false);
                (*p)[i] = saved - step;
                const double down = net.loss(false);
                (*p)[i] = saved;
                return (up - down) / (2.0 * step);
            };
            const double numeric = (4.0 * central(h / 2.0) - central(h)) / 3.0;
            const double err = relative_error(analytic[i], numeric);
            r.worst_rel_error = std::max(r.worst_rel_error, err);
            ++r.checked;
            if (err > tolerance) r.failures.push_back({name, i, analytic[i], numeric, err});
        }
    }
    return r;
}

}  // namespace forgan::oracle
