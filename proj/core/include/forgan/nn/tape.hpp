#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "forgan/nn/tensor.hpp"

namespace forgan::nn {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
public:
    Var() = default;

    Tape* tape() const noexcept { return tape_; }
    std::size_t id() const noexcept { return id_; }
    const Tensor& value() const;
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }

private:
    friend class Tape;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Records a forward computation over rank-2 values and replays it backwards.
///
/// Leaves are constants (no gradient), frozen parameters (read in place, no gradient) or
/// trainable parameters (gradient accumulated into the bound Tensor's grad slot by
/// `backward`). A node only records a backward closure when some input needs a gradient,
/// so frozen sub-networks cost a forward pass and the input-gradient products only.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Tensor value);
    Var frozen(const Tensor& param);
    Var parameter(Tensor& param);

    const Tensor& value(Var v) const;
    /// Gradient of the last `backward` loss w.r.t. `v` (zeros when none flowed).
    std::vector<double> grad(Var v) const;
    bool requires_grad(Var v) const;
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Seeds d(loss)/d(loss) = 1 and propagates to every trainable leaf.
    /// Throws ContractError unless `loss` is a 1x1 value recorded on this tape.
    void backward(Var loss);

    // x[B x in] * w[out x in]^T -> [B x out]
    Var linear(Var x, Var w);
    // x[B x n] + b[n] broadcast over rows
    Var add_bias(Var x, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double k);
    Var one_minus(Var a);
    Var sigmoid(Var a);
    Var tanh(Var a);
    Var relu(Var a);
    Var square(Var a);
    /// sqrt with a zero gradient at exactly 0.
    Var sqrt(Var a);
    /// log(a + eps)
    Var log(Var a, double eps);
    /// [B x n] ++ [B x m] -> [B x (n+m)]
    Var concat_cols(Var a, Var b);
    /// Mean over every element -> 1x1.
    Var mean(Var a);

    /// Backward rule of a custom node: receives d(loss)/d(output) and adds input gradients
    /// through `accumulate`.
    using CustomBackward = std::function<void(Tape& tape, std::span<const double> dy)>;

    /// Records a value computed outside the tape. The node needs a gradient when any of
    /// `inputs` does; `backward` then runs once during `backward()`.
    Var custom(Tensor value, std::span<const Var> inputs, CustomBackward backward);
    /// Gradient accumulator of `v` while a backward pass runs (zeroed on first use).
    std::span<double> accumulate(Var v);

private:
    struct Node {
        Tensor owned;
        const Tensor* ref = nullptr;
        Tensor* param = nullptr;
        AlignedVector grad;
        bool requires_grad = false;
        std::function<void(Tape&)> backward;

        const Tensor& value() const { return ref ? *ref : owned; }
    };

    Var push(Tensor value, bool requires_grad, std::function<void(Tape&)> backward);
    void check(Var v) const;
    Node& node(Var v) { return nodes_[v.id()]; }
    const Node& node(Var v) const { return nodes_[v.id()]; }
    AlignedVector& grad_buffer(Var v);

    std::deque<Node> nodes_;
};

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator*(double k, Var a);

}  // namespace forgan::nn
