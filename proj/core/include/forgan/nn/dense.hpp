#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "forgan/nn/tape.hpp"
#include "forgan/nn/tensor.hpp"
#include "forgan/random.hpp"

namespace forgan::nn {

enum class Activation { identity, sigmoid, tanh, relu };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Applies `a` elementwise in place.
void activate(Activation a, std::span<double> values);

/// How a layer's parameters enter a Tape: trainable leaves accumulate gradients,
/// frozen leaves are read-only.
enum class Binding { trainable, frozen };

/// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Tensor& weights, std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// y = activation(x W^T + b), row by row.
class DenseLayer {
public:
    DenseLayer() = default;
    DenseLayer(std::size_t input_width, std::size_t output_width, Activation activation);

    std::size_t input_width() const noexcept { return weights_.cols(); }
    std::size_t output_width() const noexcept { return weights_.rows(); }
    Activation activation() const noexcept { return activation_; }

    Tensor& weights() noexcept { return weights_; }
    const Tensor& weights() const noexcept { return weights_; }
    Tensor& bias() noexcept { return bias_; }
    const Tensor& bias() const noexcept { return bias_; }

    /// Glorot-uniform weights, zero bias.
    void initialize(Rng& rng);

    /// `input` is [B x in] (or a rank-1 vector of length in); returns [B x out].
    Tensor forward(const Tensor& input) const;
    Var forward(Tape& tape, Var input, Binding binding);

    std::vector<Tensor*> parameters() { return {&weights_, &bias_}; }
    std::vector<const Tensor*> parameters() const { return {&weights_, &bias_}; }

private:
    Tensor weights_;
    Tensor bias_;
    Activation activation_ = Activation::identity;
};

Var apply_activation(Tape& tape, Var x, Activation a);

}  // namespace forgan::nn
