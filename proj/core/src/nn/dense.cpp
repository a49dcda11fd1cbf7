#include "forgan/nn/dense.hpp"

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "forgan/error.hpp"

namespace forgan::nn {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
    }
    return "identity";
}

Activation parse_activation(std::string_view name) {
    if (name == "identity") return Activation::identity;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    throw ContractError("unknown activation '" + std::string(name) + "'");
}

void activate(Activation a, std::span<double> values) {
    switch (a) {
        case Activation::identity: break;
        case Activation::sigmoid:
            for (double& v : values) v = 1.0 / (1.0 + std::exp(-v));
            break;
        case Activation::tanh:
            for (double& v : values) v = std::tanh(v);
            break;
        case Activation::relu:
            for (double& v : values) v = v > 0.0 ? v : 0.0;
            break;
    }
}

Var apply_activation(Tape& tape, Var x, Activation a) {
    switch (a) {
        case Activation::identity: return x;
        case Activation::sigmoid: return tape.sigmoid(x);
        case Activation::tanh: return tape.tanh(x);
        case Activation::relu: return tape.relu(x);
    }
    return x;
}

void glorot_uniform(Tensor& weights, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : weights.values()) w = dist(rng);
}

DenseLayer::DenseLayer(std::size_t input_width, std::size_t output_width, Activation activation)
    : weights_({output_width, input_width}), bias_({output_width}), activation_(activation) {
    if (input_width == 0 || output_width == 0) throw ContractError("dense layer widths must be positive");
}

void DenseLayer::initialize(Rng& rng) {
    glorot_uniform(weights_, input_width(), output_width(), rng);
    bias_.fill(0.0);
}

Tensor DenseLayer::forward(const Tensor& input) const {
    if (input.cols() != input_width() || input.rank() > 2 || input.empty()) {
        throw ContractError("dense_forward: input " + to_string(input.shape()) + " does not match layer width " +
                            std::to_string(input_width()));
    }
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const auto rows = static_cast<Eigen::Index>(input.rows());
    Eigen::Map<const RowMatrix> x(input.data(), rows, static_cast<Eigen::Index>(input_width()));
    Eigen::Map<const RowMatrix> w(weights_.data(), static_cast<Eigen::Index>(output_width()),
                                  static_cast<Eigen::Index>(input_width()));
    Eigen::Map<const Eigen::RowVectorXd> b(bias_.data(), static_cast<Eigen::Index>(output_width()));

    Tensor out({input.rows(), output_width()});
    Eigen::Map<RowMatrix> y(out.data(), rows, static_cast<Eigen::Index>(output_width()));
    y.noalias() = x * w.transpose();
    y.rowwise() += b;
    activate(activation_, out.values());
    return out;
}

Var DenseLayer::forward(Tape& tape, Var input, Binding binding) {
    Var w = binding == Binding::trainable ? tape.parameter(weights_) : tape.frozen(weights_);
    Var b = binding == Binding::trainable ? tape.parameter(bias_) : tape.frozen(bias_);
    return apply_activation(tape, tape.add_bias(tape.linear(input, w), b), activation_);
}

}  // namespace forgan::nn
