#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forgan/nn/dense.hpp"
#include "forgan/nn/recurrent.hpp"
#include "forgan/nn/tape.hpp"
#include "forgan/nn/tensor.hpp"
#include "forgan/random.hpp"

namespace forgan::model {

using NamedTensor = std::pair<std::string, nn::Tensor*>;
using NamedConstTensor = std::pair<std::string, const nn::Tensor*>;

/// RNN over the condition window, then [state ++ noise] -> relu dense -> linear scalar.
class Generator {
public:
    Generator() = default;
    Generator(nn::CellKind cell, std::size_t hidden, std::size_t noise_dim, std::size_t condition_len);

    std::size_t hidden_width() const noexcept { return rnn_.hidden_width(); }
    std::size_t noise_dim() const noexcept { return noise_dim_; }
    std::size_t condition_len() const noexcept { return condition_len_; }
    std::size_t head_width() const noexcept { return hidden_.output_width(); }

    nn::RecurrentCell& rnn() noexcept { return rnn_; }
    const nn::RecurrentCell& rnn() const noexcept { return rnn_; }
    nn::DenseLayer& hidden_layer() noexcept { return hidden_; }
    const nn::DenseLayer& hidden_layer() const noexcept { return hidden_; }
    nn::DenseLayer& output_layer() noexcept { return output_; }
    const nn::DenseLayer& output_layer() const noexcept { return output_; }

    void initialize(Rng& rng);

    /// `conditions` is [B x C] in scaled units; returns the final RNN state [B x RG].
    nn::Tensor encode(const nn::Tensor& conditions) const;
    /// `state` is [B x RG], `noise` is [B x N]; returns [B x 1].
    nn::Tensor head(const nn::Tensor& state, const nn::Tensor& noise) const;
    nn::Tensor forward(const nn::Tensor& conditions, const nn::Tensor& noise) const;
    double generate(std::span<const double> condition, std::span<const double> noise) const;

    nn::Var forward(nn::Tape& tape, const nn::Tensor& conditions, const nn::Tensor& noise, nn::Binding binding);

    std::vector<NamedTensor> named_parameters();
    std::vector<NamedConstTensor> named_parameters() const;
    std::vector<nn::Tensor*> parameters();

private:
    nn::RecurrentCell rnn_;
    nn::DenseLayer hidden_;
    nn::DenseLayer output_;
    std::size_t noise_dim_ = 0;
    std::size_t condition_len_ = 0;
};

/// RNN over the (C+1)-step window [condition ++ candidate] -> sigmoid dense.
class Discriminator {
public:
    Discriminator() = default;
    Discriminator(nn::CellKind cell, std::size_t hidden, std::size_t condition_len);

    std::size_t hidden_width() const noexcept { return rnn_.hidden_width(); }
    std::size_t condition_len() const noexcept { return condition_len_; }

    nn::RecurrentCell& rnn() noexcept { return rnn_; }
    const nn::RecurrentCell& rnn() const noexcept { return rnn_; }
    nn::DenseLayer& output_layer() noexcept { return output_; }
    const nn::DenseLayer& output_layer() const noexcept { return output_; }

    void initialize(Rng& rng);

    /// `conditions` is [B x C], `candidates` is [B x 1]; returns probabilities [B x 1].
    nn::Tensor forward(const nn::Tensor& conditions, const nn::Tensor& candidates) const;
    double score(std::span<const double> condition, double candidate) const;

    /// `candidates` is a [B x 1] tape value, so gradients can reach the generator.
    nn::Var forward(nn::Tape& tape, const nn::Tensor& conditions, nn::Var candidates, nn::Binding binding);

    std::vector<NamedTensor> named_parameters();
    std::vector<NamedConstTensor> named_parameters() const;
    std::vector<nn::Tensor*> parameters();

private:
    nn::RecurrentCell rnn_;
    nn::DenseLayer output_;
    std::size_t condition_len_ = 0;
};

}  // namespace forgan::model
