#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "forgan/nn/dense.hpp"
#include "forgan/nn/tape.hpp"
#include "forgan/nn/tensor.hpp"
#include "forgan/random.hpp"

namespace forgan::nn {

enum class CellKind { gru, lstm };

std::string_view to_string(CellKind kind);
CellKind parse_cell_kind(std::string_view name);

/// Parameters of one gate: pre-activation = x W_x^T + h W_h^T + b.
struct GateBlock {
    Tensor input_weights;   // [hidden x input]
    Tensor hidden_weights;  // [hidden x hidden]
    Tensor bias;            // [hidden]
};

/// Single-layer GRU or LSTM.
///
/// GRU gates are (update z, reset r, candidate):
///   h_t = (1 - z) * h_{t-1} + z * tanh(W x + U (r * h_{t-1}) + b)
/// LSTM gates are (input, forget, cell, output) with c_0 = 0:
///   c_t = f * c_{t-1} + i * g,  h_t = o * tanh(c_t)
class RecurrentCell {
public:
    RecurrentCell() = default;
    RecurrentCell(CellKind kind, std::size_t input_width, std::size_t hidden_width);

    CellKind kind() const noexcept { return kind_; }
    std::size_t input_width() const noexcept { return input_width_; }
    std::size_t hidden_width() const noexcept { return hidden_width_; }
    std::size_t gate_count() const noexcept { return gates_.size(); }

    GateBlock& gate(std::size_t i) { return gates_.at(i); }
    const GateBlock& gate(std::size_t i) const { return gates_.at(i); }

    /// Glorot-uniform weights, zero biases, forget-gate bias 1 for LSTM.
    void initialize(Rng& rng);

    /// `sequence` is [T x in] (one sequence) or [B x T x in]; `h0` is [H] or [B x H].
    /// Returns the final hidden state [B x H].
    Tensor forward(const Tensor& sequence, const Tensor& h0) const;

    /// Same recurrence on a tape; `steps[t]` is [B x in]. Every intermediate state stays on
    /// the tape for backpropagation through time.
    Var forward(Tape& tape, std::span<const Var> steps, Var h0, Binding binding);

    std::vector<Tensor*> parameters();
    std::vector<const Tensor*> parameters() const;

private:
    CellKind kind_ = CellKind::gru;
    std::size_t input_width_ = 0;
    std::size_t hidden_width_ = 0;
    std::vector<GateBlock> gates_;
};

}  // namespace forgan::nn
