#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "forgan/nn/recurrent.hpp"

namespace forgan::model {

/// The six tunables of a ForGAN model (one GA "gene").
struct HyperParams {
    nn::CellKind cell = nn::CellKind::gru;
    std::size_t gen_hidden = 8;      // RG: generator RNN width
    std::size_t dis_hidden = 64;     // RD: discriminator RNN width
    std::size_t noise_dim = 32;      // N
    std::size_t condition_len = 24;  // C: look-back window
    std::size_t d_iters = 2;         // discriminator updates per generator update

    /// Throws ContractError naming the first field outside its domain. C may be any
    /// length in 1..256 (the tuned Lorenz window is 24); search draws only powers of two.
    void validate() const;
    bool valid() const noexcept;
    std::string describe() const;

    friend bool operator==(const HyperParams&, const HyperParams&) = default;

    /// Tuned settings of the three reference experiments.
    static HyperParams lorenz();
    static HyperParams mackey_glass();
    static HyperParams internet_traffic();
};

// Allowed values per field.
std::span<const std::size_t> width_domain();      // RG, RD, C: 1, 2, 4, ..., 256
std::span<const std::size_t> noise_domain();      // N: 1, 2, 4, ..., 32
std::span<const std::size_t> d_iter_domain();     // 1..7
std::span<const nn::CellKind> cell_domain();      // GRU, LSTM

}  // namespace forgan::model
