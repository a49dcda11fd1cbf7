#include "forgan/model/hyper_params.hpp"

#include <algorithm>
#include <array>

#include "forgan/error.hpp"

namespace forgan::model {
namespace {

constexpr std::array<std::size_t, 9> kWidths{1, 2, 4, 8, 16, 32, 64, 128, 256};
constexpr std::array<std::size_t, 6> kNoise{1, 2, 4, 8, 16, 32};
constexpr std::array<std::size_t, 7> kDIters{1, 2, 3, 4, 5, 6, 7};
constexpr std::array<nn::CellKind, 2> kCells{nn::CellKind::gru, nn::CellKind::lstm};

bool contains(std::span<const std::size_t> d, std::size_t v) {
    return std::find(d.begin(), d.end(), v) != d.end();
}

}  // namespace

std::span<const std::size_t> width_domain() { return kWidths; }
std::span<const std::size_t> noise_domain() { return kNoise; }
std::span<const std::size_t> d_iter_domain() { return kDIters; }
std::span<const nn::CellKind> cell_domain() { return kCells; }

void HyperParams::validate() const {
    auto fail = [](const char* field, std::size_t v) {
        throw ContractError(std::string("hyperparameter ") + field + " = " + std::to_string(v) +
                            " is outside its allowed values");
    };
    if (!contains(kWidths, gen_hidden)) fail("RG (gen_hidden)", gen_hidden);
    if (!contains(kWidths, dis_hidden)) fail("RD (dis_hidden)", dis_hidden);
    if (!contains(kNoise, noise_dim)) fail("N (noise_dim)", noise_dim);
    // The tuned Lorenz setting uses C = 24, so any window up to the largest C is accepted;
    // the search itself only proposes values from width_domain().
    if (condition_len < 1 || condition_len > kWidths.back()) fail("C (condition_len)", condition_len);
    if (!contains(kDIters, d_iters)) fail("D_Iter (d_iters)", d_iters);
}

bool HyperParams::valid() const noexcept {
    return contains(kWidths, gen_hidden) && contains(kWidths, dis_hidden) && contains(kNoise, noise_dim) &&
           condition_len >= 1 && condition_len <= kWidths.back() && contains(kDIters, d_iters);
}

std::string HyperParams::describe() const {
    return std::string("T=") + std::string(nn::to_string(cell)) + " RG=" + std::to_string(gen_hidden) +
           " RD=" + std::to_string(dis_hidden) + " N=" + std::to_string(noise_dim) + " C=" +
           std::to_string(condition_len) + " D_Iter=" + std::to_string(d_iters);
}

HyperParams HyperParams::lorenz() {
    return {nn::CellKind::gru, 8, 64, 32, 24, 2};
}

HyperParams HyperParams::mackey_glass() {
    return {nn::CellKind::lstm, 64, 256, 4, 32, 6};
}

HyperParams HyperParams::internet_traffic() {
    return {nn::CellKind::gru, 8, 128, 16, 32, 3};
}

}  // namespace forgan::model
