#pragma once

#include <cstddef>

#include "forgan/data/dataset.hpp"
#include "forgan/random.hpp"

namespace forgan::data {

/// Every window is the same 10-step template plus small noise; the next value is 1 with
/// probability `p_one` and 0 otherwise. A mean regressor converges to `p_one`.
struct ToyBimodalParams {
    std::size_t steps = 10;
    double p_one = 0.8;
    double noise_std = 0.05;
};

WindowedDataset build_toy_bimodal(std::size_t n, Rng& rng, const ToyBimodalParams& p = {});

}  // namespace forgan::data
