#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "forgan/nn/tensor.hpp"

namespace forgan::nn {

struct AdamOptions {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adaptive-moment optimizer over a fixed set of parameter tensors.
///
/// The tensors are referenced, not owned; they must outlive the optimizer and keep their
/// shapes. Moment buffers mirror the parameter shapes.
class Adam {
public:
    Adam() = default;
    Adam(std::vector<Tensor*> params, AdamOptions options = {});

    /// Applies one bias-corrected update from the current grad slots.
    /// Throws ContractError when a parameter has no gradient buffer.
    void step();
    void zero_grad();

    std::uint64_t steps() const noexcept { return step_; }
    const AdamOptions& options() const noexcept { return options_; }
    std::size_t parameter_count() const noexcept { return params_.size(); }
    const std::vector<double>& first_moment(std::size_t i) const { return m_.at(i); }
    const std::vector<double>& second_moment(std::size_t i) const { return v_.at(i); }

private:
    std::vector<Tensor*> params_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    AdamOptions options_;
    std::uint64_t step_ = 0;
};

}  // namespace forgan::nn
