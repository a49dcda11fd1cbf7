#include "forgan/nn/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "forgan/error.hpp"

namespace forgan::nn {

std::size_t element_count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

std::string to_string(const Shape& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += " x ";
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(element_count(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
    if (values_.size() != element_count(shape_)) {
        throw ContractError("tensor of shape " + to_string(shape_) + " needs " +
                            std::to_string(element_count(shape_)) + " values, got " +
                            std::to_string(values_.size()));
    }
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values) {
    return Tensor({rows, cols}, std::vector<double>(values));
}

Tensor Tensor::vector(std::initializer_list<double> values) {
    return Tensor({values.size()}, std::vector<double>(values));
}

std::size_t Tensor::rows() const noexcept {
    return shape_.size() == 2 ? shape_[0] : 1;
}

std::size_t Tensor::cols() const noexcept {
    if (shape_.empty()) return 1;
    return shape_.back();
}

void Tensor::ensure_grad() {
    if (!has_grad()) {
        grad_.assign(values_.size(), 0.0);
        has_grad_ = true;
    }
}

void Tensor::zero_grad() {
    ensure_grad();
    std::fill(grad_.begin(), grad_.end(), 0.0);
}

void Tensor::clear_grad() noexcept {
    grad_.clear();
    has_grad_ = false;
}

std::span<double> Tensor::grad() {
    if (!has_grad()) throw ContractError("tensor has no gradient buffer");
    return grad_;
}

std::span<const double> Tensor::grad() const {
    if (!has_grad()) throw ContractError("tensor has no gradient buffer");
    return grad_;
}

void Tensor::fill(double v) {
    std::fill(values_.begin(), values_.end(), v);
}

Tensor Tensor::reshaped(Shape shape) const {
    if (element_count(shape) != values_.size()) {
        throw ContractError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
    }
    Tensor out;
    out.shape_ = std::move(shape);
    out.values_ = values_;
    return out;
}

}  // namespace forgan::nn
