#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "forgan/nn/aligned.hpp"

namespace forgan::nn {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

/// Dense row-major array of doubles with an optional gradient buffer of the same shape.
///
/// Network code treats rank-2 tensors as [rows x cols] matrices (batch rows) and rank-1
/// tensors as a single row. The gradient slot is absent until `ensure_grad()` is called.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> values);

    static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
        return Tensor({rows, cols}, fill);
    }
    static Tensor matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values);
    static Tensor vector(std::initializer_list<double> values);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    /// Leading extent for rank 2 (1 for rank 0/1).
    std::size_t rows() const noexcept;
    /// Trailing extent for rank 1/2.
    std::size_t cols() const noexcept;

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

    bool has_grad() const noexcept { return grad_.size() == values_.size() && has_grad_; }
    void ensure_grad();
    void zero_grad();
    void clear_grad() noexcept;
    std::span<double> grad();
    std::span<const double> grad() const;

    void fill(double v);
    Tensor reshaped(Shape shape) const;

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.values_ == b.values_;
    }

private:
    Shape shape_;
    AlignedVector values_;
    AlignedVector grad_;
    bool has_grad_ = false;
};

}  // namespace forgan::nn
