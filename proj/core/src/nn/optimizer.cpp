#include "forgan/nn/optimizer.hpp"

#include <cmath>
#include <string>

#include "forgan/error.hpp"

namespace forgan::nn {

Adam::Adam(std::vector<Tensor*> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Tensor* p : params_) {
        if (!p) throw ContractError("Adam: null parameter");
        m_.emplace_back(p->size(), 0.0);
        v_.emplace_back(p->size(), 0.0);
    }
}

void Adam::step() {
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (!params_[i]->has_grad()) {
            throw ContractError("optimizer_step: parameter " + std::to_string(i) + " has no gradient");
        }
        if (params_[i]->size() != m_[i].size()) {
            throw ContractError("optimizer_step: parameter " + std::to_string(i) + " changed shape");
        }
    }
    ++step_;
    const double t = static_cast<double>(step_);
    const double c1 = 1.0 - std::pow(options_.beta1, t);
    const double c2 = 1.0 - std::pow(options_.beta2, t);
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto w = params_[i]->values();
        auto g = params_[i]->grad();
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t k = 0; k < w.size(); ++k) {
            m[k] = options_.beta1 * m[k] + (1.0 - options_.beta1) * g[k];
            v[k] = options_.beta2 * v[k] + (1.0 - options_.beta2) * g[k] * g[k];
            const double m_hat = m[k] / c1;
            const double v_hat = v[k] / c2;
            w[k] -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
        }
    }
}

void Adam::zero_grad() {
    for (Tensor* p : params_) p->zero_grad();
}

}  // namespace forgan::nn
