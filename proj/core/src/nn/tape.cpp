#include "forgan/nn/tape.hpp"

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "forgan/error.hpp"

namespace forgan::nn {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using ArrayMap = Eigen::Map<Eigen::ArrayXd>;
using ConstArrayMap = Eigen::Map<const Eigen::ArrayXd>;

ConstMatrixMap as_matrix(const Tensor& t) {
    return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}

ConstArrayMap as_array(const Tensor& t) {
    return {t.data(), static_cast<Eigen::Index>(t.size())};
}

MatrixMap as_matrix(AlignedVector& g, const Tensor& like) {
    return {g.data(), static_cast<Eigen::Index>(like.rows()), static_cast<Eigen::Index>(like.cols())};
}

ArrayMap as_array(AlignedVector& g) {
    return {g.data(), static_cast<Eigen::Index>(g.size())};
}

Shape matrix_shape(std::size_t rows, std::size_t cols) {
    return {rows, cols};
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ContractError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                            to_string(b.shape()));
    }
}

}  // namespace

const Tensor& Var::value() const {
    if (!tape_) throw ContractError("unbound Var");
    return tape_->value(*this);
}

void Tape::check(Var v) const {
    if (v.tape() != this || v.id() >= nodes_.size()) {
        throw ContractError("Var does not belong to this tape");
    }
}

Var Tape::push(Tensor value, bool requires_grad, std::function<void(Tape&)> backward) {
    Node& n = nodes_.emplace_back();
    n.owned = std::move(value);
    n.requires_grad = requires_grad;
    if (requires_grad) n.backward = std::move(backward);
    return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
    return push(std::move(value), false, {});
}

Var Tape::frozen(const Tensor& param) {
    Node& n = nodes_.emplace_back();
    n.ref = &param;
    return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Tensor& param) {
    Node& n = nodes_.emplace_back();
    n.ref = &param;
    n.param = &param;
    n.requires_grad = true;
    return Var(this, nodes_.size() - 1);
}

Var Tape::custom(Tensor value, std::span<const Var> inputs, CustomBackward backward) {
    bool rg = false;
    for (Var v : inputs) {
        check(v);
        rg = rg || requires_grad(v);
    }
    Var self(this, nodes_.size());
    return push(std::move(value), rg, [self, fn = std::move(backward)](Tape& t) { fn(t, t.node(self).grad); });
}

std::span<double> Tape::accumulate(Var v) {
    check(v);
    return grad_buffer(v);
}

const Tensor& Tape::value(Var v) const {
    check(v);
    return node(v).value();
}

std::vector<double> Tape::grad(Var v) const {
    check(v);
    const Node& n = node(v);
    if (n.grad.empty()) return std::vector<double>(n.value().size(), 0.0);
    return {n.grad.begin(), n.grad.end()};
}

bool Tape::requires_grad(Var v) const {
    check(v);
    return node(v).requires_grad;
}

AlignedVector& Tape::grad_buffer(Var v) {
    Node& n = node(v);
    if (n.grad.empty()) n.grad.assign(n.value().size(), 0.0);
    return n.grad;
}

void Tape::backward(Var loss) {
    check(loss);
    if (value(loss).size() != 1) {
        throw ContractError("backward needs a scalar loss, got shape " + to_string(value(loss).shape()));
    }
    for (auto& n : nodes_) n.grad.clear();
    if (!node(loss).requires_grad) return;
    grad_buffer(loss)[0] = 1.0;

    for (std::size_t i = loss.id() + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.requires_grad || n.grad.empty()) continue;
        if (n.param) {
            n.param->ensure_grad();
            auto g = n.param->grad();
            for (std::size_t k = 0; k < g.size(); ++k) g[k] += n.grad[k];
        } else if (n.backward) {
            n.backward(*this);
        }
    }
}

Var Tape::linear(Var x, Var w) {
    check(x);
    check(w);
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    if (xv.cols() != wv.cols()) {
        throw ContractError("linear: input width " + std::to_string(xv.cols()) +
                            " does not match weight columns " + std::to_string(wv.cols()));
    }
    Tensor out(matrix_shape(xv.rows(), wv.rows()));
    MatrixMap(out.data(), out.rows(), out.cols()).noalias() = as_matrix(xv) * as_matrix(wv).transpose();

    const bool rg = requires_grad(x) || requires_grad(w);
    Var self(this, nodes_.size());
    return push(std::move(out), rg, [x, w, self](Tape& t) {
        const Tensor& xv = t.value(x);
        const Tensor& wv = t.value(w);
        const Tensor& yv = t.value(self);
        auto dy = as_matrix(t.node(self).grad, yv);
        if (t.requires_grad(x)) as_matrix(t.grad_buffer(x), xv).noalias() += dy * as_matrix(wv);
        if (t.requires_grad(w)) as_matrix(t.grad_buffer(w), wv).noalias() += dy.transpose() * as_matrix(xv);
    });
}

Var Tape::add_bias(Var x, Var b) {
    check(x);
    check(b);
    const Tensor& xv = value(x);
    const Tensor& bv = value(b);
    if (bv.size() != xv.cols()) {
        throw ContractError("add_bias: bias length " + std::to_string(bv.size()) + " vs width " +
                            std::to_string(xv.cols()));
    }
    Tensor out = xv.reshaped(matrix_shape(xv.rows(), xv.cols()));
    Eigen::Map<const Eigen::RowVectorXd> bias(bv.data(), static_cast<Eigen::Index>(bv.size()));
    MatrixMap(out.data(), out.rows(), out.cols()).rowwise() += bias;

    const bool rg = requires_grad(x) || requires_grad(b);
    Var self(this, nodes_.size());
    return push(std::move(out), rg, [x, b, self](Tape& t) {
        auto& dy = t.node(self).grad;
        if (t.requires_grad(x)) as_array(t.grad_buffer(x)) += as_array(dy);
        if (t.requires_grad(b)) {
            const Tensor& yv = t.value(self);
            auto& db = t.grad_buffer(b);
            Eigen::Map<Eigen::RowVectorXd>(db.data(), static_cast<Eigen::Index>(db.size())) +=
                as_matrix(dy, yv).colwise().sum();
        }
    });
}

Var Tape::add(Var a, Var b) {
    check(a);
    check(b);
    require_same_shape(value(a), value(b), "add");
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = as_array(value(a)) + as_array(value(b));
    const bool rg = requires_grad(a) || requires_grad(b);
    Var self(this, nodes_.size());
    return push(std::move(out), rg, [a, b, self](Tape& t) {
        auto& dy = t.node(self).grad;
        if (t.requires_grad(a)) as_array(t.grad_buffer(a)) += as_array(dy);
        if (t.requires_grad(b)) as_array(t.grad_buffer(b)) += as_array(dy);
    });
}

Var Tape::sub(Var a, Var b) {
    check(a);
    check(b);
    require_same_shape(value(a), value(b), "sub");
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = as_array(value(a)) - as_array(value(b));
    const bool rg = requires_grad(a) || requires_grad(b);
    Var self(this, nodes_.size());
    return push(std::move(out), rg, [a, b, self](Tape& t) {
        auto& dy = t.node(self).grad;
        if (t.requires_grad(a)) as_array(t.grad_buffer(a)) += as_array(dy);
        if (t.requires_grad(b)) as_array(t.grad_buffer(b)) -= as_array(dy);
    });
}

Var Tape::mul(Var a, Var b) {
    check(a);
    check(b);
    require_same_shape(value(a), value(b), "mul");
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = as_array(value(a)) * as_array(value(b));
    const bool rg = requires_grad(a) || requires_grad(b);
    Var self(this, nodes_.size());
    return push(std::move(out), rg, [a, b, self](Tape& t) {
        auto dy = as_array(t.node(self).grad);
        if (t.requires_grad(a)) as_array(t.grad_buffer(a)) += dy * as_array(t.value(b));
        if (t.requires_grad(b)) as_array(t.grad_buffer(b)) += dy * as_array(t.value(a));
    });
}

Var Tape::scale(Var a, double k) {
    check(a);
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = k * as_array(value(a));
    Var self(this, nodes_.size());
    return push(std::move(out), requires_grad(a), [a, k, self](Tape& t) {
        as_array(t.grad_buffer(a)) += k * as_array(t.node(self).grad);
    });
}

Var Tape::one_minus(Var a) {
    check(a);
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = 1.0 - as_array(value(a));
    Var self(this, nodes_.size());
    return push(std::move(out), requires_grad(a), [a, self](Tape& t) {
        as_array(t.grad_buffer(a)) -= as_array(t.node(self).grad);
    });
}

Var Tape::sigmoid(Var a) {
    check(a);
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = 1.0 / (1.0 + (-as_array(value(a))).exp());
    Var self(this, nodes_.size());
    return push(std::move(out), requires_grad(a), [a, self](Tape& t) {
        auto y = as_array(t.value(self));
        as_array(t.grad_buffer(a)) += as_array(t.node(self).grad) * y * (1.0 - y);
    });
}

Var Tape::tanh(Var a) {
    check(a);
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = as_array(value(a)).tanh();
    Var self(this, nodes_.size());
    return push(std::move(out), requires_grad(a), [a, self](Tape& t) {
        auto y = as_array(t.value(self));
        as_array(t.grad_buffer(a)) += as_array(t.node(self).grad) * (1.0 - y.square());
    });
}

Var Tape::relu(Var a) {
    check(a);
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = as_array(value(a)).max(0.0);
    Var self(this, nodes_.size());
    return push(std::move(out), requires_grad(a), [a, self](Tape& t) {
        auto x = as_array(t.value(a));
        as_array(t.grad_buffer(a)) += (x > 0.0).select(as_array(t.node(self).grad), 0.0);
    });
}

Var Tape::square(Var a) {
    check(a);
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = as_array(value(a)).square();
    Var self(this, nodes_.size());
    return push(std::move(out), requires_grad(a), [a, self](Tape& t) {
        as_array(t.grad_buffer(a)) += 2.0 * as_array(t.value(a)) * as_array(t.node(self).grad);
    });
}

Var Tape::sqrt(Var a) {
    check(a);
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = as_array(value(a)).sqrt();
    Var self(this, nodes_.size());
    return push(std::move(out), requires_grad(a), [a, self](Tape& t) {
        auto y = as_array(t.value(self));
        as_array(t.grad_buffer(a)) += (y > 0.0).select(as_array(t.node(self).grad) / (2.0 * y), 0.0);
    });
}

Var Tape::log(Var a, double eps) {
    check(a);
    Tensor out(matrix_shape(value(a).rows(), value(a).cols()));
    ArrayMap(out.data(), out.size()) = (as_array(value(a)) + eps).log();
    Var self(this, nodes_.size());
    return push(std::move(out), requires_grad(a), [a, eps, self](Tape& t) {
        as_array(t.grad_buffer(a)) += as_array(t.node(self).grad) / (as_array(t.value(a)) + eps);
    });
}

Var Tape::concat_cols(Var a, Var b) {
    check(a);
    check(b);
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (av.rows() != bv.rows()) {
        throw ContractError("concat_cols: row counts differ (" + std::to_string(av.rows()) + " vs " +
                            std::to_string(bv.rows()) + ")");
    }
    const auto rows = static_cast<Eigen::Index>(av.rows());
    const auto na = static_cast<Eigen::Index>(av.cols());
    const auto nb = static_cast<Eigen::Index>(bv.cols());
    Tensor out(matrix_shape(av.rows(), av.cols() + bv.cols()));
    MatrixMap m(out.data(), rows, na + nb);
    m.leftCols(na) = as_matrix(av);
    m.rightCols(nb) = as_matrix(bv);

    const bool rg = requires_grad(a) || requires_grad(b);
    Var self(this, nodes_.size());
    return push(std::move(out), rg, [a, b, self, na, nb](Tape& t) {
        auto dy = as_matrix(t.node(self).grad, t.value(self));
        if (t.requires_grad(a)) as_matrix(t.grad_buffer(a), t.value(a)) += dy.leftCols(na);
        if (t.requires_grad(b)) as_matrix(t.grad_buffer(b), t.value(b)) += dy.rightCols(nb);
    });
}

Var Tape::mean(Var a) {
    check(a);
    const Tensor& av = value(a);
    if (av.empty()) throw ContractError("mean of an empty value");
    Tensor out(matrix_shape(1, 1), as_array(av).mean());
    Var self(this, nodes_.size());
    return push(std::move(out), requires_grad(a), [a, self](Tape& t) {
        auto& ga = t.grad_buffer(a);
        const double g = t.node(self).grad[0] / static_cast<double>(ga.size());
        as_array(ga) += g;
    });
}

Var operator+(Var a, Var b) { return a.tape()->add(a, b); }
Var operator-(Var a, Var b) { return a.tape()->sub(a, b); }
Var operator*(Var a, Var b) { return a.tape()->mul(a, b); }
Var operator*(double k, Var a) { return a.tape()->scale(a, k); }

}  // namespace forgan::nn
