#include "forgan/nn/recurrent.hpp"

#include <memory>
#include <string>

#include <Eigen/Core>

#include "forgan/error.hpp"

namespace forgan::nn {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

ConstMatrixMap map(const Tensor& t, std::size_t rows, std::size_t cols) {
    return {t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

RowMatrix sigmoid(const RowMatrix& m) {
    return (1.0 / (1.0 + (-m.array()).exp())).matrix();
}

constexpr std::size_t kForgetGate = 1;

}  // namespace

std::string_view to_string(CellKind kind) {
    return kind == CellKind::gru ? "GRU" : "LSTM";
}

CellKind parse_cell_kind(std::string_view name) {
    if (name == "GRU" || name == "gru") return CellKind::gru;
    if (name == "LSTM" || name == "lstm") return CellKind::lstm;
    throw ContractError("unknown cell type '" + std::string(name) + "' (expected GRU or LSTM)");
}

RecurrentCell::RecurrentCell(CellKind kind, std::size_t input_width, std::size_t hidden_width)
    : kind_(kind), input_width_(input_width), hidden_width_(hidden_width) {
    if (input_width == 0 || hidden_width == 0) throw ContractError("recurrent cell widths must be positive");
    const std::size_t n = kind == CellKind::gru ? 3 : 4;
    gates_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        gates_.push_back({Tensor({hidden_width, input_width}), Tensor({hidden_width, hidden_width}),
                          Tensor({hidden_width})});
    }
}

void RecurrentCell::initialize(Rng& rng) {
    for (auto& g : gates_) {
        glorot_uniform(g.input_weights, input_width_, hidden_width_, rng);
        glorot_uniform(g.hidden_weights, hidden_width_, hidden_width_, rng);
        g.bias.fill(0.0);
    }
    if (kind_ == CellKind::lstm) gates_[kForgetGate].bias.fill(1.0);
}

std::vector<Tensor*> RecurrentCell::parameters() {
    std::vector<Tensor*> out;
    for (auto& g : gates_) {
        out.push_back(&g.input_weights);
        out.push_back(&g.hidden_weights);
        out.push_back(&g.bias);
    }
    return out;
}

std::vector<const Tensor*> RecurrentCell::parameters() const {
    std::vector<const Tensor*> out;
    for (const auto& g : gates_) {
        out.push_back(&g.input_weights);
        out.push_back(&g.hidden_weights);
        out.push_back(&g.bias);
    }
    return out;
}

Tensor RecurrentCell::forward(const Tensor& sequence, const Tensor& h0) const {
    std::size_t batch = 1;
    std::size_t steps = 0;
    if (sequence.rank() == 2) {
        steps = sequence.shape()[0];
    } else if (sequence.rank() == 3) {
        batch = sequence.shape()[0];
        steps = sequence.shape()[1];
    } else {
        throw ContractError("rnn_forward: sequence must be [T x in] or [B x T x in], got " +
                            to_string(sequence.shape()));
    }
    if (sequence.shape().back() != input_width_) {
        throw ContractError("rnn_forward: step width " + std::to_string(sequence.shape().back()) +
                            " does not match cell input width " + std::to_string(input_width_));
    }
    if (steps == 0) throw ContractError("rnn_forward: a condition window needs at least one step");
    if (h0.size() != batch * hidden_width_) {
        throw ContractError("rnn_forward: initial state " + to_string(h0.shape()) + " does not hold " +
                            std::to_string(batch) + " states of width " + std::to_string(hidden_width_));
    }

    const auto B = static_cast<Eigen::Index>(batch);
    const auto H = static_cast<Eigen::Index>(hidden_width_);
    const auto I = static_cast<Eigen::Index>(input_width_);

    auto pre = [&](const GateBlock& g, const RowMatrix& x, const RowMatrix& h) {
        RowMatrix z = x * map(g.input_weights, hidden_width_, input_width_).transpose();
        z.noalias() += h * map(g.hidden_weights, hidden_width_, hidden_width_).transpose();
        z.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(g.bias.data(), H);
        return z;
    };

    RowMatrix h = map(h0, batch, hidden_width_);
    RowMatrix c = RowMatrix::Zero(B, H);
    RowMatrix x(B, I);
    for (std::size_t t = 0; t < steps; ++t) {
        for (Eigen::Index b = 0; b < B; ++b) {
            const double* row = sequence.data() + (static_cast<std::size_t>(b) * steps + t) * input_width_;
            for (Eigen::Index k = 0; k < I; ++k) x(b, k) = row[k];
        }
        if (kind_ == CellKind::gru) {
            RowMatrix z = sigmoid(pre(gates_[0], x, h));
            RowMatrix r = sigmoid(pre(gates_[1], x, h));
            RowMatrix rh = (r.array() * h.array()).matrix();
            RowMatrix cand = pre(gates_[2], x, rh).array().tanh().matrix();
            h = ((1.0 - z.array()) * h.array() + z.array() * cand.array()).matrix();
        } else {
            RowMatrix i = sigmoid(pre(gates_[0], x, h));
            RowMatrix f = sigmoid(pre(gates_[1], x, h));
            RowMatrix g = pre(gates_[2], x, h).array().tanh().matrix();
            RowMatrix o = sigmoid(pre(gates_[3], x, h));
            c = (f.array() * c.array() + i.array() * g.array()).matrix();
            h = (o.array() * c.array().tanh()).matrix();
        }
    }

    Tensor out({batch, hidden_width_});
    Eigen::Map<RowMatrix>(out.data(), B, H) = h;
    return out;
}

Var RecurrentCell::forward(Tape& tape, std::span<const Var> steps, Var h0, Binding binding) {
    if (steps.empty()) throw ContractError("rnn_forward: a condition window needs at least one step");
    if (h0.cols() != hidden_width_) {
        throw ContractError("rnn_forward: initial state width " + std::to_string(h0.cols()) +
                            " does not match hidden width " + std::to_string(hidden_width_));
    }
    for (const Var& x : steps) {
        if (x.cols() != input_width_ || x.rows() != h0.rows()) {
            throw ContractError("rnn_forward: step " + to_string(x.value().shape()) + " does not match [" +
                                std::to_string(h0.rows()) + " x " + std::to_string(input_width_) + "]");
        }
    }

    const std::size_t T = steps.size();
    const std::size_t G = gates_.size();
    const auto B = static_cast<Eigen::Index>(h0.rows());
    const auto H = static_cast<Eigen::Index>(hidden_width_);
    const auto I = static_cast<Eigen::Index>(input_width_);
    const bool gru = kind_ == CellKind::gru;

    // Leaves per gate: input weights, hidden weights, bias.
    std::vector<Var> params;
    for (auto& g : gates_) {
        for (Tensor* t : {&g.input_weights, &g.hidden_weights, &g.bias}) {
            params.push_back(binding == Binding::trainable ? tape.parameter(*t) : tape.frozen(*t));
        }
    }
    auto W = [&](std::size_t g) { return map(gates_[g].input_weights, hidden_width_, input_width_); };
    auto U = [&](std::size_t g) { return map(gates_[g].hidden_weights, hidden_width_, hidden_width_); };
    auto bias = [&](std::size_t g) { return Eigen::Map<const Eigen::RowVectorXd>(gates_[g].bias.data(), H); };

    // Forward pass, keeping what BPTT needs: states, cell states, gate activations, r * h.
    struct Cache {
        std::vector<RowMatrix> h;
        std::vector<RowMatrix> c;
        std::vector<std::vector<RowMatrix>> act;
        std::vector<RowMatrix> rh;
    };
    auto cache = std::make_shared<Cache>();
    cache->h.reserve(T + 1);
    cache->h.push_back(map(h0.value(), h0.rows(), hidden_width_));
    if (!gru) cache->c.push_back(RowMatrix::Zero(B, H));
    cache->act.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        const auto x = map(steps[t].value(), h0.rows(), input_width_);
        const RowMatrix& hp = cache->h.back();
        auto& a = cache->act[t];
        a.resize(G);
        auto pre = [&](std::size_t g, const RowMatrix& h) {
            RowMatrix z(B, H);
            z.noalias() = x * W(g).transpose();
            z.noalias() += h * U(g).transpose();
            z.rowwise() += bias(g);
            return z;
        };
        if (gru) {
            a[0] = sigmoid(pre(0, hp));
            a[1] = sigmoid(pre(1, hp));
            cache->rh.push_back((a[1].array() * hp.array()).matrix());
            a[2] = pre(2, cache->rh.back()).array().tanh().matrix();
            cache->h.push_back(((1.0 - a[0].array()) * hp.array() + a[0].array() * a[2].array()).matrix());
        } else {
            a[0] = sigmoid(pre(0, hp));
            a[1] = sigmoid(pre(1, hp));
            a[2] = pre(2, hp).array().tanh().matrix();
            a[3] = sigmoid(pre(3, hp));
            cache->c.push_back((a[1].array() * cache->c.back().array() + a[0].array() * a[2].array()).matrix());
            cache->h.push_back((a[3].array() * cache->c.back().array().tanh()).matrix());
        }
    }

    Tensor out({h0.rows(), hidden_width_});
    Eigen::Map<RowMatrix>(out.data(), B, H) = cache->h.back();

    std::vector<Var> inputs(steps.begin(), steps.end());
    inputs.push_back(h0);
    inputs.insert(inputs.end(), params.begin(), params.end());
    std::vector<Var> xs(steps.begin(), steps.end());

    return tape.custom(std::move(out), inputs, [cache, xs, h0, params, gru, G, B, H, I](Tape& t, std::span<const double> dy) {
        auto weight = [&](std::size_t g, std::size_t k, Eigen::Index rows, Eigen::Index cols) {
            return ConstMatrixMap(t.value(params[3 * g + k]).data(), rows, cols);
        };
        std::vector<bool> train(G);
        std::vector<RowMatrix> dW(G), dU(G);
        std::vector<Eigen::RowVectorXd> db(G);
        for (std::size_t g = 0; g < G; ++g) {
            train[g] = t.requires_grad(params[3 * g]);
            if (train[g]) {
                dW[g] = RowMatrix::Zero(H, I);
                dU[g] = RowMatrix::Zero(H, H);
                db[g] = Eigen::RowVectorXd::Zero(H);
            }
        }

        RowMatrix dh = ConstMatrixMap(dy.data(), B, H);
        RowMatrix dc;
        if (!gru) dc = RowMatrix::Zero(B, H);
        std::vector<RowMatrix> da(G);
        for (std::size_t step = xs.size(); step-- > 0;) {
            const auto& a = cache->act[step];
            const RowMatrix& hp = cache->h[step];
            RowMatrix dhp;
            if (gru) {
                const auto z = a[0].array();
                const auto r = a[1].array();
                const auto n = a[2].array();
                da[2] = (dh.array() * z * (1.0 - n.square())).matrix();
                const RowMatrix drh = da[2] * weight(2, 1, H, H);
                da[0] = (dh.array() * (n - hp.array()) * z * (1.0 - z)).matrix();
                da[1] = (drh.array() * hp.array() * r * (1.0 - r)).matrix();
                dhp = (dh.array() * (1.0 - z) + drh.array() * r).matrix();
                dhp.noalias() += da[0] * weight(0, 1, H, H);
                dhp.noalias() += da[1] * weight(1, 1, H, H);
            } else {
                const auto i = a[0].array();
                const auto f = a[1].array();
                const auto g = a[2].array();
                const auto o = a[3].array();
                const auto tc = cache->c[step + 1].array().tanh();
                const Eigen::ArrayXXd dcn = dc.array() + dh.array() * o * (1.0 - tc.square());
                da[0] = (dcn * g * i * (1.0 - i)).matrix();
                da[1] = (dcn * cache->c[step].array() * f * (1.0 - f)).matrix();
                da[2] = (dcn * i * (1.0 - g.square())).matrix();
                da[3] = (dh.array() * tc * o * (1.0 - o)).matrix();
                dc = (dcn * f).matrix();
                dhp = RowMatrix::Zero(B, H);
                for (std::size_t k = 0; k < G; ++k) dhp.noalias() += da[k] * weight(k, 1, H, H);
            }

            const auto x = ConstMatrixMap(t.value(xs[step]).data(), B, I);
            for (std::size_t k = 0; k < G; ++k) {
                if (!train[k]) continue;
                dW[k].noalias() += da[k].transpose() * x;
                const RowMatrix& h_in = (gru && k == 2) ? cache->rh[step] : hp;
                dU[k].noalias() += da[k].transpose() * h_in;
                db[k] += da[k].colwise().sum();
            }
            if (t.requires_grad(xs[step])) {
                Eigen::Map<RowMatrix> dx(t.accumulate(xs[step]).data(), B, I);
                for (std::size_t k = 0; k < G; ++k) dx.noalias() += da[k] * weight(k, 0, H, I);
            }
            dh = std::move(dhp);
        }
        if (t.requires_grad(h0)) Eigen::Map<RowMatrix>(t.accumulate(h0).data(), B, H) += dh;
        for (std::size_t k = 0; k < G; ++k) {
            if (!train[k]) continue;
            Eigen::Map<RowMatrix>(t.accumulate(params[3 * k]).data(), H, I) += dW[k];
            Eigen::Map<RowMatrix>(t.accumulate(params[3 * k + 1]).data(), H, H) += dU[k];
            Eigen::Map<Eigen::RowVectorXd>(t.accumulate(params[3 * k + 2]).data(), H) += db[k];
        }
    });
}

}  // namespace forgan::nn
