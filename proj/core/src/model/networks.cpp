#include "forgan/model/networks.hpp"

#include <string>

#include "forgan/error.hpp"

namespace forgan::model {
namespace {

using nn::Tensor;
using nn::Var;

void check_conditions(const Tensor& conditions, std::size_t c, const char* who) {
    if (conditions.rank() != 2 || conditions.cols() != c || conditions.rows() == 0) {
        throw ContractError(std::string(who) + ": conditions " + nn::to_string(conditions.shape()) +
                            " do not match [B x " + std::to_string(c) + "]");
    }
}

std::vector<Var> condition_steps(nn::Tape& tape, const Tensor& conditions) {
    const std::size_t b = conditions.rows();
    const std::size_t c = conditions.cols();
    std::vector<Var> steps;
    steps.reserve(c + 1);
    for (std::size_t t = 0; t < c; ++t) {
        Tensor col({b, 1});
        for (std::size_t r = 0; r < b; ++r) col[r] = conditions.at(r, t);
        steps.push_back(tape.constant(std::move(col)));
    }
    return steps;
}

void append(std::vector<NamedTensor>& out, const std::string& prefix, nn::RecurrentCell& rnn) {
    for (std::size_t g = 0; g < rnn.gate_count(); ++g) {
        const std::string p = prefix + ".gate" + std::to_string(g);
        out.emplace_back(p + ".input_weights", &rnn.gate(g).input_weights);
        out.emplace_back(p + ".hidden_weights", &rnn.gate(g).hidden_weights);
        out.emplace_back(p + ".bias", &rnn.gate(g).bias);
    }
}

void append(std::vector<NamedTensor>& out, const std::string& prefix, nn::DenseLayer& layer) {
    out.emplace_back(prefix + ".weights", &layer.weights());
    out.emplace_back(prefix + ".bias", &layer.bias());
}

std::vector<NamedConstTensor> to_const(const std::vector<NamedTensor>& v) {
    return {v.begin(), v.end()};
}

std::vector<Tensor*> pointers(const std::vector<NamedTensor>& v) {
    std::vector<Tensor*> out;
    for (const auto& [name, t] : v) out.push_back(t);
    return out;
}

}  // namespace

Generator::Generator(nn::CellKind cell, std::size_t hidden, std::size_t noise_dim, std::size_t condition_len)
    : rnn_(cell, 1, hidden),
      hidden_(hidden + noise_dim, hidden + noise_dim, nn::Activation::relu),
      output_(hidden + noise_dim, 1, nn::Activation::identity),
      noise_dim_(noise_dim),
      condition_len_(condition_len) {
    if (noise_dim == 0 || condition_len == 0) throw ContractError("generator needs N >= 1 and C >= 1");
}

void Generator::initialize(Rng& rng) {
    rnn_.initialize(rng);
    hidden_.initialize(rng);
    output_.initialize(rng);
}

Tensor Generator::encode(const Tensor& conditions) const {
    check_conditions(conditions, condition_len_, "generate");
    const std::size_t b = conditions.rows();
    return rnn_.forward(conditions.reshaped({b, condition_len_, 1}), Tensor({b, hidden_width()}));
}

Tensor Generator::head(const Tensor& state, const Tensor& noise) const {
    const std::size_t b = state.rows();
    if (noise.rows() != b || noise.cols() != noise_dim_ || state.cols() != hidden_width()) {
        throw ContractError("generate: noise " + nn::to_string(noise.shape()) + " does not match [" +
                            std::to_string(b) + " x " + std::to_string(noise_dim_) + "]");
    }
    const std::size_t w = hidden_width() + noise_dim_;
    Tensor joined({b, w});
    for (std::size_t r = 0; r < b; ++r) {
        for (std::size_t j = 0; j < hidden_width(); ++j) joined.at(r, j) = state.at(r, j);
        for (std::size_t j = 0; j < noise_dim_; ++j) joined.at(r, hidden_width() + j) = noise.at(r, j);
    }
    return output_.forward(hidden_.forward(joined));
}

Tensor Generator::forward(const Tensor& conditions, const Tensor& noise) const {
    return head(encode(conditions), noise);
}

double Generator::generate(std::span<const double> condition, std::span<const double> noise) const {
    if (condition.size() != condition_len_) {
        throw ContractError("generate: condition has " + std::to_string(condition.size()) + " steps, expected " +
                            std::to_string(condition_len_));
    }
    if (noise.size() != noise_dim_) {
        throw ContractError("generate: noise has " + std::to_string(noise.size()) + " entries, expected " +
                            std::to_string(noise_dim_));
    }
    const Tensor c({1, condition_len_}, std::vector<double>(condition.begin(), condition.end()));
    const Tensor z({1, noise_dim_}, std::vector<double>(noise.begin(), noise.end()));
    return forward(c, z)[0];
}

Var Generator::forward(nn::Tape& tape, const Tensor& conditions, const Tensor& noise, nn::Binding binding) {
    check_conditions(conditions, condition_len_, "generate");
    const std::size_t b = conditions.rows();
    if (noise.rank() != 2 || noise.rows() != b || noise.cols() != noise_dim_) {
        throw ContractError("generate: noise " + nn::to_string(noise.shape()) + " does not match [" +
                            std::to_string(b) + " x " + std::to_string(noise_dim_) + "]");
    }
    const auto steps = condition_steps(tape, conditions);
    Var h = rnn_.forward(tape, steps, tape.constant(Tensor({b, hidden_width()})), binding);
    Var joined = tape.concat_cols(h, tape.constant(noise));
    return output_.forward(tape, hidden_.forward(tape, joined, binding), binding);
}

std::vector<NamedTensor> Generator::named_parameters() {
    std::vector<NamedTensor> out;
    append(out, "generator.rnn", rnn_);
    append(out, "generator.hidden", hidden_);
    append(out, "generator.output", output_);
    return out;
}

std::vector<NamedConstTensor> Generator::named_parameters() const {
    return to_const(const_cast<Generator*>(this)->named_parameters());
}

std::vector<Tensor*> Generator::parameters() {
    return pointers(named_parameters());
}

Discriminator::Discriminator(nn::CellKind cell, std::size_t hidden, std::size_t condition_len)
    : rnn_(cell, 1, hidden), output_(hidden, 1, nn::Activation::sigmoid), condition_len_(condition_len) {
    if (condition_len == 0) throw ContractError("discriminator needs C >= 1");
}

void Discriminator::initialize(Rng& rng) {
    rnn_.initialize(rng);
    output_.initialize(rng);
}

Tensor Discriminator::forward(const Tensor& conditions, const Tensor& candidates) const {
    check_conditions(conditions, condition_len_, "discriminator_score");
    const std::size_t b = conditions.rows();
    if (candidates.size() != b) {
        throw ContractError("discriminator_score: " + std::to_string(candidates.size()) + " candidates for " +
                            std::to_string(b) + " conditions");
    }
    const std::size_t steps = condition_len_ + 1;
    Tensor seq({b, steps, 1});
    for (std::size_t r = 0; r < b; ++r) {
        for (std::size_t t = 0; t < condition_len_; ++t) seq[r * steps + t] = conditions.at(r, t);
        seq[r * steps + condition_len_] = candidates[r];
    }
    return output_.forward(rnn_.forward(seq, Tensor({b, hidden_width()})));
}

double Discriminator::score(std::span<const double> condition, double candidate) const {
    if (condition.size() != condition_len_) {
        throw ContractError("discriminator_score: condition has " + std::to_string(condition.size()) +
                            " steps, expected " + std::to_string(condition_len_));
    }
    const Tensor c({1, condition_len_}, std::vector<double>(condition.begin(), condition.end()));
    return forward(c, Tensor({1, 1}, candidate))[0];
}

Var Discriminator::forward(nn::Tape& tape, const Tensor& conditions, Var candidates, nn::Binding binding) {
    check_conditions(conditions, condition_len_, "discriminator_score");
    const std::size_t b = conditions.rows();
    if (candidates.rows() != b || candidates.cols() != 1) {
        throw ContractError("discriminator_score: candidates must be [" + std::to_string(b) + " x 1]");
    }
    auto steps = condition_steps(tape, conditions);
    steps.push_back(candidates);
    Var h = rnn_.forward(tape, steps, tape.constant(Tensor({b, hidden_width()})), binding);
    return output_.forward(tape, h, binding);
}

std::vector<NamedTensor> Discriminator::named_parameters() {
    std::vector<NamedTensor> out;
    append(out, "discriminator.rnn", rnn_);
    append(out, "discriminator.output", output_);
    return out;
}

std::vector<NamedConstTensor> Discriminator::named_parameters() const {
    return to_const(const_cast<Discriminator*>(this)->named_parameters());
}

std::vector<Tensor*> Discriminator::parameters() {
    return pointers(named_parameters());
}

}  // namespace forgan::model
