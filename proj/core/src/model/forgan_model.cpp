#include "forgan/model/forgan_model.hpp"

#include <algorithm>
#include <random>

#include "forgan/error.hpp"

namespace forgan::model {
namespace {

using nn::Tensor;

constexpr std::size_t kEncodeChunk = 1024;

void check_condition(const ForGanModel& m, std::span<const double> condition) {
    if (condition.size() != m.hyper.condition_len) {
        throw ContractError("condition has " + std::to_string(condition.size()) + " values, the model expects C = " +
                            std::to_string(m.hyper.condition_len));
    }
}

std::vector<double> scaled(const ForGanModel& m, std::span<const double> condition) {
    std::vector<double> out(condition.size());
    std::transform(condition.begin(), condition.end(), out.begin(),
                   [&](double x) { return m.scaler.forward(x); });
    return out;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::forgan ? "forgan" : "g-regression";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "forgan" || name == "ForGAN") return ModelKind::forgan;
    if (name == "g-regression" || name == "g_regression" || name == "G-regression") return ModelKind::g_regression;
    throw ContractError("unknown model kind '" + std::string(name) + "' (expected forgan or g-regression)");
}

ForGanModel ForGanModel::create(ModelKind kind, const HyperParams& hyper, const data::AffineScaler& scaler,
                                Rng& rng) {
    hyper.validate();
    ForGanModel m;
    m.kind = kind;
    m.hyper = hyper;
    m.scaler = scaler;
    m.generator = Generator(hyper.cell, hyper.gen_hidden, hyper.noise_dim, hyper.condition_len);
    m.generator.initialize(rng);
    if (kind == ModelKind::forgan) {
        m.discriminator = Discriminator(hyper.cell, hyper.dis_hidden, hyper.condition_len);
        m.discriminator.initialize(rng);
    }
    return m;
}

void ForGanModel::check() const {
    const auto& g = generator;
    if (g.condition_len() != hyper.condition_len || g.hidden_width() != hyper.gen_hidden ||
        g.noise_dim() != hyper.noise_dim || g.rnn().kind() != hyper.cell) {
        throw ContractError("generator shape does not match " + hyper.describe());
    }
    if (has_discriminator()) {
        const auto& d = discriminator;
        if (d.condition_len() != hyper.condition_len || d.hidden_width() != hyper.dis_hidden ||
            d.rnn().kind() != hyper.cell) {
            throw ContractError("discriminator shape does not match " + hyper.describe());
        }
    }
}

double generate(const ForGanModel& model, std::span<const double> condition, std::span<const double> noise) {
    check_condition(model, condition);
    return model.scaler.inverse(model.generator.generate(scaled(model, condition), noise));
}

std::vector<double> draw_noise(std::size_t count, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(count);
    for (double& v : z) v = normal(rng);
    return z;
}

std::vector<double> sample_forecasts(const ForGanModel& model, std::span<const double> condition, std::size_t k,
                                     Rng& rng) {
    if (k == 0) throw ContractError("sample_forecasts needs k >= 1");
    check_condition(model, condition);
    const std::size_t n = model.hyper.noise_dim;
    const auto c = scaled(model, condition);
    const Tensor state = model.generator.encode(Tensor({1, c.size()}, c));
    Tensor states({k, state.size()});
    for (std::size_t r = 0; r < k; ++r) std::copy(state.values().begin(), state.values().end(), &states.at(r, 0));
    Tensor noise({k, n});
    if (model.kind == ModelKind::forgan) noise = Tensor({k, n}, draw_noise(k * n, rng));
    Tensor y = model.generator.head(states, noise);
    std::vector<double> out(k);
    for (std::size_t r = 0; r < k; ++r) out[r] = model.scaler.inverse(y[r]);
    return out;
}

double discriminator_score(const ForGanModel& model, std::span<const double> condition, double candidate) {
    if (!model.has_discriminator()) throw ContractError("a G-regression model has no discriminator");
    check_condition(model, condition);
    return model.discriminator.score(scaled(model, condition), model.scaler.forward(candidate));
}

ModelForecaster::ModelForecaster(const ForGanModel& model, std::string label)
    : model_(&model), label_(label.empty() ? std::string(to_string(model.kind)) : std::move(label)) {}

void ModelForecaster::forecast(const data::WindowedDataset& ds, std::span<const std::size_t> indices,
                               std::size_t samples, Rng& rng, std::span<double> out) const {
    const ForGanModel& m = *model_;
    const std::size_t c = m.hyper.condition_len;
    const std::size_t nz = m.hyper.noise_dim;
    if (ds.condition_len() < c) {
        throw ContractError("dataset windows hold " + std::to_string(ds.condition_len()) +
                            " values, the model expects C = " + std::to_string(c));
    }
    if (out.size() != indices.size() * samples) throw ContractError("forecast output span has the wrong size");
    const bool stochastic = m.kind == ModelKind::forgan;

    for (std::size_t begin = 0; begin < indices.size(); begin += kEncodeChunk) {
        const std::size_t rows = std::min(kEncodeChunk, indices.size() - begin);
        Tensor cond({rows, c});
        for (std::size_t r = 0; r < rows; ++r) {
            const auto tail = ds.condition_tail(indices[begin + r], c);
            for (std::size_t t = 0; t < c; ++t) cond.at(r, t) = m.scaler.forward(tail[t]);
        }
        const Tensor state = m.generator.encode(cond);
        const std::size_t passes = stochastic ? samples : 1;
        for (std::size_t s = 0; s < passes; ++s) {
            Tensor noise({rows, nz});
            if (stochastic) noise = Tensor({rows, nz}, draw_noise(rows * nz, rng));
            const Tensor y = m.generator.head(state, noise);
            for (std::size_t r = 0; r < rows; ++r) {
                const double v = m.scaler.inverse(y[r]);
                if (stochastic) {
                    out[(begin + r) * samples + s] = v;
                } else {
                    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>((begin + r) * samples), samples, v);
                }
            }
        }
    }
}

}  // namespace forgan::model
