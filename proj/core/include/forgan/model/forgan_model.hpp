#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forgan/data/dataset.hpp"
#include "forgan/eval/evaluate.hpp"
#include "forgan/model/hyper_params.hpp"
#include "forgan/model/networks.hpp"
#include "forgan/random.hpp"

namespace forgan::model {

/// `g_regression` uses the generator architecture alone, with the noise input held at zero.
enum class ModelKind { forgan, g_regression };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// A generator (and, for ForGAN, its discriminator) plus the scaler that maps original
/// units to the [0, 1] range the networks operate in.
struct ForGanModel {
    ModelKind kind = ModelKind::forgan;
    HyperParams hyper;
    data::AffineScaler scaler;
    Generator generator;
    /// Empty for G-regression.
    Discriminator discriminator;

    /// Builds the networks for `hyper` and initializes them from `rng`.
    static ForGanModel create(ModelKind kind, const HyperParams& hyper, const data::AffineScaler& scaler, Rng& rng);

    bool has_discriminator() const noexcept { return kind == ModelKind::forgan; }
    /// Throws ContractError when the networks disagree with `hyper`.
    void check() const;
};

// The operations below take and return original units; the condition is the last C values.

/// G(z | c); deterministic in (parameters, condition, noise).
double generate(const ForGanModel& model, std::span<const double> condition, std::span<const double> noise);

/// `k` forecasts with z ~ N(0, I) drawn from `rng` (zero noise for G-regression).
std::vector<double> sample_forecasts(const ForGanModel& model, std::span<const double> condition, std::size_t k,
                                     Rng& rng);

/// D(candidate | c), in (0, 1). Throws ContractError for G-regression.
double discriminator_score(const ForGanModel& model, std::span<const double> condition, double candidate);

/// Draws a standard normal noise row per forecast.
std::vector<double> draw_noise(std::size_t count, Rng& rng);

/// Evaluates a model as an eval::Forecaster over dataset windows.
class ModelForecaster final : public eval::Forecaster {
public:
    explicit ModelForecaster(const ForGanModel& model, std::string label = {});

    std::string label() const override { return label_; }
    bool deterministic() const override { return model_->kind == ModelKind::g_regression; }
    void forecast(const data::WindowedDataset& ds, std::span<const std::size_t> indices, std::size_t samples, Rng& rng,
                  std::span<double> out) const override;

private:
    const ForGanModel* model_;
    std::string label_;
};

}  // namespace forgan::model
