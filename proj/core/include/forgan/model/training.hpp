#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "forgan/data/dataset.hpp"
#include "forgan/model/forgan_model.hpp"
#include "forgan/model/hyper_params.hpp"
#include "forgan/nn/optimizer.hpp"

namespace forgan::model {

struct TrainConfig {
    /// Generator updates; each is preceded by D_Iter discriminator updates. 0 returns the
    /// freshly initialized model.
    std::size_t generator_steps = 2000;
    std::size_t batch_size = 128;
    std::uint64_t seed = 0;
    /// Validate every this many generator steps (and after the last); 0 disables selection.
    std::size_t validation_every = 100;
    std::size_t validation_samples = 100;
    /// Use only the first this many validation windows; 0 uses all.
    std::size_t validation_windows = 0;
    /// Save the current model every this many generator steps when a path is set.
    std::size_t checkpoint_every = 0;
    std::filesystem::path checkpoint_path;
    nn::AdamOptions adam;

    /// Throws ContractError on a zero batch size or zero validation sample count.
    void validate() const;
};

struct LossRecord {
    std::size_t step = 0;
    /// Mean of the step's discriminator losses (ForGAN only).
    double discriminator_loss = 0.0;
    double generator_loss = 0.0;
};

struct ValidationRecord {
    std::size_t step = 0;
    /// Validation KLD (ForGAN) or validation RMSE (G-regression); absent when undefined.
    std::optional<double> score;
};

struct TrainingLog {
    std::vector<LossRecord> losses;
    std::vector<ValidationRecord> validation;
    std::size_t discriminator_updates = 0;
    std::size_t generator_updates = 0;
    /// "kld" or "rmse".
    std::string selection_metric;
    /// Step of the returned parameters when they came from a validation checkpoint.
    std::optional<std::size_t> best_step;
    std::optional<double> best_score;
};

struct TrainResult {
    ForGanModel model;
    TrainingLog log;
};

/// Called after every generator step.
using ProgressFn = std::function<void(const LossRecord&)>;

/// Adversarial training on the train split. Returns the best-validation-KLD checkpoint, or
/// the final parameters when no validation KLD was defined. Throws NumericError on a
/// non-finite loss, DataError on an empty train split.
TrainResult train_forgan(const data::WindowedDataset& ds, const HyperParams& hyper, const TrainConfig& cfg,
                         const ProgressFn& progress = {});

/// The generator architecture with zero noise, fitted on batch RMSE; checkpoints by
/// validation RMSE.
TrainResult train_gregression(const data::WindowedDataset& ds, const HyperParams& hyper, const TrainConfig& cfg,
                              const ProgressFn& progress = {});

TrainResult train_model(ModelKind kind, const data::WindowedDataset& ds, const HyperParams& hyper,
                        const TrainConfig& cfg, const ProgressFn& progress = {});

/// step,discriminator_loss,generator_loss
void write_loss_csv(const TrainingLog& log, const std::filesystem::path& path);

}  // namespace forgan::model
