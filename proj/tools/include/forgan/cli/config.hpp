#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forgan/data/dataset.hpp"
#include "forgan/error.hpp"
#include "forgan/eval/evaluate.hpp"
#include "forgan/model/hyper_params.hpp"
#include "forgan/model/training.hpp"
#include "forgan/tune/genetic.hpp"

namespace forgan::cli {

/// Invalid configuration file, preset name or flag value.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct DatasetSpec {
    /// "lorenz", "mackey-glass", "toy-bimodal" or "csv".
    std::string kind = "lorenz";
    /// Window count for lorenz / toy-bimodal, series length for mackey-glass.
    std::size_t n = 20000;
    /// Condition window stored in the dataset for series kinds; 0 uses the model's C
    /// (or the largest searchable C when tuning).
    std::size_t window = 0;
    /// CSV source for kind "csv".
    std::filesystem::path path;
    /// Column name or zero-based index for kind "csv".
    std::string column = "0";
};

struct TuneSpec {
    tune::GaConfig ga;
    std::size_t generator_steps = 200;
    std::size_t batch_size = 64;
};

struct ExperimentConfig {
    std::string name = "custom";
    std::uint64_t seed = 0;
    std::filesystem::path out = "runs/custom";
    DatasetSpec dataset;
    /// Absent means "tune".
    std::optional<model::HyperParams> hyper;
    model::TrainConfig train;
    eval::EvalOptions eval;
    TuneSpec tune;

    /// Throws ConfigError on out-of-domain values.
    void validate() const;
};

/// lorenz, mackey-glass, traffic, toy-bimodal.
std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ExperimentConfig preset(const std::string& name);
/// Raises training and tuning budgets towards a full-length run.
void apply_paper_scale(ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Overlays the fields present in `j` onto `base`; unknown keys are a ConfigError.
ExperimentConfig merge_json(ExperimentConfig base, const nlohmann::json& j);
/// Reads a JSON config. A top-level "preset" key selects the base; otherwise `base` is used.
ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base);

nlohmann::json hyper_to_json(const model::HyperParams& h);
model::HyperParams hyper_from_json(const nlohmann::json& j);

/// Window length the dataset must provide for this config.
std::size_t required_window(const ExperimentConfig& cfg);

}  // namespace forgan::cli
