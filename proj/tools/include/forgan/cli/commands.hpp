#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forgan/cli/config.hpp"
#include "forgan/data/dataset.hpp"
#include "forgan/model/forgan_model.hpp"

namespace forgan::cli {

struct CommandOptions {
    /// Dataset CSV to read (train / evaluate / tune); defaults to <out>/dataset.csv.
    std::optional<std::filesystem::path> dataset_file;
    /// Model file to evaluate; defaults to <out>/<model>.model.
    std::optional<std::filesystem::path> model_file;
    /// Models to train or evaluate.
    std::vector<model::ModelKind> models{model::ModelKind::forgan};
    /// Continue an interrupted GA log.
    bool resume = false;
    /// Progress and summaries; null silences them.
    std::ostream* log = nullptr;
};

/// Paths of the files a command wrote or read, keyed by role (e.g. "dataset",
/// "model.forgan", "report.g-regression").
using Artifacts = std::vector<std::pair<std::string, std::filesystem::path>>;

/// Builds the configured dataset from the root seed's "dataset" stream.
data::WindowedDataset build_dataset(const ExperimentConfig& cfg, std::vector<double>* series = nullptr);

// Each command writes its files under cfg.out plus <out>/manifest.json and returns the
// manifest: config snapshot, artifacts, seed, tool version and wall-clock seconds.
nlohmann::json cmd_generate(const ExperimentConfig& cfg, const CommandOptions& opt = {});
nlohmann::json cmd_train(const ExperimentConfig& cfg, const CommandOptions& opt = {});
nlohmann::json cmd_evaluate(const ExperimentConfig& cfg, const CommandOptions& opt = {});
nlohmann::json cmd_tune(const ExperimentConfig& cfg, const CommandOptions& opt = {});
/// generate -> tune (when hyper is "tune") -> train -> evaluate. A failure is rethrown
/// with the stage name prepended and the same error class.
nlohmann::json cmd_full_experiment(const ExperimentConfig& cfg, const CommandOptions& opt = {});

/// Reads a manifest back into the config snapshot and the artifact paths it lists.
std::pair<ExperimentConfig, Artifacts> read_manifest(const std::filesystem::path& path);

std::string tool_version();

}  // namespace forgan::cli
