#include "forgan/cli/app.hpp"

#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "forgan/cli/commands.hpp"

namespace forgan::cli {
namespace {

struct Flags {
    std::string preset;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string model = "forgan";
    bool paper_scale = false;
    std::optional<std::size_t> n;
    std::optional<std::size_t> steps;
    std::string dataset;
    std::string model_file;
    std::string manifest;
    bool resume = false;
    bool quiet = false;
};

ExperimentConfig resolve(const Flags& f, const std::string& command) {
    ExperimentConfig cfg;
    if (!f.manifest.empty()) {
        cfg = read_manifest(f.manifest).first;
    } else {
        cfg = preset(f.preset.empty() ? "lorenz" : f.preset);
        if (!f.config.empty()) cfg = load_config(f.config, cfg);
        if (f.paper_scale) apply_paper_scale(cfg);
        if (!f.out.empty()) cfg.out = f.out;
        else if (!f.preset.empty() && f.config.empty()) cfg.out = "runs/" + f.preset;
    }
    if (f.seed) cfg.seed = *f.seed;
    if (!f.out.empty()) cfg.out = f.out;
    if (f.n) cfg.dataset.n = *f.n;
    if (f.steps) cfg.train.generator_steps = *f.steps;
    if (command == "generate" || command == "full-experiment" || command == "show-config") {
        if (!f.dataset.empty()) {
            cfg.dataset.kind = "csv";
            cfg.dataset.path = f.dataset;
        }
    }
    cfg.validate();
    return cfg;
}

std::vector<model::ModelKind> kinds(const std::string& name) {
    if (name == "both") return {model::ModelKind::forgan, model::ModelKind::g_regression};
    try {
        return {model::parse_model_kind(name)};
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
}

CommandOptions options(const Flags& f, const std::string& command, std::ostream& out) {
    CommandOptions opt;
    opt.models = kinds(f.model);
    opt.resume = f.resume;
    opt.log = f.quiet ? nullptr : &out;
    const bool reads_dataset = command == "train" || command == "evaluate" || command == "tune";
    if (reads_dataset && !f.dataset.empty()) opt.dataset_file = f.dataset;
    if (!f.model_file.empty()) opt.model_file = f.model_file;
    if (!f.manifest.empty() && command == "evaluate") {
        const auto art = read_manifest(f.manifest).second;
        for (const auto& [role, path] : art) {
            if (role == "dataset" && !opt.dataset_file) opt.dataset_file = path;
        }
        if (!opt.model_file && f.model != "both") {
            const std::string want = "model." + f.model;
            for (const auto& [role, path] : art) {
                if (role == want) opt.model_file = path;
            }
        }
    }
    return opt;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probabilistic one-step forecasting with conditional GANs", "forgan"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());
    Flags f;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--preset", f.preset, "Base configuration")
            ->check(CLI::IsMember(preset_names()));
        sub->add_option("--config", f.config, "JSON config overlaid on the preset")->check(CLI::ExistingFile);
        sub->add_option("--seed", f.seed, "Root seed");
        sub->add_option("--out", f.out, "Output directory");
        sub->add_option("--n", f.n, "Dataset size (windows, or series length for mackey-glass)");
        sub->add_option("--steps", f.steps, "Generator steps for training");
        sub->add_flag("--paper-scale", f.paper_scale, "Full-length training and evaluation budgets");
        sub->add_option("--dataset", f.dataset, "Dataset CSV (train/evaluate/tune) or CSV source series (generate)");
        sub->add_flag("-q,--quiet", f.quiet, "Suppress progress output");
    };
    auto with_model = [&](CLI::App* sub) {
        sub->add_option("--model", f.model, "forgan, g-regression or both")
            ->check(CLI::IsMember({"forgan", "g-regression", "both"}));
    };

    auto* gen = app.add_subcommand("generate", "Build a dataset and write it as CSV");
    common(gen);
    auto* train = app.add_subcommand("train", "Train a model on a generated dataset");
    common(train);
    with_model(train);
    auto* evaluate = app.add_subcommand("evaluate", "Score trained models on the test split");
    common(evaluate);
    with_model(evaluate);
    evaluate->add_option("--model-file", f.model_file, "Model file to evaluate");
    evaluate->add_option("--manifest", f.manifest, "Reuse the config and artifacts of an earlier run")
        ->check(CLI::ExistingFile);
    auto* tune = app.add_subcommand("tune", "Genetic search over the six hyperparameters");
    common(tune);
    tune->add_flag("--resume", f.resume, "Continue an interrupted GA log");
    auto* full = app.add_subcommand("full-experiment", "generate, tune if needed, train and evaluate");
    common(full);
    with_model(full);
    full->add_flag("--resume", f.resume, "Continue an interrupted GA log");
    auto* show = app.add_subcommand("show-config", "Print the resolved configuration");
    common(show);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const ExperimentConfig cfg = resolve(f, command);
        const CommandOptions opt = options(f, command, out);
        if (command == "show-config") {
            out << to_json(cfg).dump(2) << '\n';
        } else if (command == "generate") {
            cmd_generate(cfg, opt);
        } else if (command == "train") {
            cmd_train(cfg, opt);
        } else if (command == "evaluate") {
            cmd_evaluate(cfg, opt);
        } else if (command == "tune") {
            cmd_tune(cfg, opt);
        } else {
            cmd_full_experiment(cfg, opt);
        }
        return exit_ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const ContractError& e) {
        err << "invalid argument: " << e.what() << '\n';
        return exit_config;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << '\n';
        return exit_data;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace forgan::cli
