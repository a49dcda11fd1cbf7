#include "forgan/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "forgan/data/csv.hpp"
#include "forgan/data/dataset_io.hpp"
#include "forgan/data/lorenz.hpp"
#include "forgan/data/mackey_glass.hpp"
#include "forgan/data/toy.hpp"
#include "forgan/eval/report.hpp"
#include "forgan/model/model_io.hpp"

#ifndef FORGAN_VERSION
#define FORGAN_VERSION "unknown"
#endif

namespace forgan::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string kind_name(model::ModelKind k) {
    return std::string(model::to_string(k));
}

fs::path dataset_path(const ExperimentConfig& cfg, const CommandOptions& opt) {
    return opt.dataset_file.value_or(cfg.out / "dataset.csv");
}

fs::path model_path(const ExperimentConfig& cfg, model::ModelKind k) {
    return cfg.out / (kind_name(k) + ".model");
}

data::WindowedDataset load_dataset(const ExperimentConfig& cfg, const CommandOptions& opt, Artifacts& art) {
    const fs::path p = dataset_path(cfg, opt);
    if (!fs::exists(p)) throw DataError("dataset '" + p.string() + "' does not exist (run generate first)");
    art.emplace_back("dataset", p);
    return data::read_dataset(p);
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    out << text;
}

json manifest(const std::string& command, const ExperimentConfig& cfg, const Artifacts& art, Clock::time_point t0,
              json extra = json::object()) {
    json a = json::object();
    for (const auto& [role, path] : art) a[role] = path.generic_string();
    json m = {{"tool", "forgan"},
              {"version", tool_version()},
              {"command", command},
              {"seed", cfg.seed},
              {"config", to_json(cfg)},
              {"artifacts", a},
              {"wall_clock_seconds", std::chrono::duration<double>(Clock::now() - t0).count()}};
    m.update(extra);
    return m;
}

json finish(const std::string& command, const ExperimentConfig& cfg, Artifacts art, Clock::time_point t0,
            json extra = json::object()) {
    const fs::path p = cfg.out / "manifest.json";
    art.emplace_back("manifest", p);
    json m = manifest(command, cfg, art, t0, std::move(extra));
    write_text(p, m.dump(2) + "\n");
    return m;
}

model::HyperParams resolve_hyper(const ExperimentConfig& cfg, Artifacts& art) {
    if (cfg.hyper) return *cfg.hyper;
    const fs::path p = cfg.out / "best_hyper.json";
    std::ifstream in(p);
    if (!in) throw ConfigError("hyper is \"tune\" but '" + p.string() + "' does not exist (run tune first)");
    art.emplace_back("best_hyper", p);
    try {
        return hyper_from_json(json::parse(in).at("hyper"));
    } catch (const json::exception& e) {
        throw FormatError("'" + p.string() + "' is not a tuned config fragment: " + e.what());
    }
}

void write_validation_csv(const model::TrainingLog& log, const fs::path& p) {
    std::string text = "step," + log.selection_metric + "\n";
    for (const auto& v : log.validation) {
        text += std::to_string(v.step) + "," + (v.score ? data::format_double(*v.score) : "undefined") + "\n";
    }
    write_text(p, text);
}

std::string describe_kld(const std::optional<double>& k) {
    return k ? data::format_double(*k) : "undefined";
}

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(name + ": " + e.what());
    } catch (const ContractError& e) {
        throw ContractError(name + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(name + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(name + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(name + ": " + e.what());
    }
}

void append(Artifacts& to, const json& m) {
    for (const auto& [role, path] : m.at("artifacts").items()) {
        if (role == "manifest") continue;
        const fs::path p = path.get<std::string>();
        bool seen = false;
        for (const auto& [r, q] : to) seen = seen || (r == role && q == p);
        if (!seen) to.emplace_back(role, p);
    }
}

}  // namespace

std::string tool_version() {
    return FORGAN_VERSION;
}

data::WindowedDataset build_dataset(const ExperimentConfig& cfg, std::vector<double>* series) {
    cfg.validate();
    Rng rng = make_rng(cfg.seed, "dataset");
    const auto& d = cfg.dataset;
    data::WindowedDataset ds;
    if (d.kind == "lorenz") {
        ds = data::build_lorenz_dataset(data::LorenzParams{}, d.n, rng);
    } else if (d.kind == "toy-bimodal") {
        ds = data::build_toy_bimodal(d.n, rng);
    } else {
        std::vector<double> s;
        data::Provenance prov;
        if (d.kind == "mackey-glass") {
            s = data::integrate_mackey_glass(data::MackeyGlassParams{}, d.n);
            prov.kind = "mackey-glass";
            prov.params_json = json{{"length", d.n}}.dump();
        } else {
            s = data::ingest_csv_series(d.path, data::parse_column_selector(d.column));
            prov.kind = "csv";
            prov.params_json = json{{"path", d.path.generic_string()}, {"column", d.column}}.dump();
        }
        ds = data::window_series(s, required_window(cfg), prov);
        if (series) *series = std::move(s);
    }
    ds.stamp_seed(cfg.seed);
    return ds;
}

json cmd_generate(const ExperimentConfig& cfg, const CommandOptions& opt) {
    const auto t0 = Clock::now();
    std::vector<double> series;
    const auto ds = build_dataset(cfg, &series);
    Artifacts art;
    const fs::path p = cfg.out / "dataset.csv";
    data::write_dataset(ds, p);
    art.emplace_back("dataset", p);
    art.emplace_back("dataset_meta", data::metadata_path(p));
    if (!series.empty()) {
        std::string text = "value\n";
        for (double v : series) text += data::format_double(v) + "\n";
        write_text(cfg.out / "series.csv", text);
        art.emplace_back("series", cfg.out / "series.csv");
    }
    if (opt.log) {
        *opt.log << "generated " << ds.size() << " windows (C = " << ds.condition_len() << ", train "
                 << ds.split().train.size() << ", validation " << ds.split().validation.size() << ", test "
                 << ds.split().test.size() << ") -> " << p.string() << '\n';
    }
    return finish("generate", cfg, art, t0,
                  {{"dataset", {{"windows", ds.size()}, {"condition_len", ds.condition_len()}}}});
}

json cmd_train(const ExperimentConfig& cfg, const CommandOptions& opt) {
    const auto t0 = Clock::now();
    cfg.validate();
    Artifacts art;
    const auto ds = load_dataset(cfg, opt, art);
    const auto hyper = resolve_hyper(cfg, art);
    json summary = json::object();
    for (auto kind : opt.models) {
        const std::string name = kind_name(kind);
        model::TrainConfig tc = cfg.train;
        tc.seed = cfg.seed;
        if (tc.checkpoint_every > 0) tc.checkpoint_path = cfg.out / (name + ".checkpoint.model");
        const std::size_t every = std::max<std::size_t>(1, tc.generator_steps / 20);
        const auto started = Clock::now();
        if (opt.log) *opt.log << "training " << name << " (" << hyper.describe() << ")\n";
        const auto result = model::train_model(kind, ds, hyper, tc, [&](const model::LossRecord& l) {
            if (opt.log && (l.step % every == 0 || l.step == tc.generator_steps)) {
                *opt.log << "  step " << l.step << "/" << tc.generator_steps;
                if (kind == model::ModelKind::forgan) *opt.log << "  d_loss " << l.discriminator_loss;
                *opt.log << "  g_loss " << l.generator_loss << '\n';
            }
        });
        const fs::path mp = model_path(cfg, kind);
        model::save_model(result.model, mp);
        model::write_loss_csv(result.log, cfg.out / (name + "_loss.csv"));
        write_validation_csv(result.log, cfg.out / (name + "_validation.csv"));
        art.emplace_back("model." + name, mp);
        art.emplace_back("loss." + name, cfg.out / (name + "_loss.csv"));
        art.emplace_back("validation." + name, cfg.out / (name + "_validation.csv"));
        if (tc.checkpoint_every > 0 && fs::exists(tc.checkpoint_path)) art.emplace_back("checkpoint." + name, tc.checkpoint_path);
        summary[name] = {{"generator_updates", result.log.generator_updates},
                         {"discriminator_updates", result.log.discriminator_updates},
                         {"selection_metric", result.log.selection_metric},
                         {"best_step", result.log.best_step ? json(*result.log.best_step) : json(nullptr)},
                         {"best_score", result.log.best_score ? json(*result.log.best_score) : json(nullptr)}};
        if (opt.log) {
            *opt.log << "  saved " << mp.string() << " ("
                     << std::chrono::duration<double>(Clock::now() - started).count() << " s";
            if (result.log.best_step) {
                *opt.log << ", best " << result.log.selection_metric << " " << *result.log.best_score << " at step "
                         << *result.log.best_step;
            }
            *opt.log << ")\n";
        }
    }
    return finish("train", cfg, art, t0, {{"hyper", hyper_to_json(hyper)}, {"training", summary}});
}

json cmd_evaluate(const ExperimentConfig& cfg, const CommandOptions& opt) {
    const auto t0 = Clock::now();
    cfg.validate();
    Artifacts art;
    const auto ds = load_dataset(cfg, opt, art);
    json results = json::object();
    const auto kinds = opt.model_file ? std::vector<model::ModelKind>{} : opt.models;
    std::vector<fs::path> files;
    if (opt.model_file) {
        files.push_back(*opt.model_file);
    } else {
        for (auto k : kinds) files.push_back(model_path(cfg, k));
    }
    for (const auto& mp : files) {
        if (!fs::exists(mp)) throw DataError("model file '" + mp.string() + "' does not exist (run train first)");
        const auto m = model::load_model(mp);
        const std::string name = kind_name(m.kind);
        art.emplace_back("model." + name, mp);
        const model::ModelForecaster f(m);
        eval::EvaluationReport rep;
        if (m.kind == model::ModelKind::forgan) {
            Rng rng = make_rng(cfg.seed, "eval");
            rep = eval::evaluate_probabilistic(f, ds, ds.split().test, cfg.eval, rng);
        } else {
            rep = eval::evaluate_deterministic(f, ds, ds.split().test);
        }
        const fs::path rp = cfg.out / (name + "_report.json");
        const fs::path hp = cfg.out / (name + "_histogram.csv");
        eval::write_report(rep, rp);
        eval::write_histogram_csv(rep.truth, rep.predicted, hp);
        art.emplace_back("report." + name, rp);
        art.emplace_back("histogram." + name, hp);
        for (const auto& c : rep.clusters) {
            const fs::path cp = cfg.out / (name + "_histogram_cluster" + std::to_string(c.cluster) + ".csv");
            eval::write_histogram_csv(c.truth, c.predicted, cp);
            art.emplace_back("histogram." + name + ".cluster" + std::to_string(c.cluster), cp);
        }
        results[name] = {{"rmse", rep.rmse.mean},
                         {"rmse_std", rep.rmse.std},
                         {"mae", rep.mae.mean},
                         {"kld", rep.kld ? json(*rep.kld) : json("undefined")}};
        if (opt.log) {
            *opt.log << name << ": RMSE " << rep.rmse.mean << " (" << rep.rmse.std << ")  MAE " << rep.mae.mean
                     << "  MAPE " << (rep.mape ? std::to_string(rep.mape->mean) : std::string("n/a")) << "  KLD "
                     << describe_kld(rep.kld) << "  [" << rep.windows << " windows, " << rep.runs << " runs, "
                     << rep.samples_per_condition << " samples]\n";
        }
    }
    return finish("evaluate", cfg, art, t0, {{"results", results}});
}

json cmd_tune(const ExperimentConfig& cfg, const CommandOptions& opt) {
    const auto t0 = Clock::now();
    cfg.validate();
    Artifacts art;
    const auto ds = load_dataset(cfg, opt, art);
    tune::GaConfig ga = cfg.tune.ga;
    ga.seed = cfg.seed;
    ga.train = cfg.train;
    ga.train.generator_steps = cfg.tune.generator_steps;
    ga.train.batch_size = cfg.tune.batch_size;
    ga.train.checkpoint_every = 0;
    if (ga.train.validation_every == 0 || ga.train.validation_every > ga.train.generator_steps) {
        ga.train.validation_every = ga.train.generator_steps;
    }
    const auto base_fitness = tune::make_training_fitness(ds, ga.train);
    std::size_t evaluated = 0;
    const tune::FitnessFn fitness = [&](const model::HyperParams& h, std::uint64_t seed) {
        const double f = base_fitness(h, seed);
        if (opt.log) *opt.log << "  gene " << ++evaluated << ": " << h.describe() << " -> " << f << '\n';
        return f;
    };
    const fs::path log_path = cfg.out / "ga_log.jsonl";
    const auto result = tune::run_ga(ga, fitness, {log_path, opt.resume});
    art.emplace_back("ga_log", log_path);

    const auto& best = result.best;
    json fragment = {{"hyper", hyper_to_json(best.hyper)},
                     {"fitness", std::isfinite(*best.fitness) ? json(*best.fitness) : json("undefined")},
                     {"all_undefined", result.all_undefined},
                     {"evaluations", result.evaluations}};
    const fs::path bp = cfg.out / "best_hyper.json";
    write_text(bp, fragment.dump(2) + "\n");
    art.emplace_back("best_hyper", bp);
    if (opt.log) {
        *opt.log << "best gene: " << best.hyper.describe() << " fitness " << fragment["fitness"].dump() << " after "
                 << result.evaluations << " evaluations\n";
        if (result.all_undefined) *opt.log << "warning: every evaluated gene had an undefined validation KLD\n";
    }
    return finish("tune", cfg, art, t0,
                  {{"best", fragment}, {"warning", result.all_undefined ? json("all fitness values undefined") : json(nullptr)}});
}

json cmd_full_experiment(const ExperimentConfig& cfg, const CommandOptions& opt) {
    const auto t0 = Clock::now();
    cfg.validate();
    Artifacts art;
    json stages = json::array();
    CommandOptions inner = opt;
    inner.dataset_file.reset();
    inner.model_file.reset();

    append(art, stage("generate", [&] { return cmd_generate(cfg, inner); }));
    stages.push_back("generate");
    json best = nullptr;
    if (!cfg.hyper) {
        const json m = stage("tune", [&] { return cmd_tune(cfg, inner); });
        append(art, m);
        best = m.at("best");
        stages.push_back("tune");
    }
    const json trained = stage("train", [&] { return cmd_train(cfg, inner); });
    append(art, trained);
    stages.push_back("train");
    const json evaluated = stage("evaluate", [&] { return cmd_evaluate(cfg, inner); });
    append(art, evaluated);
    stages.push_back("evaluate");
    json extra = {{"stages", stages},
                  {"hyper", trained.at("hyper")},
                  {"training", trained.at("training")},
                  {"results", evaluated.at("results")}};
    if (!best.is_null()) extra["tuned"] = best;
    return finish("full-experiment", cfg, art, t0, extra);
}

std::pair<ExperimentConfig, Artifacts> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read manifest '" + path.string() + "'");
    try {
        const json m = json::parse(in);
        ExperimentConfig cfg = merge_json(ExperimentConfig{}, m.at("config"));
        Artifacts art;
        for (const auto& [role, p] : m.at("artifacts").items()) art.emplace_back(role, p.get<std::string>());
        return {cfg, art};
    } catch (const json::exception& e) {
        throw FormatError("manifest '" + path.string() + "' is malformed: " + e.what());
    }
}

}  // namespace forgan::cli
