#include "forgan/cli/config.hpp"

#include <fstream>
#include <set>

namespace forgan::cli {
namespace {

using nlohmann::json;

template <class T>
void take(const json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

json train_json(const model::TrainConfig& t) {
    return {{"generator_steps", t.generator_steps},
            {"batch_size", t.batch_size},
            {"validation_every", t.validation_every},
            {"validation_samples", t.validation_samples},
            {"validation_windows", t.validation_windows},
            {"checkpoint_every", t.checkpoint_every},
            {"learning_rate", t.adam.learning_rate},
            {"beta1", t.adam.beta1},
            {"beta2", t.adam.beta2},
            {"epsilon", t.adam.epsilon}};
}

void merge_train(model::TrainConfig& t, const json& j) {
    reject_unknown(j,
                   {"generator_steps", "batch_size", "validation_every", "validation_samples", "validation_windows",
                    "checkpoint_every", "learning_rate", "beta1", "beta2", "epsilon"},
                   "train");
    take(j, "generator_steps", t.generator_steps);
    take(j, "batch_size", t.batch_size);
    take(j, "validation_every", t.validation_every);
    take(j, "validation_samples", t.validation_samples);
    take(j, "validation_windows", t.validation_windows);
    take(j, "checkpoint_every", t.checkpoint_every);
    take(j, "learning_rate", t.adam.learning_rate);
    take(j, "beta1", t.adam.beta1);
    take(j, "beta2", t.adam.beta2);
    take(j, "epsilon", t.adam.epsilon);
}

ExperimentConfig base_config(const std::string& name, const std::string& kind, std::size_t n) {
    ExperimentConfig c;
    c.name = name;
    c.out = std::filesystem::path("runs") / name;
    c.dataset.kind = kind;
    c.dataset.n = n;
    c.train.validation_every = 100;
    c.train.validation_samples = 50;
    c.train.validation_windows = 500;
    return c;
}

}  // namespace

json hyper_to_json(const model::HyperParams& h) {
    return {{"cell", std::string(nn::to_string(h.cell))}, {"gen_hidden", h.gen_hidden},
            {"dis_hidden", h.dis_hidden},                 {"noise_dim", h.noise_dim},
            {"condition_len", h.condition_len},           {"d_iters", h.d_iters}};
}

model::HyperParams hyper_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("hyper must be an object or the string \"tune\"");
    reject_unknown(j, {"cell", "gen_hidden", "dis_hidden", "noise_dim", "condition_len", "d_iters"}, "hyper");
    model::HyperParams h;
    if (j.contains("cell")) h.cell = nn::parse_cell_kind(j.at("cell").get<std::string>());
    take(j, "gen_hidden", h.gen_hidden);
    take(j, "dis_hidden", h.dis_hidden);
    take(j, "noise_dim", h.noise_dim);
    take(j, "condition_len", h.condition_len);
    take(j, "d_iters", h.d_iters);
    return h;
}

std::vector<std::string> preset_names() {
    return {"lorenz", "mackey-glass", "traffic", "toy-bimodal"};
}

ExperimentConfig preset(const std::string& name) {
    if (name == "lorenz") {
        auto c = base_config(name, "lorenz", 20000);
        c.hyper = model::HyperParams::lorenz();
        c.train.generator_steps = 2000;
        c.train.batch_size = 128;
        return c;
    }
    if (name == "mackey-glass") {
        auto c = base_config(name, "mackey-glass", 20000);
        c.hyper = model::HyperParams::mackey_glass();
        c.train.generator_steps = 1200;
        c.train.batch_size = 32;
        return c;
    }
    if (name == "traffic") {
        auto c = base_config(name, "csv", 0);
        c.hyper = model::HyperParams::internet_traffic();
        c.train.generator_steps = 2000;
        c.train.batch_size = 64;
        return c;
    }
    if (name == "toy-bimodal") {
        auto c = base_config(name, "toy-bimodal", 10000);
        c.hyper = model::HyperParams{nn::CellKind::gru, 8, 16, 8, 8, 1};
        c.train.generator_steps = 16000;
        c.train.batch_size = 128;
        c.train.validation_every = 200;
        c.train.adam.beta1 = 0.5;
        c.tune.generator_steps = 100;
        return c;
    }
    std::string known;
    for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

void apply_paper_scale(ExperimentConfig& cfg) {
    cfg.train.generator_steps *= 10;
    cfg.train.batch_size = 128;
    cfg.train.validation_samples = 100;
    cfg.train.validation_windows = 0;
    cfg.tune.generator_steps *= 10;
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> kinds{"lorenz", "mackey-glass", "toy-bimodal", "csv"};
    if (!kinds.count(dataset.kind)) throw ConfigError("unknown dataset kind '" + dataset.kind + "'");
    if (dataset.kind == "csv" && dataset.path.empty()) {
        throw ConfigError("dataset kind 'csv' needs a path (--dataset or dataset.path)");
    }
    if (dataset.kind != "csv" && dataset.n == 0) throw ConfigError("dataset.n must be positive");
    try {
        if (hyper) hyper->validate();
        train.validate();
        tune.ga.validate();
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
    if (train.generator_steps == 0) throw ConfigError("train.generator_steps must be at least 1");
    if (eval.samples_per_condition == 0 || eval.runs == 0) {
        throw ConfigError("eval.samples_per_condition and eval.runs must be positive");
    }
    if (tune.generator_steps == 0 || tune.batch_size == 0) throw ConfigError("tune budget must be positive");
}

json to_json(const ExperimentConfig& c) {
    json tune = {{"pool_size", c.tune.ga.pool_size},
                 {"iterations", c.tune.ga.iterations},
                 {"survivors", c.tune.ga.survivors},
                 {"crossover_count", c.tune.ga.crossover_count},
                 {"mutation_count", c.tune.ga.mutation_count},
                 {"mutation_rate", c.tune.ga.mutation_rate},
                 {"generator_steps", c.tune.generator_steps},
                 {"batch_size", c.tune.batch_size}};
    return {{"name", c.name},
            {"seed", c.seed},
            {"out", c.out.generic_string()},
            {"dataset",
             {{"kind", c.dataset.kind},
              {"n", c.dataset.n},
              {"window", c.dataset.window},
              {"path", c.dataset.path.generic_string()},
              {"column", c.dataset.column}}},
            {"hyper", c.hyper ? hyper_to_json(*c.hyper) : json("tune")},
            {"train", train_json(c.train)},
            {"eval", {{"samples_per_condition", c.eval.samples_per_condition}, {"runs", c.eval.runs}}},
            {"tune", tune}};
}

ExperimentConfig merge_json(ExperimentConfig c, const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        reject_unknown(j, {"preset", "name", "seed", "out", "dataset", "hyper", "train", "eval", "tune"}, "config");
        take(j, "name", c.name);
        take(j, "seed", c.seed);
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("dataset")) {
            const auto& d = j.at("dataset");
            reject_unknown(d, {"kind", "n", "window", "path", "column"}, "dataset");
            take(d, "kind", c.dataset.kind);
            take(d, "n", c.dataset.n);
            take(d, "window", c.dataset.window);
            if (d.contains("path")) c.dataset.path = d.at("path").get<std::string>();
            if (d.contains("column")) {
                const auto& col = d.at("column");
                c.dataset.column = col.is_number() ? std::to_string(col.get<std::size_t>()) : col.get<std::string>();
            }
        }
        if (j.contains("hyper")) {
            const auto& h = j.at("hyper");
            if (h.is_string()) {
                if (h.get<std::string>() != "tune") throw ConfigError("hyper must be an object or \"tune\"");
                c.hyper.reset();
            } else {
                json full = c.hyper ? hyper_to_json(*c.hyper) : hyper_to_json(model::HyperParams{});
                full.update(h);
                c.hyper = hyper_from_json(full);
            }
        }
        if (j.contains("train")) merge_train(c.train, j.at("train"));
        if (j.contains("eval")) {
            const auto& e = j.at("eval");
            reject_unknown(e, {"samples_per_condition", "runs"}, "eval");
            take(e, "samples_per_condition", c.eval.samples_per_condition);
            take(e, "runs", c.eval.runs);
        }
        if (j.contains("tune")) {
            const auto& t = j.at("tune");
            reject_unknown(t,
                           {"pool_size", "iterations", "survivors", "crossover_count", "mutation_count",
                            "mutation_rate", "generator_steps", "batch_size"},
                           "tune");
            take(t, "pool_size", c.tune.ga.pool_size);
            take(t, "iterations", c.tune.ga.iterations);
            take(t, "survivors", c.tune.ga.survivors);
            take(t, "crossover_count", c.tune.ga.crossover_count);
            take(t, "mutation_count", c.tune.ga.mutation_count);
            take(t, "mutation_rate", c.tune.ga.mutation_rate);
            take(t, "generator_steps", c.tune.generator_steps);
            take(t, "batch_size", c.tune.batch_size);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    ExperimentConfig start = base;
    if (j.is_object() && j.contains("preset")) start = preset(j.at("preset").get<std::string>());
    return merge_json(std::move(start), j);
}

std::size_t required_window(const ExperimentConfig& cfg) {
    if (cfg.dataset.window > 0) return cfg.dataset.window;
    if (cfg.hyper) return cfg.hyper->condition_len;
    return model::width_domain().back();
}

}  // namespace forgan::cli
