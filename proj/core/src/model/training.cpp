#include "forgan/model/training.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "forgan/data/csv.hpp"
#include "forgan/error.hpp"
#include "forgan/eval/evaluate.hpp"
#include "forgan/eval/metrics.hpp"
#include "forgan/model/model_io.hpp"
#include "forgan/nn/tape.hpp"

namespace forgan::model {
namespace {

using nn::Binding;
using nn::Tape;
using nn::Tensor;
using nn::Var;

constexpr double kLogEps = 1e-12;

// Scaled train windows, trailing C steps only.
struct TrainSet {
    std::size_t c = 0;
    std::vector<double> conditions;
    std::vector<double> targets;

    std::size_t size() const { return targets.size(); }
};

TrainSet scaled_train(const data::WindowedDataset& ds, std::size_t c) {
    TrainSet s;
    s.c = c;
    const auto& sc = ds.scaler();
    for (std::size_t i : ds.split().train) {
        for (double v : ds.condition_tail(i, c)) s.conditions.push_back(sc.forward(v));
        s.targets.push_back(sc.forward(ds.target(i)));
    }
    return s;
}

struct Batch {
    Tensor conditions;
    Tensor targets;
};

Batch sample_batch(const TrainSet& s, std::size_t b, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
    Batch out{Tensor({b, s.c}), Tensor({b, 1})};
    for (std::size_t r = 0; r < b; ++r) {
        const std::size_t i = pick(rng);
        std::copy_n(s.conditions.begin() + static_cast<std::ptrdiff_t>(i * s.c), s.c, &out.conditions.at(r, 0));
        out.targets[r] = s.targets[i];
    }
    return out;
}

Tensor normal_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    return Tensor({rows, cols}, draw_noise(rows * cols, rng));
}

void check_finite(double loss, const char* which, std::size_t step) {
    if (!std::isfinite(loss)) {
        throw NumericError(std::string("training diverged: ") + which + " loss is " + std::to_string(loss) +
                           " at generator step " + std::to_string(step));
    }
}

void check_inputs(const data::WindowedDataset& ds, const HyperParams& hyper, const TrainConfig& cfg) {
    cfg.validate();
    hyper.validate();
    if (ds.empty() || ds.split().train.empty()) throw DataError("training needs a non-empty train split");
    if (ds.condition_len() < hyper.condition_len) {
        throw ContractError("dataset windows hold " + std::to_string(ds.condition_len()) + " values, but C = " +
                            std::to_string(hyper.condition_len));
    }
}

std::vector<std::size_t> validation_windows(const data::WindowedDataset& ds, const TrainConfig& cfg) {
    std::vector<std::size_t> v = ds.split().validation;
    if (cfg.validation_windows > 0 && v.size() > cfg.validation_windows) v.resize(cfg.validation_windows);
    return v;
}

// Tracks the best validation score and a copy of the parameters that achieved it.
class Selector {
public:
    Selector(const data::WindowedDataset& ds, const TrainConfig& cfg, std::string metric)
        : ds_(ds), cfg_(cfg), windows_(validation_windows(ds, cfg)), metric_(std::move(metric)) {}

    bool due(std::size_t step, std::size_t last) const {
        return cfg_.validation_every > 0 && !windows_.empty() && (step % cfg_.validation_every == 0 || step == last);
    }

    void observe(std::size_t step, const ForGanModel& m, TrainingLog& log) {
        const ModelForecaster f(m);
        std::optional<double> score;
        if (metric_ == "kld") {
            Rng rng = make_rng(cfg_.seed, "validation");
            score = eval::sampled_kld(f, ds_, windows_, cfg_.validation_samples, rng);
        } else {
            Rng unused(0);
            std::vector<double> pred(windows_.size());
            f.forecast(ds_, windows_, 1, unused, pred);
            score = eval::rmse(ds_.targets_of(windows_), pred);
        }
        log.validation.push_back({step, score});
        if (score && (!best_ || *score < *best_)) {
            best_ = score;
            best_step_ = step;
            best_model_ = m;
        }
    }

    void finish(TrainResult& r) {
        r.log.selection_metric = metric_;
        if (best_model_) {
            r.model = std::move(*best_model_);
            r.log.best_step = best_step_;
            r.log.best_score = best_;
        }
    }

private:
    const data::WindowedDataset& ds_;
    const TrainConfig& cfg_;
    std::vector<std::size_t> windows_;
    std::string metric_;
    std::optional<double> best_;
    std::size_t best_step_ = 0;
    std::optional<ForGanModel> best_model_;
};

void maybe_checkpoint(const TrainConfig& cfg, std::size_t step, const ForGanModel& m) {
    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() && step % cfg.checkpoint_every == 0) {
        save_model(m, cfg.checkpoint_path);
    }
}

// -2 * mean(y log D + (1 - y) log(1 - D)) over the stacked real/fake rows, i.e. the sum of
// the real-half and fake-half cross-entropies.
double discriminator_update(ForGanModel& m, nn::Adam& opt, const Batch& batch, const Tensor& fake) {
    const std::size_t b = batch.targets.size();
    Tensor cond({2 * b, m.hyper.condition_len});
    Tensor cand({2 * b, 1});
    Tensor labels({2 * b, 1});
    std::copy(batch.conditions.values().begin(), batch.conditions.values().end(), cond.data());
    std::copy(batch.conditions.values().begin(), batch.conditions.values().end(), cond.data() + batch.conditions.size());
    for (std::size_t r = 0; r < b; ++r) {
        cand[r] = batch.targets[r];
        cand[b + r] = fake[r];
        labels[r] = 1.0;
    }
    opt.zero_grad();
    Tape tape;
    Var p = m.discriminator.forward(tape, cond, tape.constant(cand), Binding::trainable);
    Var y = tape.constant(std::move(labels));
    Var ll = y * tape.log(p, kLogEps) + tape.one_minus(y) * tape.log(tape.one_minus(p), kLogEps);
    Var loss = tape.scale(tape.mean(ll), -2.0);
    const double value = tape.value(loss)[0];
    if (std::isfinite(value)) {
        tape.backward(loss);
        opt.step();
    }
    return value;
}

}  // namespace

void TrainConfig::validate() const {
    if (batch_size == 0) throw ContractError("batch size must be at least 1");
    if (validation_every > 0 && validation_samples == 0) {
        throw ContractError("validation needs at least one sample per window");
    }
}

TrainResult train_forgan(const data::WindowedDataset& ds, const HyperParams& hyper, const TrainConfig& cfg,
                         const ProgressFn& progress) {
    check_inputs(ds, hyper, cfg);
    Rng init = make_rng(cfg.seed, "init");
    TrainResult r{ForGanModel::create(ModelKind::forgan, hyper, ds.scaler(), init), {}};
    ForGanModel& m = r.model;
    const TrainSet train = scaled_train(ds, hyper.condition_len);
    Rng rng = make_rng(cfg.seed, "training");
    nn::Adam g_opt(m.generator.parameters(), cfg.adam);
    nn::Adam d_opt(m.discriminator.parameters(), cfg.adam);
    Selector selector(ds, cfg, "kld");
    const std::size_t b = cfg.batch_size;

    for (std::size_t step = 1; step <= cfg.generator_steps; ++step) {
        double d_sum = 0.0;
        for (std::size_t k = 0; k < hyper.d_iters; ++k) {
            const Batch batch = sample_batch(train, b, rng);
            const Tensor fake = m.generator.forward(batch.conditions, normal_matrix(b, hyper.noise_dim, rng));
            const double d_loss = discriminator_update(m, d_opt, batch, fake);
            check_finite(d_loss, "discriminator", step);
            d_sum += d_loss;
            ++r.log.discriminator_updates;
        }

        const Batch batch = sample_batch(train, b, rng);
        g_opt.zero_grad();
        Tape tape;
        Var g = m.generator.forward(tape, batch.conditions, normal_matrix(b, hyper.noise_dim, rng), Binding::trainable);
        Var p = m.discriminator.forward(tape, batch.conditions, g, Binding::frozen);
        Var loss = tape.scale(tape.mean(tape.log(p, kLogEps)), -1.0);
        const double g_loss = tape.value(loss)[0];
        check_finite(g_loss, "generator", step);
        tape.backward(loss);
        g_opt.step();
        ++r.log.generator_updates;

        const LossRecord rec{step, d_sum / static_cast<double>(hyper.d_iters), g_loss};
        r.log.losses.push_back(rec);
        if (progress) progress(rec);
        if (selector.due(step, cfg.generator_steps)) selector.observe(step, m, r.log);
        maybe_checkpoint(cfg, step, m);
    }
    selector.finish(r);
    return r;
}

TrainResult train_gregression(const data::WindowedDataset& ds, const HyperParams& hyper, const TrainConfig& cfg,
                              const ProgressFn& progress) {
    check_inputs(ds, hyper, cfg);
    Rng init = make_rng(cfg.seed, "init");
    TrainResult r{ForGanModel::create(ModelKind::g_regression, hyper, ds.scaler(), init), {}};
    ForGanModel& m = r.model;
    const TrainSet train = scaled_train(ds, hyper.condition_len);
    Rng rng = make_rng(cfg.seed, "training");
    nn::Adam opt(m.generator.parameters(), cfg.adam);
    Selector selector(ds, cfg, "rmse");
    const std::size_t b = cfg.batch_size;
    const Tensor zeros({b, hyper.noise_dim});

    for (std::size_t step = 1; step <= cfg.generator_steps; ++step) {
        const Batch batch = sample_batch(train, b, rng);
        opt.zero_grad();
        Tape tape;
        Var pred = m.generator.forward(tape, batch.conditions, zeros, Binding::trainable);
        Var loss = tape.sqrt(tape.mean(tape.square(pred - tape.constant(batch.targets))));
        const double value = tape.value(loss)[0];
        check_finite(value, "regression", step);
        tape.backward(loss);
        opt.step();
        ++r.log.generator_updates;

        const LossRecord rec{step, 0.0, value};
        r.log.losses.push_back(rec);
        if (progress) progress(rec);
        if (selector.due(step, cfg.generator_steps)) selector.observe(step, m, r.log);
        maybe_checkpoint(cfg, step, m);
    }
    selector.finish(r);
    return r;
}

TrainResult train_model(ModelKind kind, const data::WindowedDataset& ds, const HyperParams& hyper,
                        const TrainConfig& cfg, const ProgressFn& progress) {
    return kind == ModelKind::forgan ? train_forgan(ds, hyper, cfg, progress)
                                     : train_gregression(ds, hyper, cfg, progress);
}

void write_loss_csv(const TrainingLog& log, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write loss log '" + path.string() + "'");
    out << "step,discriminator_loss,generator_loss\n";
    for (const auto& l : log.losses) {
        out << l.step << ',' << data::format_double(l.discriminator_loss) << ','
            << data::format_double(l.generator_loss) << '\n';
    }
}

}  // namespace forgan::model
