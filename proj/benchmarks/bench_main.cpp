#include <benchmark/benchmark.h>

#include <vector>

#include "forgan/data/lorenz.hpp"
#include "forgan/eval/histogram.hpp"
#include "forgan/model/forgan_model.hpp"
#include "forgan/model/training.hpp"
#include "forgan/nn/recurrent.hpp"
#include "forgan/nn/tape.hpp"

using namespace forgan;

namespace {

// args: cell (0 GRU, 1 LSTM), hidden width, sequence length; batch 128, one input feature.
void rnn(benchmark::State& state, bool backward) {
    const auto kind = state.range(0) == 0 ? nn::CellKind::gru : nn::CellKind::lstm;
    const auto width = static_cast<std::size_t>(state.range(1));
    const auto len = static_cast<std::size_t>(state.range(2));
    const std::size_t batch = 128;
    Rng rng(1);
    nn::RecurrentCell cell(kind, 1, width);
    cell.initialize(rng);
    std::vector<nn::Tensor> steps;
    std::normal_distribution<double> n;
    for (std::size_t t = 0; t < len; ++t) {
        nn::Tensor x({batch, 1});
        for (double& v : x.values()) v = n(rng);
        steps.push_back(std::move(x));
    }
    for (auto _ : state) {
        nn::Tape tape;
        std::vector<nn::Var> xs;
        for (const auto& s : steps) xs.push_back(tape.constant(s));
        const nn::Var h0 = tape.constant(nn::Tensor({batch, width}));
        const nn::Var h = cell.forward(tape, xs, h0, backward ? nn::Binding::trainable : nn::Binding::frozen);
        if (backward) {
            tape.backward(tape.mean(tape.square(h)));
        }
        benchmark::DoNotOptimize(tape.value(h)[0]);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch));
}

void BM_RnnForward(benchmark::State& state) {
    rnn(state, false);
}
void BM_RnnForwardBackward(benchmark::State& state) {
    rnn(state, true);
}

const data::WindowedDataset& lorenz_data() {
    static const data::WindowedDataset ds = [] {
        Rng rng(3);
        return data::build_lorenz_dataset(data::LorenzParams{}, 2000, rng);
    }();
    return ds;
}

// One generator update with its D_Iter discriminator updates, Lorenz configuration.
void BM_TrainStep(benchmark::State& state) {
    model::TrainConfig cfg;
    cfg.batch_size = static_cast<std::size_t>(state.range(0));
    cfg.validation_every = 0;
    cfg.generator_steps = 10;
    for (auto _ : state) {
        auto r = model::train_forgan(lorenz_data(), model::HyperParams::lorenz(), cfg);
        benchmark::DoNotOptimize(r.log.generator_updates);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 10));
}

void BM_SampleForecasts(benchmark::State& state) {
    const auto& ds = lorenz_data();
    Rng rng(4);
    const auto m = model::ForGanModel::create(model::ModelKind::forgan, model::HyperParams::lorenz(), ds.scaler(), rng);
    const model::ModelForecaster f(m);
    const std::vector<std::size_t> idx(ds.split().test.begin(), ds.split().test.begin() + 100);
    const auto samples = static_cast<std::size_t>(state.range(0));
    std::vector<double> out(idx.size() * samples);
    for (auto _ : state) {
        f.forecast(ds, idx, samples, rng, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * out.size()));
}

void BM_KnuthBins(benchmark::State& state) {
    Rng rng(5);
    std::normal_distribution<double> n;
    std::vector<double> x(static_cast<std::size_t>(state.range(0)));
    for (double& v : x) v = n(rng);
    for (auto _ : state) {
        auto r = eval::knuth_bins(x);
        benchmark::DoNotOptimize(r.bins);
    }
}

}  // namespace

BENCHMARK(BM_RnnForward)->Args({0, 8, 24})->Args({1, 8, 24})->Args({0, 64, 25})->Args({1, 256, 33});
BENCHMARK(BM_RnnForwardBackward)->Args({0, 8, 24})->Args({1, 8, 24})->Args({0, 64, 25})->Args({1, 256, 33});
BENCHMARK(BM_TrainStep)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleForecasts)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnuthBins)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
