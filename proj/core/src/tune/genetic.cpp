#include "forgan/tune/genetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "forgan/error.hpp"

namespace forgan::tune {
namespace {

using model::HyperParams;
using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
T pick(std::span<const T> domain, Rng& rng) {
    std::uniform_int_distribution<std::size_t> u(0, domain.size() - 1);
    return domain[u(rng)];
}

bool coin(double p, Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

using Key = std::tuple<int, std::size_t, std::size_t, std::size_t, std::size_t, std::size_t>;

Key key_of(const HyperParams& h) {
    return {static_cast<int>(h.cell), h.gen_hidden, h.dis_hidden, h.noise_dim, h.condition_len, h.d_iters};
}

double order_value(const Gene& g) {
    return g.fitness.value_or(kInf);
}

json hyper_json(const HyperParams& h) {
    return {{"cell", std::string(nn::to_string(h.cell))}, {"gen_hidden", h.gen_hidden},
            {"dis_hidden", h.dis_hidden},                 {"noise_dim", h.noise_dim},
            {"condition_len", h.condition_len},           {"d_iters", h.d_iters}};
}

json gene_json(const Gene& g) {
    json j = {{"hyper", hyper_json(g.hyper)}};
    if (!g.fitness) {
        j["fitness"] = nullptr;
    } else if (std::isfinite(*g.fitness)) {
        j["fitness"] = *g.fitness;
    } else {
        j["fitness"] = "undefined";
    }
    return j;
}

Gene gene_from(const json& j) {
    Gene g;
    const auto& h = j.at("hyper");
    g.hyper.cell = nn::parse_cell_kind(h.at("cell").get<std::string>());
    g.hyper.gen_hidden = h.at("gen_hidden").get<std::size_t>();
    g.hyper.dis_hidden = h.at("dis_hidden").get<std::size_t>();
    g.hyper.noise_dim = h.at("noise_dim").get<std::size_t>();
    g.hyper.condition_len = h.at("condition_len").get<std::size_t>();
    g.hyper.d_iters = h.at("d_iters").get<std::size_t>();
    const auto& f = j.at("fitness");
    if (f.is_number()) {
        g.fitness = f.get<double>();
    } else if (f.is_string()) {
        g.fitness = kInf;
    }
    return g;
}

struct State {
    std::vector<Gene> pool;
    std::map<Key, double> cache;
    std::optional<Gene> best;
    std::size_t evaluations = 0;
    std::size_t next_iteration = 0;
    Rng rng;
};

std::string rng_text(const Rng& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

json log_line(const IterationLog& it, const Rng& rng) {
    json pool = json::array();
    for (const auto& g : it.pool) pool.push_back(gene_json(g));
    return {{"iteration", it.iteration},
            {"pool", pool},
            {"best", gene_json(it.best)},
            {"evaluations", it.evaluations},
            {"rng", rng_text(rng)}};
}

// Rebuilds the state after the last complete line; the cache is the union of all logged pools.
bool restore(const std::filesystem::path& path, const GaConfig& cfg, State& s, GaResult& result) {
    std::ifstream in(path);
    if (!in) return false;
    std::string line;
    json last;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            break;  // a torn final line from an interrupted run
        }
        IterationLog it;
        it.iteration = j.at("iteration").get<std::size_t>();
        for (const auto& g : j.at("pool")) {
            it.pool.push_back(gene_from(g));
            if (it.pool.back().fitness) s.cache[key_of(it.pool.back().hyper)] = *it.pool.back().fitness;
        }
        it.best = gene_from(j.at("best"));
        it.evaluations = j.at("evaluations").get<std::size_t>();
        result.iterations.push_back(std::move(it));
        last = std::move(j);
    }
    if (last.is_null()) return false;
    const auto& tail = result.iterations.back();
    if (tail.pool.size() != cfg.pool_size) throw FormatError("GA log pool size does not match the configuration");
    s.pool = tail.pool;
    s.best = tail.best;
    s.evaluations = tail.evaluations;
    s.next_iteration = tail.iteration + 1;
    std::istringstream is(last.at("rng").get<std::string>());
    is >> s.rng;
    if (!is) throw FormatError("GA log has an unreadable generator state");
    return true;
}

// Survivors followed by their offspring; the caller ranks the union and keeps pool_size.
// A child identical to a gene already in the list is redrawn (a bounded number of times),
// since the fitness cache would make it a wasted slot.
std::vector<Gene> breed(const GaConfig& cfg, const std::vector<Gene>& ranked, Rng& rng) {
    constexpr int kRedraws = 16;
    std::vector<Gene> next(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(cfg.survivors));
    std::uniform_int_distribution<std::size_t> any(0, cfg.survivors - 1);
    auto fresh = [&](const HyperParams& h) {
        return std::none_of(next.begin(), next.end(), [&](const Gene& g) { return g.hyper == h; });
    };
    auto child = [&](bool cross) {
        if (cross) {
            const std::size_t a = any(rng);
            std::size_t b = any(rng);
            while (b == a) b = any(rng);
            return crossover(ranked[a].hyper, ranked[b].hyper, rng);
        }
        return mutate(ranked[any(rng)].hyper, cfg.mutation_rate, rng);
    };
    for (std::size_t k = 0; k < cfg.crossover_count + cfg.mutation_count; ++k) {
        const bool cross = k < cfg.crossover_count;
        HyperParams h = child(cross);
        for (int tries = 0; tries < kRedraws && !fresh(h); ++tries) h = child(cross);
        next.push_back({h, std::nullopt});
    }
    return next;
}

}  // namespace

void GaConfig::validate() const {
    if (pool_size == 0 || iterations == 0) throw ContractError("GA needs a non-empty pool and at least one iteration");
    if (survivors > pool_size || survivors + crossover_count + mutation_count < pool_size) {
        throw ContractError("GA survivors must fit the pool, and survivors plus offspring must refill it");
    }
    if (survivors == 0 || (crossover_count > 0 && survivors < 2)) {
        throw ContractError("GA needs at least one survivor, and two when crossover is used");
    }
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ContractError("GA mutation rate must lie in [0, 1]");
}

HyperParams random_gene(Rng& rng) {
    HyperParams h;
    h.cell = pick(model::cell_domain(), rng);
    h.gen_hidden = pick(model::width_domain(), rng);
    h.dis_hidden = pick(model::width_domain(), rng);
    h.noise_dim = pick(model::noise_domain(), rng);
    h.condition_len = pick(model::width_domain(), rng);
    h.d_iters = pick(model::d_iter_domain(), rng);
    return h;
}

HyperParams crossover(const HyperParams& a, const HyperParams& b, Rng& rng) {
    HyperParams c;
    c.cell = coin(0.5, rng) ? a.cell : b.cell;
    c.gen_hidden = coin(0.5, rng) ? a.gen_hidden : b.gen_hidden;
    c.dis_hidden = coin(0.5, rng) ? a.dis_hidden : b.dis_hidden;
    c.noise_dim = coin(0.5, rng) ? a.noise_dim : b.noise_dim;
    c.condition_len = coin(0.5, rng) ? a.condition_len : b.condition_len;
    c.d_iters = coin(0.5, rng) ? a.d_iters : b.d_iters;
    return c;
}

HyperParams mutate(const HyperParams& g, double rate, Rng& rng) {
    HyperParams m = g;
    if (coin(rate, rng)) m.cell = pick(model::cell_domain(), rng);
    if (coin(rate, rng)) m.gen_hidden = pick(model::width_domain(), rng);
    if (coin(rate, rng)) m.dis_hidden = pick(model::width_domain(), rng);
    if (coin(rate, rng)) m.noise_dim = pick(model::noise_domain(), rng);
    if (coin(rate, rng)) m.condition_len = pick(model::width_domain(), rng);
    if (coin(rate, rng)) m.d_iters = pick(model::d_iter_domain(), rng);
    return m;
}

GaResult run_ga(const GaConfig& cfg, const FitnessFn& fitness, const GaLogOptions& log) {
    cfg.validate();
    if (!fitness) throw ContractError("GA needs a fitness function");
    GaResult result;
    State s{{}, {}, std::nullopt, 0, 0, make_rng(cfg.seed, "ga")};
    const bool resumed = log.resume && !log.path.empty() && restore(log.path, cfg, s, result);
    if (resumed) {
        s.pool = breed(cfg, s.pool, s.rng);
    } else {
        result.iterations.clear();
        for (std::size_t i = 0; i < cfg.pool_size; ++i) s.pool.push_back({random_gene(s.rng), std::nullopt});
    }

    std::ofstream out;
    if (!log.path.empty()) {
        if (log.path.has_parent_path()) std::filesystem::create_directories(log.path.parent_path());
        out.open(log.path, resumed ? std::ios::app : std::ios::trunc);
        if (!out) throw DataError("cannot write GA log '" + log.path.string() + "'");
    }

    for (std::size_t it = s.next_iteration; it < cfg.iterations; ++it) {
        for (auto& g : s.pool) {
            const Key k = key_of(g.hyper);
            if (auto hit = s.cache.find(k); hit != s.cache.end()) {
                g.fitness = hit->second;
                continue;
            }
            double f = fitness(g.hyper, derive_seed(cfg.seed, "gene", s.evaluations));
            if (std::isnan(f)) f = kInf;
            ++s.evaluations;
            s.cache.emplace(k, f);
            g.fitness = f;
        }
        std::stable_sort(s.pool.begin(), s.pool.end(),
                         [](const Gene& a, const Gene& b) { return order_value(a) < order_value(b); });
        s.pool.resize(cfg.pool_size);
        if (!s.best || order_value(s.pool.front()) < order_value(*s.best)) s.best = s.pool.front();

        IterationLog entry{it, s.pool, *s.best, s.evaluations};
        if (out.is_open()) {
            out << log_line(entry, s.rng).dump() << '\n';
            out.flush();
        }
        result.iterations.push_back(std::move(entry));
        if (it + 1 < cfg.iterations) s.pool = breed(cfg, s.pool, s.rng);
    }

    if (!s.best) throw ContractError("GA log already covers every configured iteration and holds no best gene");
    result.best = *s.best;
    result.evaluations = s.evaluations;
    result.all_undefined = !std::isfinite(order_value(result.best));
    return result;
}

FitnessFn make_training_fitness(const data::WindowedDataset& ds, const model::TrainConfig& train) {
    return [&ds, train](const HyperParams& hyper, std::uint64_t seed) {
        if (hyper.condition_len > ds.condition_len()) return kInf;
        model::TrainConfig cfg = train;
        cfg.seed = seed;
        if (cfg.validation_every == 0) cfg.validation_every = cfg.generator_steps;
        try {
            return model::train_forgan(ds, hyper, cfg).log.best_score.value_or(kInf);
        } catch (const NumericError&) {
            return kInf;
        }
    };
}

std::string gene_to_json(const Gene& gene) {
    return gene_json(gene).dump(2);
}

}  // namespace forgan::tune
