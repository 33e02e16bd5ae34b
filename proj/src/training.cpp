#include "cnca/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>

#include "cnca/error.hpp"
#include "cnca/generators.hpp"
#include "cnca/metrics.hpp"
#include "cnca/parallel.hpp"

namespace cnca {

namespace {

// Stream tags for derive_seed, so each use of the master seed is independent.
constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;
constexpr std::uint64_t kEpochStream = 0x65706f6368ULL;
constexpr std::uint64_t kStepStream = 0x73746570ULL;
constexpr std::uint64_t kEvalStream = 0x6576616cULL;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct BestSnapshot {
    std::vector<std::vector<float>> values;
};

BestSnapshot snapshot(const ParamStore<float>& store) {
    BestSnapshot s;
    for (const auto& e : store.entries()) s.values.emplace_back(e.tensor.values().begin(), e.tensor.values().end());
    return s;
}

void restore(ParamStore<float>& store, const BestSnapshot& s) {
    auto& entries = store.entries();
    for (std::size_t i = 0; i < entries.size(); ++i)
        std::copy(s.values[i].begin(), s.values[i].end(), entries[i].tensor.values().begin());
}

}  // namespace

std::vector<double> build_targets(std::span<const double> centrality) {
    const std::size_t n = centrality.size();
    if (n < 2) throw ParameterError("build_targets needs at least 2 nodes");
    for (double c : centrality)
        if (!std::isfinite(c)) throw ParameterError("build_targets: centrality values must be finite");
    // Ascending order, equal values ordered by node index.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return centrality[a] < centrality[b]; });
    std::vector<double> t(n);
    for (std::size_t p = 0; p < n; ++p) t[order[p]] = static_cast<double>(p) / static_cast<double>(n - 1);
    return t;
}

CentralityVector exact_centrality(const Graph& g, CentralityKind kind, unsigned threads) {
    switch (kind) {
        case CentralityKind::closeness:
            return closeness_all(g, threads);
        case CentralityKind::betweenness:
            return betweenness_all(g, threads);
        case CentralityKind::degree:
            return degree_all(g);
    }
    throw ParameterError("unknown centrality kind");
}

std::vector<NamedGraph> load_training_graphs(const TrainingConfig& cfg, unsigned threads) {
    std::vector<NamedGraph> out;
    if (!cfg.data.empty()) {
        for (const auto& path : cfg.data)
            out.push_back({std::filesystem::path(path).filename().string(), read_edge_list(path)});
        return out;
    }
    auto corpus = generate_corpus(cfg.corpus_spec(), threads);
    for (std::size_t i = 0; i < corpus.size(); ++i)
        out.push_back({to_string(corpus[i].spec.model) + "_" + std::to_string(i), std::move(corpus[i].graph)});
    return out;
}

std::vector<PreparedGraph> prepare_graphs(std::vector<NamedGraph> graphs, CentralityKind kind, unsigned threads) {
    std::vector<PreparedGraph> out(graphs.size());
    parallel_for(graphs.size(), threads, [&](std::size_t i) {
        auto c = exact_centrality(graphs[i].graph, kind, 1);
        out[i].name = std::move(graphs[i].name);
        out[i].targets = build_targets(c.values);
        out[i].centrality = std::move(c.values);
        out[i].graph = std::move(graphs[i].graph);
    });
    return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t count, double split,
                                                                           std::uint64_t seed) {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(seed, kSplitStream));
    rng.shuffle(idx);
    auto n_train = static_cast<std::size_t>(std::llround(split * static_cast<double>(count)));
    n_train = std::clamp<std::size_t>(n_train, 1, count);
    std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<long>(n_train));
    std::vector<std::size_t> test(idx.begin() + static_cast<long>(n_train), idx.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

std::uint64_t eval_seed(const TrainingConfig& cfg, std::uint64_t run) {
    return derive_seed(derive_seed(cfg.seed, kEvalStream), run);
}

double mean_tau(const CentralityModel<float>& model, const TrainingConfig& cfg, std::span<const PreparedGraph> graphs) {
    if (graphs.empty()) return 0.0;
    double total = 0.0;
    for (const auto& pg : graphs) {
        const auto in = model.prepare(pg.graph);
        const auto scores = model.predict_scores(in, eval_seed(cfg, 0));
        total += kendall_tau(scores, pg.centrality);
    }
    return total / static_cast<double>(graphs.size());
}

TrainResult train(const TrainingConfig& cfg, std::span<const PreparedGraph> train_set,
                  std::span<const PreparedGraph> test_set, const TrainHooks& hooks) {
    cfg.validate();
    if (train_set.empty()) throw ParameterError("no training graphs");

    CentralityModel<float> model(cfg.model_config());
    Adam<float> adam(cfg.adam_options(), model.params());
    const bool joint_vgae = cfg.encoder == EncoderKind::vgae && cfg.vgae_joint && cfg.vgae_weight > 0.0;

    std::vector<GraphInput<float>> inputs;
    inputs.reserve(train_set.size());
    for (const auto& pg : train_set) inputs.push_back(model.prepare(pg.graph));

    TrainResult result;
    for (const auto& pg : train_set) result.train_graphs.push_back(pg.name);
    for (const auto& pg : test_set) result.test_graphs.push_back(pg.name);

    const bool monitor_test = !test_set.empty();
    double best = -std::numeric_limits<double>::infinity();
    BestSnapshot best_params = snapshot(model.params());
    std::size_t since_best = 0;
    const std::size_t batch = cfg.batch_size;

    std::vector<std::size_t> order(train_set.size()), perm, chunk;
    std::vector<float> target;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = Clock::now();
        Rng rng(derive_seed(derive_seed(cfg.seed, kEpochStream), epoch));
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t steps = 0;
        for (std::size_t gi : order) {
            const auto& pg = train_set[gi];
            const std::size_t n = pg.graph.num_nodes();
            perm.resize(n);
            std::iota(perm.begin(), perm.end(), 0);
            rng.shuffle(perm);
            for (std::size_t start = 0; start < n; start += batch) {
                const std::size_t end = std::min(n, start + batch);
                chunk.assign(perm.begin() + static_cast<long>(start), perm.begin() + static_cast<long>(end));
                const std::uint64_t step_seed = derive_seed(derive_seed(cfg.seed, kStepStream), adam.steps());

                model.params().zero_grad();
                auto enc = model.encode(inputs[gi], true, step_seed);
                auto [y, mask] = model.decode_rows(enc.h, chunk);
                target.assign(y.rows(), 0.0f);
                for (std::size_t i = 0; i < chunk.size(); ++i) target[i] = static_cast<float>(pg.targets[chunk[i]]);
                auto loss = ad::masked_mse(y, std::span<const float>(target), mask);
                if (joint_vgae) {
                    Rng pair_rng(derive_seed(step_seed, 1));
                    const auto pairs = reconstruction_pairs(pg.graph, false, &pair_rng);
                    loss = ad::add(loss, ad::scale(vgae_loss(*enc.vgae, pairs, cfg.kl_weight),
                                                   static_cast<float>(cfg.vgae_weight)));
                }
                const double value = loss.item();
                if (!std::isfinite(value))
                    throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                                       std::to_string(adam.steps()));
                loss_sum += value + cfg.l2 * model.params().weight_sq_norm();
                ++steps;
                loss.backward();
                adam.step();
            }
        }

        EpochLog log;
        log.epoch = epoch;
        log.train_loss = loss_sum / static_cast<double>(std::max<std::size_t>(steps, 1));
        log.train_tau = mean_tau(model, cfg, train_set);
        log.test_tau = monitor_test ? mean_tau(model, cfg, test_set) : std::numeric_limits<double>::quiet_NaN();
        log.lr = adam.learning_rate();
        log.seconds = seconds_since(t0);
        result.log.push_back(log);
        if (hooks.on_epoch) hooks.on_epoch(log);
        if (hooks.on_checkpoint) hooks.on_checkpoint(make_checkpoint(cfg, model, &adam, epoch));

        const double monitored = monitor_test ? log.test_tau : log.train_tau;
        if (monitored > best) {
            best = monitored;
            best_params = snapshot(model.params());
            result.best_epoch = epoch;
            since_best = 0;
        } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
            break;
        }
    }

    restore(model.params(), best_params);
    result.best_tau = best;
    result.checkpoint = make_checkpoint(cfg, model, &adam, result.log.back().epoch);
    return result;
}

TrainResult train(const TrainingConfig& cfg, const TrainHooks& hooks, unsigned threads) {
    cfg.validate();
    auto graphs = prepare_graphs(load_training_graphs(cfg, threads), cfg.metric, threads);
    auto [train_idx, test_idx] = split_indices(graphs.size(), cfg.split, cfg.seed);
    std::vector<PreparedGraph> train_set, test_set;
    for (auto i : train_idx) train_set.push_back(std::move(graphs[i]));
    for (auto i : test_idx) test_set.push_back(std::move(graphs[i]));
    return train(cfg, train_set, test_set, hooks);
}

Predictor::Predictor(const Checkpoint& ckpt) : cfg_(ckpt.config) {
    cfg_.validate();
    model_ = std::make_unique<CentralityModel<float>>(cfg_.model_config());
    load_parameters(ckpt, *model_);
}

Predictor::~Predictor() = default;

std::vector<double> Predictor::scores(const Graph& g, std::uint64_t run) const {
    if (g.num_nodes() < 1) throw ParameterError("cannot predict on an empty graph");
    return model_->predict_scores(model_->prepare(g), eval_seed(cfg_, run));
}

RankingResult Predictor::predict(const Graph& g, const std::vector<double>* truth, std::uint64_t run) const {
    const auto t0 = Clock::now();
    RankingResult r;
    r.n = g.num_nodes();
    r.metric = cfg_.metric;
    r.scores = scores(g, run);
    r.seconds = seconds_since(t0);
    for (double s : r.scores)
        if (!std::isfinite(s)) throw NumericError("prediction produced a non-finite score");
    r.ranking = rank_of(r.scores);
    if (truth) {
        if (truth->size() != r.n) throw ParameterError("ground truth length does not match the graph");
        r.truth_ranking = rank_of(*truth);
        if (r.n >= 2) r.tau = kendall_tau(r.scores, *truth);
    }
    return r;
}

DenseMatrix embed_nodes(const Predictor& p, const Graph& g, std::uint64_t run) {
    const auto& model = p.model();
    const auto enc = model.encode(model.prepare(g), false, eval_seed(p.config(), run));
    DenseMatrix m{enc.h.rows(), enc.h.cols(), {}};
    m.data.assign(enc.h.values().begin(), enc.h.values().end());
    return m;
}

}  // namespace cnca
