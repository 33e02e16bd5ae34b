#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnca/centrality.hpp"
#include "cnca/checkpoint.hpp"
#include "cnca/config.hpp"
#include "cnca/graph.hpp"
#include "cnca/metrics.hpp"

namespace cnca {

/// t_i = (ascending rank position of c_i, ties by node index) / (N - 1), so
/// the most central node gets 1 and the least central 0. Requires N >= 2.
std::vector<double> build_targets(std::span<const double> centrality);

/// Exact centrality of the requested kind.
CentralityVector exact_centrality(const Graph& g, CentralityKind kind, unsigned threads = 1);

struct NamedGraph {
    std::string name;
    Graph graph;
};

/// A graph with its exact centrality and regression targets.
struct PreparedGraph {
    std::string name;
    Graph graph;
    std::vector<double> centrality;
    std::vector<double> targets;
};

/// The corpus a config describes: its edge-list files, or else the generated corpus.
std::vector<NamedGraph> load_training_graphs(const TrainingConfig& cfg, unsigned threads = 1);

/// Exact centralities and targets for every graph, computed in parallel.
std::vector<PreparedGraph> prepare_graphs(std::vector<NamedGraph> graphs, CentralityKind kind, unsigned threads = 1);

/// Indices of training and held-out graphs: a seeded shuffle, the first
/// round(split * count) (at least one) for training.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t count, double split,
                                                                           std::uint64_t seed);

struct EpochLog {
    std::size_t epoch = 0;
    /// Mean over the epoch's steps of ranking MSE (+ VGAE terms) + l2 * ||W||^2.
    double train_loss = 0.0;
    /// Mean Kendall tau-b of predictions against exact centralities.
    double train_tau = 0.0;
    /// NaN when nothing is held out.
    double test_tau = 0.0;
    double lr = 0.0;
    double seconds = 0.0;
};

struct TrainHooks {
    std::function<void(const EpochLog&)> on_epoch;
    /// Called after every epoch with the current state.
    std::function<void(const Checkpoint&)> on_checkpoint;
};

struct TrainResult {
    /// Parameters from the epoch with the best monitored tau.
    Checkpoint checkpoint;
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0;
    double best_tau = 0.0;
    std::vector<std::string> train_graphs;
    std::vector<std::string> test_graphs;
};

/**
 * Trains a model on prepared graphs.
 *
 * Each epoch visits the training graphs in a seeded random order; each
 * graph's nodes are shuffled and cut into batches of B, and every batch is
 * one optimiser step. A step encodes the whole graph, gathers the batch's
 * rows (padding them to B for the mixer), and minimises the masked MSE
 * against the rank targets, plus vgae_weight * (reconstruction + KL) for a
 * jointly trained VGAE. The L2 term enters through the optimiser.
 *
 * After every epoch the model is scored on the held-out graphs (on the
 * training graphs when none are held out); training stops after `patience`
 * epochs without improvement and the best parameters are returned.
 * Throws NumericError when a loss or gradient becomes non-finite.
 */
TrainResult train(const TrainingConfig& cfg, std::span<const PreparedGraph> train_set,
                  std::span<const PreparedGraph> test_set, const TrainHooks& hooks = {});

/// Loads, prepares and splits the config's corpus, then trains.
TrainResult train(const TrainingConfig& cfg, const TrainHooks& hooks = {}, unsigned threads = 1);

struct RankingResult {
    std::size_t n = 0;
    CentralityKind metric = CentralityKind::closeness;
    std::vector<double> scores;
    /// rank_of(scores).
    std::vector<std::size_t> ranking;
    std::optional<std::vector<std::size_t>> truth_ranking;
    std::optional<double> tau;
    double seconds = 0.0;
};

/// A model restored from a checkpoint, for repeated prediction.
class Predictor {
public:
    explicit Predictor(const Checkpoint& ckpt);
    ~Predictor();
    Predictor(const Predictor&) = delete;
    Predictor& operator=(const Predictor&) = delete;

    const TrainingConfig& config() const noexcept { return cfg_; }

    /// Scores every node. `run` selects the GraphSAGE neighbour samples
    /// (run 0 is the sampling used during training-time evaluation).
    std::vector<double> scores(const Graph& g, std::uint64_t run = 0) const;

    /// Scores plus ranking; with ground truth, also its ranking and tau-b.
    RankingResult predict(const Graph& g, const std::vector<double>* truth = nullptr, std::uint64_t run = 0) const;

    const CentralityModel<float>& model() const noexcept { return *model_; }

private:
    TrainingConfig cfg_;
    std::unique_ptr<CentralityModel<float>> model_;
};

/// Seed of the neighbour samples used for evaluation run `run`.
std::uint64_t eval_seed(const TrainingConfig& cfg, std::uint64_t run);

/// Mean tau-b of a model's predictions over graphs; 0 for an empty list.
double mean_tau(const CentralityModel<float>& model, const TrainingConfig& cfg, std::span<const PreparedGraph> graphs);

/// Final-layer embeddings (eval mode) as a dense matrix.
DenseMatrix embed_nodes(const Predictor& p, const Graph& g, std::uint64_t run = 0);

}  // namespace cnca
