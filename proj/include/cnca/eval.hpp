#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnca/centrality.hpp"
#include "cnca/checkpoint.hpp"
#include "cnca/config.hpp"
#include "cnca/graph.hpp"
#include "cnca/training.hpp"

namespace cnca {

/// A graph to evaluate on, with the exact centrality of the checkpoint's metric.
struct EvalDataset {
    std::string name;
    Graph graph;
    std::optional<std::vector<double>> truth;
};

struct EvalRow {
    std::string dataset;
    std::size_t run = 0;
    double tau = 0.0;
    /// Wall-clock seconds for the prediction alone.
    double seconds = 0.0;
};

struct DatasetSummary {
    std::string dataset;
    std::size_t nodes = 0;
    double mean_tau = 0.0;
    double min_tau = 0.0;
    double max_tau = 0.0;
    double sd_tau = 0.0;
    double seconds = 0.0;
};

struct EvalReport {
    CentralityKind metric = CentralityKind::closeness;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    /// Dataset-major, then run.
    std::vector<EvalRow> rows;
    /// One entry per dataset, in input order.
    std::vector<DatasetSummary> summary;
    double seconds_total = 0.0;
};

/// Run `r` samples neighbours with eval_seed(cfg, derive_seed(seed, r)).
std::uint64_t eval_run_key(std::uint64_t seed, std::size_t run);

/**
 * Predicts every dataset `runs` times and scores each against its exact
 * centrality. Datasets run in parallel; the result does not depend on
 * `threads`. Throws ParameterError when a dataset lacks ground truth.
 */
EvalReport evaluate(const Checkpoint& ckpt, std::span<const EvalDataset> datasets, std::size_t runs,
                    std::uint64_t seed, unsigned threads = 1);

/// Tab-separated rows "dataset metric run tau seconds", a mean row per
/// dataset (run column "mean"), then '#'-prefixed summary lines.
void write_eval_report(std::ostream& out, const EvalReport& report);

struct AblationCell {
    DecoderKind decoder = DecoderKind::mixer;
    /// Mixer order, "-" for the MLP.
    std::string order;
    std::size_t embed_dim = 0;
    /// Mean tau-b over the held-out graphs (the training graphs when none are
    /// held out) for the best epoch's parameters.
    double tau = 0.0;
    std::size_t best_epoch = 0;
    double seconds = 0.0;
};

/**
 * Trains and scores one model per (order, F), plus one MLP model per F when
 * `include_mlp`. Every cell shares the base config's seed and data, so a cell
 * equals a direct train() with the same overrides.
 */
std::vector<AblationCell> ablation_mixer_orders(const TrainingConfig& base, std::span<const PreparedGraph> train_set,
                                                std::span<const PreparedGraph> test_set,
                                                const std::vector<std::string>& orders,
                                                const std::vector<std::size_t>& dims, bool include_mlp);

/// max - min of the cells' tau for one decoder (and order, unless empty).
double tau_spread(std::span<const AblationCell> cells, DecoderKind decoder, const std::string& order = "");

/// Long-form table: "decoder order embed_dim tau best_epoch seconds".
void write_ablation_table(std::ostream& out, std::span<const AblationCell> cells);

}  // namespace cnca
