#include "cnca/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "cnca/error.hpp"
#include "cnca/metrics.hpp"
#include "cnca/parallel.hpp"
#include "cnca/rng.hpp"

namespace cnca {

namespace {

using Clock = std::chrono::steady_clock;

std::string millis(double seconds) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", seconds);
    return buf;
}

}  // namespace

std::uint64_t eval_run_key(std::uint64_t seed, std::size_t run) { return derive_seed(seed, run); }

EvalReport evaluate(const Checkpoint& ckpt, std::span<const EvalDataset> datasets, std::size_t runs,
                    std::uint64_t seed, unsigned threads) {
    if (runs < 1) throw ParameterError("evaluate needs at least one run");
    for (const auto& d : datasets) {
        if (!d.truth) throw ParameterError("dataset '" + d.name + "' has no ground truth");
        if (d.truth->size() != d.graph.num_nodes())
            throw ParameterError("dataset '" + d.name + "': ground truth length does not match the graph");
        if (d.graph.num_nodes() < 2) throw ParameterError("dataset '" + d.name + "' has fewer than 2 nodes");
    }

    const auto t0 = Clock::now();
    const Predictor predictor(ckpt);
    std::vector<std::vector<EvalRow>> per_dataset(datasets.size());
    parallel_for(datasets.size(), threads, [&](std::size_t i) {
        const auto& d = datasets[i];
        for (std::size_t r = 0; r < runs; ++r) {
            const auto res = predictor.predict(d.graph, &*d.truth, eval_run_key(seed, r));
            per_dataset[i].push_back({d.name, r, *res.tau, res.seconds});
        }
    });

    EvalReport report;
    report.metric = ckpt.config.metric;
    report.runs = runs;
    report.seed = seed;
    report.config_hash = config_hash(ckpt.config);
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        DatasetSummary s;
        s.dataset = datasets[i].name;
        s.nodes = datasets[i].graph.num_nodes();
        s.min_tau = std::numeric_limits<double>::infinity();
        s.max_tau = -std::numeric_limits<double>::infinity();
        for (const auto& row : per_dataset[i]) {
            s.mean_tau += row.tau;
            s.min_tau = std::min(s.min_tau, row.tau);
            s.max_tau = std::max(s.max_tau, row.tau);
            s.seconds += row.seconds;
        }
        s.mean_tau /= static_cast<double>(runs);
        double var = 0.0;
        for (const auto& row : per_dataset[i]) var += (row.tau - s.mean_tau) * (row.tau - s.mean_tau);
        s.sd_tau = std::sqrt(var / static_cast<double>(runs));
        report.summary.push_back(s);
        report.rows.insert(report.rows.end(), per_dataset[i].begin(), per_dataset[i].end());
    }
    report.seconds_total = std::chrono::duration<double>(Clock::now() - t0).count();
    return report;
}

void write_eval_report(std::ostream& out, const EvalReport& report) {
    const std::string metric = to_string(report.metric);
    out << "dataset\tmetric\trun\ttau\tseconds\n";
    std::size_t row = 0;
    for (const auto& s : report.summary) {
        for (std::size_t r = 0; r < report.runs; ++r, ++row) {
            const auto& e = report.rows[row];
            out << e.dataset << '\t' << metric << '\t' << e.run << '\t' << format_double(e.tau) << '\t'
                << millis(e.seconds) << '\n';
        }
        out << s.dataset << '\t' << metric << "\tmean\t" << format_double(s.mean_tau) << '\t' << millis(s.seconds)
            << '\n';
    }
    out << "# config_hash\t" << report.config_hash << '\n';
    out << "# metric\t" << metric << '\n';
    out << "# runs\t" << report.runs << '\n';
    out << "# seed\t" << report.seed << '\n';
    for (const auto& s : report.summary)
        out << "# dataset\t" << s.dataset << "\tnodes=" << s.nodes << "\tmean=" << format_double(s.mean_tau)
            << "\tsd=" << format_double(s.sd_tau) << "\tmin=" << format_double(s.min_tau)
            << "\tmax=" << format_double(s.max_tau) << '\n';
    out << "# seconds_total\t" << millis(report.seconds_total) << '\n';
}

std::vector<AblationCell> ablation_mixer_orders(const TrainingConfig& base, std::span<const PreparedGraph> train_set,
                                                std::span<const PreparedGraph> test_set,
                                                const std::vector<std::string>& orders,
                                                const std::vector<std::size_t>& dims, bool include_mlp) {
    for (const auto& o : orders) parse_mixer_order(o);
    std::vector<AblationCell> cells;
    auto run_cell = [&](DecoderKind decoder, const std::string& order, std::size_t dim) {
        TrainingConfig cfg = base;
        cfg.decoder = decoder;
        if (decoder == DecoderKind::mixer) cfg.mixer_order = order;
        cfg.embed_dim = dim;
        const auto t0 = Clock::now();
        const auto result = train(cfg, train_set, test_set);
        AblationCell c;
        c.decoder = decoder;
        c.order = decoder == DecoderKind::mixer ? order : "-";
        c.embed_dim = dim;
        c.tau = result.best_tau;
        c.best_epoch = result.best_epoch;
        c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        cells.push_back(c);
    };
    for (const auto& o : orders)
        for (auto d : dims) run_cell(DecoderKind::mixer, o, d);
    if (include_mlp)
        for (auto d : dims) run_cell(DecoderKind::mlp, "", d);
    return cells;
}

double tau_spread(std::span<const AblationCell> cells, DecoderKind decoder, const std::string& order) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : cells) {
        if (c.decoder != decoder || (!order.empty() && c.order != order)) continue;
        lo = std::min(lo, c.tau);
        hi = std::max(hi, c.tau);
    }
    if (lo > hi) throw ParameterError("no ablation cells for the requested decoder");
    return hi - lo;
}

void write_ablation_table(std::ostream& out, std::span<const AblationCell> cells) {
    out << "decoder\torder\tembed_dim\ttau\tbest_epoch\tseconds\n";
    for (const auto& c : cells)
        out << to_string(c.decoder) << '\t' << c.order << '\t' << c.embed_dim << '\t' << format_double(c.tau) << '\t'
            << c.best_epoch << '\t' << millis(c.seconds) << '\n';
}

}  // namespace cnca
