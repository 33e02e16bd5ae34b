#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cnca/checkpoint.hpp"
#include "cnca/error.hpp"
#include "cnca/eval.hpp"
#include "cnca/generators.hpp"
#include "cnca/training.hpp"

using namespace cnca;

namespace {

PreparedGraph prepared(Graph g, CentralityKind kind, std::string name = "g") {
    std::vector<NamedGraph> one;
    one.push_back({std::move(name), std::move(g)});
    return std::move(prepare_graphs(std::move(one), kind).front());
}

TrainingConfig small_config(CentralityKind kind) {
    auto cfg = TrainingConfig::defaults_for(kind);
    cfg.features = FeatureTransform::basis;
    cfg.l2 = 0.0;
    cfg.lr = 0.01;
    cfg.batch_size = 16;
    cfg.embed_dim = 8;
    cfg.hidden_dim = 8;
    cfg.mlp_widths = {8};
    cfg.token_hidden = 4;
    cfg.channel_hidden = 8;
    cfg.head_hidden = 4;
    cfg.sage_samples = {4, 4};
    cfg.epochs = 4;
    cfg.patience = 0;
    cfg.split = 1.0;
    return cfg;
}

std::string bytes_of(const Checkpoint& c) {
    std::ostringstream s;
    write_checkpoint(s, c);
    return s.str();
}

}  // namespace

TEST_CASE("rank targets") {
    CHECK(build_targets(std::vector<double>{3, 1, 2}) == std::vector<double>{1.0, 0.0, 0.5});
    // Ties keep node order: all-equal input gives 0, 1/(N-1), ..., 1.
    CHECK(build_targets(std::vector<double>{5, 5, 5, 5, 5}) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK_THROWS_AS(build_targets(std::vector<double>{1}), ParameterError);
    auto g = generate({GeneratorModel::ba, 80, 2, 0, 0.0, 3});
    const auto c = closeness_all(g).values;
    const auto t = build_targets(c);
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j)
            if (c[i] > c[j]) CHECK(t[i] > t[j]);
}

TEST_CASE("split is seeded and covers every graph once") {
    const auto [tr, te] = split_indices(75, 0.8, 4);
    CHECK(tr.size() == 60);
    CHECK(te.size() == 15);
    std::vector<int> seen(75, 0);
    for (auto i : tr) ++seen[i];
    for (auto i : te) ++seen[i];
    for (int s : seen) CHECK(s == 1);
    CHECK(split_indices(75, 0.8, 4) == split_indices(75, 0.8, 4));
    CHECK(split_indices(10, 1.0, 1).second.empty());
}

TEST_CASE("training is reproducible and lowers the loss") {
    const auto g = prepared(generate({GeneratorModel::ws, 60, 0, 4, 0.1, 2}), CentralityKind::closeness);
    auto cfg = small_config(CentralityKind::closeness);
    cfg.epochs = 50;
    const auto a = train(cfg, std::span(&g, 1), {});
    const auto b = train(cfg, std::span(&g, 1), {});
    CHECK(bytes_of(a.checkpoint) == bytes_of(b.checkpoint));
    REQUIRE(a.log.size() == 50);
    CHECK(a.log.back().train_loss < a.log.front().train_loss);
    CHECK(std::isnan(a.log.front().test_tau));
    // The log records the rate the next step will use: max(lr0 * decay^steps, min).
    const std::size_t steps_per_epoch = (60 + cfg.batch_size - 1) / cfg.batch_size;
    const double expected = std::max(cfg.lr * std::pow(cfg.lr_decay, static_cast<double>(50 * steps_per_epoch)), cfg.lr_min);
    CHECK(a.log.back().lr == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("best parameters are the ones returned") {
    const auto g = prepared(generate({GeneratorModel::ba, 60, 2, 0, 0.0, 5}), CentralityKind::closeness);
    const auto cfg = small_config(CentralityKind::closeness);
    const auto r = train(cfg, std::span(&g, 1), {});
    const Predictor p(r.checkpoint);
    CHECK(*p.predict(g.graph, &g.centrality).tau == doctest::Approx(r.best_tau).epsilon(1e-12));
    double best = -2;
    for (const auto& l : r.log) best = std::max(best, l.train_tau);
    CHECK(r.best_tau == best);
}

TEST_CASE("graphsage and mixer train and predict inductively") {
    const auto g = prepared(generate({GeneratorModel::ba, 50, 2, 0, 0.0, 7}), CentralityKind::betweenness);
    const auto r = train(small_config(CentralityKind::betweenness), std::span(&g, 1), {});
    const Predictor p(r.checkpoint);
    const auto big = generate({GeneratorModel::ws, 700, 0, 4, 0.1, 8});
    const auto res = p.predict(big);
    CHECK(res.scores.size() == 700);
    for (double s : res.scores) CHECK(std::isfinite(s));
    CHECK(rank_of(res.scores) == res.ranking);
    // Same run, same samples.
    CHECK(p.scores(big, 3) == p.scores(big, 3));
}

TEST_CASE("checkpoint round trip") {
    const auto g = prepared(generate({GeneratorModel::ws, 40, 0, 4, 0.1, 9}), CentralityKind::closeness);
    const auto r = train(small_config(CentralityKind::closeness), std::span(&g, 1), {});
    const std::string bytes = bytes_of(r.checkpoint);
    std::istringstream in(bytes);
    const auto back = read_checkpoint(in);
    CHECK(bytes_of(back) == bytes);
    CHECK(back.config == r.checkpoint.config);
    CHECK(Predictor(back).scores(g.graph) == Predictor(r.checkpoint).scores(g.graph));

    std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_checkpoint(truncated), CheckpointError);
    std::istringstream garbage("not a checkpoint\n");
    CHECK_THROWS_AS(read_checkpoint(garbage), CheckpointError);
}

TEST_CASE("evaluate a perfect and a single-run report") {
    const auto g = prepared(generate({GeneratorModel::ba, 60, 2, 0, 0.0, 5}), CentralityKind::closeness);
    const auto r = train(small_config(CentralityKind::closeness), std::span(&g, 1), {});
    std::vector<EvalDataset> sets{{"ba60", g.graph, g.centrality}};
    const auto one = evaluate(r.checkpoint, sets, 1, 1);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.summary[0].mean_tau == one.rows[0].tau);
    const auto ten = evaluate(r.checkpoint, sets, 10, 1);
    CHECK(ten.rows.size() == 10);
    // VGAE inference is deterministic, so every run agrees.
    CHECK(ten.summary[0].sd_tau == 0.0);
    std::ostringstream out;
    write_eval_report(out, ten);
    CHECK(out.str().find("ba60\tcc\tmean\t") != std::string::npos);

    sets[0].truth.reset();
    CHECK_THROWS_AS(evaluate(r.checkpoint, sets, 1, 1), ParameterError);
}

TEST_CASE("ablation cells equal direct training") {
    const auto g = prepared(generate({GeneratorModel::ba, 40, 2, 0, 0.0, 6}), CentralityKind::betweenness);
    auto cfg = small_config(CentralityKind::betweenness);
    cfg.epochs = 2;
    const auto cells = ablation_mixer_orders(cfg, std::span(&g, 1), {}, {"tct", "ctct"}, {4, 8}, true);
    REQUIRE(cells.size() == 6);
    auto direct = cfg;
    direct.mixer_order = "ctct";
    direct.embed_dim = 8;
    CHECK(cells[3].tau == train(direct, std::span(&g, 1), {}).best_tau);
    CHECK(tau_spread(cells, DecoderKind::mlp) >= 0.0);
    CHECK_THROWS_AS(ablation_mixer_orders(cfg, std::span(&g, 1), {}, {"xx"}, {4}, false), ParameterError);
}

TEST_CASE("basis features") {
    auto g = generate({GeneratorModel::ba, 50, 2, 0, 0.0, 1});
    CHECK(feature_width(FeatureTransform::basis) == 5);
    CHECK(feature_width(FeatureTransform::raw) == 1);
    const auto f = encoder_features(g, FeatureTransform::basis);
    REQUIRE(f.cols == 5);
    for (std::size_t c = 0; c < 3; ++c) {
        double mean = 0;
        for (std::size_t r = 0; r < f.rows; ++r) mean += f(r, c);
        CHECK(std::abs(mean / f.rows) < 1e-12);
    }
    for (std::size_t c = 3; c < 5; ++c) {
        double mean = 0;
        for (std::size_t r = 0; r < f.rows; ++r) mean += f(r, c);
        CHECK(mean / f.rows == doctest::Approx(1.0));
    }
    const auto raw = encoder_features(g, FeatureTransform::raw);
    for (std::size_t r = 0; r < raw.rows; ++r) CHECK(raw(r, 0) == static_cast<double>(g.degree(static_cast<NodeId>(r))));
}
