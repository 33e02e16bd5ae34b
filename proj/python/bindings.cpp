// Python bindings: graphs, exact centralities, Kendall tau, training and prediction.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cnca/centrality.hpp"
#include "cnca/checkpoint.hpp"
#include "cnca/cli.hpp"
#include "cnca/config.hpp"
#include "cnca/error.hpp"
#include "cnca/generators.hpp"
#include "cnca/graph.hpp"
#include "cnca/metrics.hpp"
#include "cnca/training.hpp"

namespace py = pybind11;
using namespace cnca;

namespace {

TrainingConfig config_from(const std::string& metric, const std::map<std::string, std::string>& overrides) {
    auto cfg = TrainingConfig::defaults_for(parse_centrality_kind(metric));
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Centrality ranking with inductive graph embeddings";
    m.attr("__version__") = version();

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<CheckpointError>(m, "CheckpointError", PyExc_IOError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<Graph>(m, "Graph")
        .def_static(
            "from_edges",
            [](std::size_t n, const std::vector<Edge>& edges) { return Graph::from_edges(n, edges); },
            py::arg("n"), py::arg("edges"))
        .def_static(
            "read", [](const std::string& path) { return read_edge_list(path); }, py::arg("path"))
        .def_static(
            "parse",
            [](const std::string& text) {
                std::istringstream in(text);
                return parse_edge_list(in);
            },
            py::arg("text"))
        .def_property_readonly("num_nodes", &Graph::num_nodes)
        .def_property_readonly("num_edges", &Graph::num_edges)
        .def("degree", &Graph::degree)
        .def("neighbors", [](const Graph& g, NodeId v) {
            auto s = g.neighbors(v);
            return std::vector<NodeId>(s.begin(), s.end());
        })
        .def("edges", &Graph::edges)
        .def("__repr__", [](const Graph& g) {
            return "<Graph n=" + std::to_string(g.num_nodes()) + " m=" + std::to_string(g.num_edges()) + ">";
        });

    m.def(
        "generate",
        [](const std::string& model, std::size_t n, std::size_t m_, std::size_t k, double p, std::uint64_t seed) {
            return generate({parse_generator_model(model), n, m_, k, p, seed});
        },
        py::arg("model"), py::arg("n"), py::arg("m") = 0, py::arg("k") = 0, py::arg("p") = 0.0,
        py::arg("seed") = 1);

    m.def("degree", [](const Graph& g) { return degree_all(g).values; });
    m.def("closeness", [](const Graph& g, unsigned threads) { return closeness_all(g, threads).values; },
          py::arg("graph"), py::arg("threads") = 1);
    m.def("betweenness", [](const Graph& g, unsigned threads) { return betweenness_all(g, threads).values; },
          py::arg("graph"), py::arg("threads") = 1);
    m.def("rank_of", [](const std::vector<double>& v) { return rank_of(v); });
    m.def("build_targets", [](const std::vector<double>& v) { return build_targets(v); });
    m.def(
        "kendall_tau",
        [](const std::vector<double>& x, const std::vector<double>& y, const std::string& mode) {
            if (mode != "a" && mode != "b") throw ParameterError("mode must be 'a' or 'b'");
            return kendall_tau(x, y, mode == "a" ? TauMode::a : TauMode::b);
        },
        py::arg("x"), py::arg("y"), py::arg("mode") = "b");

    py::class_<Checkpoint>(m, "Checkpoint")
        .def_static("load", [](const std::string& path) { return load_checkpoint(path); })
        .def("save", [](const Checkpoint& c, const std::string& path) { save_checkpoint(path, c); })
        .def_readonly("epoch", &Checkpoint::epoch)
        .def_property_readonly("config", [](const Checkpoint& c) {
            std::map<std::string, std::string> kv;
            for (auto& [k, v] : c.config.to_kv()) kv[k] = v;
            return kv;
        });

    m.def(
        "train",
        [](const std::vector<Graph>& graphs, const std::string& metric,
           const std::map<std::string, std::string>& overrides) {
            const auto cfg = config_from(metric, overrides);
            std::vector<NamedGraph> named;
            for (std::size_t i = 0; i < graphs.size(); ++i) named.push_back({"g" + std::to_string(i), graphs[i]});
            TrainResult r;
            {
                py::gil_scoped_release release;
                auto prepared = prepare_graphs(std::move(named), cfg.metric);
                const auto [tr, te] = split_indices(prepared.size(), cfg.split, cfg.seed);
                std::vector<PreparedGraph> a, b;
                for (auto i : tr) a.push_back(prepared[i]);
                for (auto i : te) b.push_back(prepared[i]);
                r = train(cfg, a, b);
            }
            py::list log;
            for (const auto& l : r.log)
                log.append(py::dict(py::arg("epoch") = l.epoch, py::arg("train_loss") = l.train_loss,
                                    py::arg("train_tau") = l.train_tau, py::arg("test_tau") = l.test_tau,
                                    py::arg("lr") = l.lr));
            return py::make_tuple(r.checkpoint, log, r.best_tau);
        },
        py::arg("graphs"), py::arg("metric") = "cc", py::arg("config") = std::map<std::string, std::string>{},
        "Trains on the given graphs; returns (checkpoint, per-epoch log, best tau).");

    m.def(
        "predict",
        [](const Checkpoint& ckpt, const Graph& g, std::uint64_t run) {
            py::gil_scoped_release release;
            return Predictor(ckpt).scores(g, run);
        },
        py::arg("checkpoint"), py::arg("graph"), py::arg("run") = 0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs one command line; returns (exit code, stdout, stderr).");
}
