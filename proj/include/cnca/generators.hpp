#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cnca/graph.hpp"

namespace cnca {

enum class GeneratorModel { ba, ws, plc };

std::string to_string(GeneratorModel model);
/// Accepts "ba", "ws", "plc" (case-insensitive); throws ParameterError otherwise.
GeneratorModel parse_generator_model(const std::string& name);

/// Parameters of one synthetic network.
///   ba:  n nodes, m edges per new node
///   ws:  n nodes, even ring degree k, rewiring probability p
///   plc: n nodes, m edges per new node, triad-closure probability p
struct GeneratorSpec {
    GeneratorModel model = GeneratorModel::ba;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t k = 0;
    double p = 0.0;
    std::uint64_t seed = 0;

    /// Throws ParameterError when the model's invariants do not hold.
    void validate() const;
};

/// Pure function of spec. Edge counts: ba and plc (n-m)*m, ws n*k/2.
Graph generate(const GeneratorSpec& spec);

struct CorpusSpec {
    std::size_t count = 600;
    std::size_t n_min = 100;
    std::size_t n_max = 1000;
    double ws_fraction = 0.5;
    std::uint64_t seed = 1;
};

struct CorpusGraph {
    GeneratorSpec spec;
    Graph graph;
};

/// Per-graph generator specs: graph i uses seed derive_seed(master, i); its
/// model, size and model parameters are drawn from a stream seeded by that
/// seed. The first round(count * ws_fraction) graphs are WS, the rest BA.
/// WS: k in {4,6,8}, p = 0.1. BA: m in {2,3,4}.
std::vector<GeneratorSpec> corpus_specs(const CorpusSpec& spec);

/// Generates every graph of corpus_specs; `threads` workers, output independent of it.
std::vector<CorpusGraph> generate_corpus(const CorpusSpec& spec, unsigned threads = 1);

}  // namespace cnca
