#include "cnca/generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <thread>

#include "cnca/error.hpp"
#include "cnca/rng.hpp"

namespace cnca {

std::string to_string(GeneratorModel model) {
    switch (model) {
        case GeneratorModel::ba: return "ba";
        case GeneratorModel::ws: return "ws";
        case GeneratorModel::plc: return "plc";
    }
    return "?";
}

GeneratorModel parse_generator_model(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "ba") return GeneratorModel::ba;
    if (lower == "ws") return GeneratorModel::ws;
    if (lower == "plc") return GeneratorModel::plc;
    throw ParameterError("unknown generator model '" + name + "' (expected ba, ws or plc)");
}

void GeneratorSpec::validate() const {
    const auto fail = [&](const std::string& why) {
        throw ParameterError(to_string(model) + " generator: " + why);
    };
    switch (model) {
        case GeneratorModel::ba:
        case GeneratorModel::plc:
            if (m < 1 || m >= n) fail("require 1 <= m < n (m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
            if (model == GeneratorModel::plc && !(p >= 0.0 && p <= 1.0)) fail("require 0 <= p <= 1");
            break;
        case GeneratorModel::ws:
            if (k == 0 || k % 2 != 0 || k >= n) fail("require even 0 < k < n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
            if (!(p >= 0.0 && p <= 1.0)) fail("require 0 <= p <= 1");
            break;
    }
}

namespace {

// Adjacency sets keep rewiring and duplicate checks simple; generated graphs are small.
using AdjacencySets = std::vector<std::set<NodeId>>;

Graph to_graph(const AdjacencySets& adj) {
    std::vector<Edge> edges;
    for (NodeId u = 0; u < adj.size(); ++u)
        for (NodeId v : adj[u])
            if (u < v) edges.emplace_back(u, v);
    return Graph::from_edges(adj.size(), edges);
}

// Growth shared by BA and PLC. The urn holds each endpoint once per incident
// edge, plus the m seed nodes once so that the first new node can attach.
Graph grow(const GeneratorSpec& spec, bool triad_closure) {
    Rng rng(spec.seed);
    const std::size_t n = spec.n, m = spec.m;
    AdjacencySets adj(n);
    std::vector<NodeId> urn;
    urn.reserve(2 * n * m);

    // The first new node connects to all m seeds.
    for (NodeId s = 0; s < m; ++s) {
        adj[m].insert(s);
        adj[s].insert(static_cast<NodeId>(m));
        urn.push_back(s);
        urn.push_back(static_cast<NodeId>(m));
    }

    std::vector<NodeId> targets;
    for (NodeId v = static_cast<NodeId>(m + 1); v < n; ++v) {
        targets.clear();
        auto chosen = [&](NodeId t) { return std::find(targets.begin(), targets.end(), t) != targets.end(); };
        while (targets.size() < m) {
            const NodeId t = urn[rng.uniform_below(urn.size())];
            if (chosen(t)) continue;
            targets.push_back(t);
            if (triad_closure && targets.size() < m && rng.bernoulli(spec.p)) {
                std::vector<NodeId> candidates;
                for (NodeId w : adj[t])
                    if (w != v && !chosen(w)) candidates.push_back(w);
                if (!candidates.empty()) targets.push_back(candidates[rng.uniform_below(candidates.size())]);
            }
        }
        for (NodeId t : targets) {
            adj[v].insert(t);
            adj[t].insert(v);
            urn.push_back(v);
            urn.push_back(t);
        }
    }
    return to_graph(adj);
}

Graph watts_strogatz(const GeneratorSpec& spec) {
    Rng rng(spec.seed);
    const std::size_t n = spec.n, half = spec.k / 2;
    AdjacencySets adj(n);
    for (NodeId u = 0; u < n; ++u)
        for (std::size_t j = 1; j <= half; ++j) {
            const auto v = static_cast<NodeId>((u + j) % n);
            adj[u].insert(v);
            adj[v].insert(u);
        }
    // Rewire lattice edge (u, u+j) to (u, w) with probability p, visiting
    // edges ring-distance first. A node already adjacent to everything keeps its edge.
    for (std::size_t j = 1; j <= half; ++j)
        for (NodeId u = 0; u < n; ++u) {
            if (!rng.bernoulli(spec.p)) continue;
            const auto v = static_cast<NodeId>((u + j) % n);
            if (!adj[u].contains(v) || adj[u].size() >= n - 1) continue;
            NodeId w;
            do {
                w = static_cast<NodeId>(rng.uniform_below(n));
            } while (w == u || adj[u].contains(w));
            adj[u].erase(v);
            adj[v].erase(u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    return to_graph(adj);
}

}  // namespace

Graph generate(const GeneratorSpec& spec) {
    spec.validate();
    switch (spec.model) {
        case GeneratorModel::ba: return grow(spec, false);
        case GeneratorModel::plc: return grow(spec, true);
        case GeneratorModel::ws: return watts_strogatz(spec);
    }
    throw ParameterError("unhandled generator model");
}

std::vector<GeneratorSpec> corpus_specs(const CorpusSpec& spec) {
    if (spec.count < 1) throw ParameterError("corpus count must be >= 1");
    if (spec.n_min < 10) throw ParameterError("corpus n_min must be >= 10");
    if (spec.n_min > spec.n_max) throw ParameterError("empty corpus size range");
    if (!(spec.ws_fraction >= 0.0 && spec.ws_fraction <= 1.0))
        throw ParameterError("corpus WS fraction must lie in [0, 1]");

    const auto ws_count = static_cast<std::size_t>(std::llround(spec.ws_fraction * static_cast<double>(spec.count)));
    std::vector<GeneratorSpec> specs(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        GeneratorSpec& g = specs[i];
        g.seed = derive_seed(spec.seed, i);
        Rng draw(splitmix64(g.seed));
        g.n = spec.n_min + draw.uniform_below(spec.n_max - spec.n_min + 1);
        if (i < ws_count) {
            g.model = GeneratorModel::ws;
            g.k = 4 + 2 * draw.uniform_below(3);
            g.p = 0.1;
        } else {
            g.model = GeneratorModel::ba;
            g.m = 2 + draw.uniform_below(3);
        }
    }
    return specs;
}

std::vector<CorpusGraph> generate_corpus(const CorpusSpec& spec, unsigned threads) {
    const auto specs = corpus_specs(spec);
    std::vector<CorpusGraph> out(specs.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(specs.size())));
    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < specs.size(); i += workers) out[i] = {specs[i], generate(specs[i])};
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    return out;
}

}  // namespace cnca
