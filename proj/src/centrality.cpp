#include "cnca/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "cnca/error.hpp"

namespace cnca {

std::string to_string(CentralityKind kind) {
    switch (kind) {
        case CentralityKind::degree: return "dc";
        case CentralityKind::closeness: return "cc";
        case CentralityKind::betweenness: return "bc";
    }
    return "?";
}

CentralityKind parse_centrality_kind(const std::string& name) {
    if (name == "dc" || name == "degree") return CentralityKind::degree;
    if (name == "cc" || name == "closeness") return CentralityKind::closeness;
    if (name == "bc" || name == "betweenness") return CentralityKind::betweenness;
    throw ParameterError("unknown centrality metric '" + name + "' (expected dc, cc or bc)");
}

CentralityVector degree_all(const Graph& g) {
    CentralityVector c{std::vector<double>(g.num_nodes()), CentralityKind::degree, {}};
    for (NodeId v = 0; v < g.num_nodes(); ++v) c.values[v] = static_cast<double>(g.degree(v));
    return c;
}

namespace {

constexpr std::size_t kSourceBlock = 64;
constexpr std::uint32_t kUnreached = UINT32_MAX;

// Runs body(block_index, partial) for every block of sources; partial vectors
// are summed into the result in block order.
template <class Body>
std::vector<double> blocked_sources(std::size_t n, unsigned threads, Body body) {
    const std::size_t blocks = (n + kSourceBlock - 1) / kSourceBlock;
    std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
    auto work = [&](unsigned w) {
        for (std::size_t b = w; b < blocks; b += workers) body(b, partial[b]);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    std::vector<double> total(n, 0.0);
    for (const auto& p : partial)
        for (std::size_t i = 0; i < n; ++i) total[i] += p[i];
    return total;
}

}  // namespace

CentralityVector closeness_all(const Graph& g, unsigned threads) {
    const std::size_t n = g.num_nodes();
    if (n < 2) throw ParameterError("closeness requires at least 2 nodes");
    CentralityVector c{std::vector<double>(n, 0.0), CentralityKind::closeness, {}};

    // Each source writes only its own entry, so blocks need no merging.
    const std::size_t blocks = (n + kSourceBlock - 1) / kSourceBlock;
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
    auto work = [&](unsigned w) {
        std::vector<std::uint32_t> dist(n, kUnreached);
        std::vector<NodeId> queue(n);
        for (std::size_t b = w; b < blocks; b += workers) {
            for (std::size_t s = b * kSourceBlock; s < std::min(n, (b + 1) * kSourceBlock); ++s) {
                std::fill(dist.begin(), dist.end(), kUnreached);
                std::size_t head = 0, tail = 0;
                queue[tail++] = static_cast<NodeId>(s);
                dist[s] = 0;
                std::uint64_t total = 0;
                while (head < tail) {
                    const NodeId u = queue[head++];
                    total += dist[u];
                    for (NodeId v : g.neighbors(u))
                        if (dist[v] == kUnreached) {
                            dist[v] = dist[u] + 1;
                            queue[tail++] = v;
                        }
                }
                c.values[s] = total == 0 ? 0.0 : static_cast<double>(tail - 1) / static_cast<double>(total);
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    return c;
}

CentralityVector betweenness_all(const Graph& g, unsigned threads) {
    const std::size_t n = g.num_nodes();
    if (n < 3) throw ParameterError("betweenness requires at least 3 nodes");

    auto raw = blocked_sources(n, threads, [&](std::size_t block, std::vector<double>& acc) {
        std::vector<std::uint32_t> dist(n);
        std::vector<double> sigma(n), delta(n);
        std::vector<NodeId> order(n);
        for (std::size_t s = block * kSourceBlock; s < std::min(n, (block + 1) * kSourceBlock); ++s) {
            std::fill(dist.begin(), dist.end(), kUnreached);
            std::fill(sigma.begin(), sigma.end(), 0.0);
            std::size_t head = 0, tail = 0;
            order[tail++] = static_cast<NodeId>(s);
            dist[s] = 0;
            sigma[s] = 1.0;
            while (head < tail) {
                const NodeId u = order[head++];
                for (NodeId v : g.neighbors(u)) {
                    if (dist[v] == kUnreached) {
                        dist[v] = dist[u] + 1;
                        order[tail++] = v;
                    }
                    if (dist[v] == dist[u] + 1) sigma[v] += sigma[u];
                }
            }
            // Predecessors are recovered from distances instead of stored lists.
            for (std::size_t i = 0; i < tail; ++i) delta[order[i]] = 0.0;
            for (std::size_t i = tail; i-- > 1;) {
                const NodeId w = order[i];
                const double coeff = (1.0 + delta[w]) / sigma[w];
                for (NodeId v : g.neighbors(w))
                    if (dist[v] + 1 == dist[w]) delta[v] += sigma[v] * coeff;
                acc[w] += delta[w];
            }
        }
    });

    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
    for (double& x : raw) x *= scale;
    return {std::move(raw), CentralityKind::betweenness, {}};
}

CentralityVector brute_force_betweenness(const Graph& g) {
    const std::size_t n = g.num_nodes();
    if (n < 3) throw ParameterError("betweenness requires at least 3 nodes");
    if (n > 200) throw ParameterError("brute-force betweenness is limited to 200 nodes");

    std::vector<std::vector<std::uint32_t>> dist(n, std::vector<std::uint32_t>(n, kUnreached));
    std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
    for (NodeId s = 0; s < n; ++s) {
        std::vector<NodeId> frontier{s}, next;
        dist[s][s] = 0;
        sigma[s][s] = 1.0;
        std::uint32_t level = 0;
        while (!frontier.empty()) {
            next.clear();
            for (NodeId u : frontier)
                for (NodeId v : g.neighbors(u)) {
                    if (dist[s][v] == kUnreached) {
                        dist[s][v] = level + 1;
                        next.push_back(v);
                    }
                    if (dist[s][v] == level + 1) sigma[s][v] += sigma[s][u];
                }
            frontier.swap(next);
            ++level;
        }
    }

    std::vector<double> b(n, 0.0);
    for (NodeId s = 0; s < n; ++s)
        for (NodeId t = 0; t < n; ++t) {
            if (s == t || dist[s][t] == kUnreached) continue;
            for (NodeId w = 0; w < n; ++w) {
                if (w == s || w == t || dist[s][w] == kUnreached || dist[w][t] == kUnreached) continue;
                if (dist[s][w] + dist[w][t] == dist[s][t]) b[w] += sigma[s][w] * sigma[w][t] / sigma[s][t];
            }
        }
    const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
    for (double& x : b) x *= scale;
    return {std::move(b), CentralityKind::betweenness, {}};
}

std::vector<std::size_t> rank_of(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<std::size_t> rank(values.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos;
    return rank;
}

}  // namespace cnca
