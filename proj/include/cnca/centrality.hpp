#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cnca/graph.hpp"

namespace cnca {

enum class CentralityKind { degree, closeness, betweenness };

std::string to_string(CentralityKind kind);
/// "dc"/"degree", "cc"/"closeness", "bc"/"betweenness".
CentralityKind parse_centrality_kind(const std::string& name);

struct CentralityVector {
    std::vector<double> values;
    CentralityKind kind = CentralityKind::degree;
    std::string graph_id;

    std::size_t size() const noexcept { return values.size(); }
};

/// Raw degree of every node.
CentralityVector degree_all(const Graph& g);

/// Closeness restricted to each node's connected component:
///   c(i) = (r_i - 1) / sum_{j reachable from i, j != i} dist(i, j)
/// where r_i is the component size. Nodes in singleton components get 0. On a
/// connected graph this is (N - 1) / sum of distances. Requires n >= 2.
CentralityVector closeness_all(const Graph& g, unsigned threads = 1);

/// Normalised betweenness over ordered pairs,
///   b(w) = 1/(N(N-1)) * sum_{s != w != t} sigma_st(w) / sigma_st,
/// by Brandes dependency accumulation. Unreachable pairs contribute 0.
/// Sources are processed in fixed blocks whose partial sums are merged in
/// block order, so the result is bit-identical for any thread count.
/// Requires n >= 3.
CentralityVector betweenness_all(const Graph& g, unsigned threads = 1);

/// Test oracle with the same contract as betweenness_all. Builds all-pairs
/// distance and path-count tables by BFS, then sums
/// sigma_sw * sigma_wt / sigma_st over every w on a shortest s-t path.
/// Refuses graphs with more than 200 nodes.
CentralityVector brute_force_betweenness(const Graph& g);

/// Rank positions, 0 = largest value; equal values are ordered by node index.
std::vector<std::size_t> rank_of(const std::vector<double>& values);
inline std::vector<std::size_t> rank_of(const CentralityVector& c) { return rank_of(c.values); }

}  // namespace cnca
