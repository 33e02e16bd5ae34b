#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cnca {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/**
 * Immutable undirected simple graph in CSR form.
 *
 * Every undirected edge is counted once in num_edges() and stored in both
 * endpoints' neighbour lists, which are sorted ascending. Self-loops and
 * duplicate edges are removed on construction.
 */
class Graph {
public:
    Graph() = default;

    /// Builds from an edge list over nodes 0..n-1. Self-loops and repeated
    /// edges (in either orientation) are dropped. Optional labels must have
    /// exactly n entries.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                            std::vector<std::string> labels = {});

    std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_edges() const noexcept { return adjacency_.size() / 2; }

    /// Sorted neighbours of v; throws std::out_of_range for v >= num_nodes().
    std::span<const NodeId> neighbors(NodeId v) const;

    std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

    std::span<const std::size_t> offsets() const noexcept { return offsets_; }
    std::span<const NodeId> adjacency() const noexcept { return adjacency_; }

    /// External label of v; the decimal index when the graph carries no labels.
    std::string label(NodeId v) const;
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Undirected edges as (u, v) with u < v, in CSR order.
    std::vector<Edge> edges() const;

    bool has_edge(NodeId u, NodeId v) const;

    /// Re-verifies symmetry, sortedness, absence of loops/duplicates and the
    /// offset identities.
    bool check_invariants() const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> adjacency_;
    std::vector<std::string> labels_;
};

enum class FeatureKind { degree };

/// Dense row-major node feature matrix.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
    FeatureKind kind = FeatureKind::degree;

    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// N x 1 matrix with row i = |N(i)|.
FeatureMatrix degree_features(const Graph& g);

struct ParseOptions {
    /// Merge repeated and reversed edges. When false a repeated edge is a parse error.
    bool dedup = true;
    /// Map labels to dense indices in first-appearance order. When false labels
    /// must be non-negative integers and are used as indices directly.
    bool relabel = true;
};

struct ParseStats {
    std::size_t data_lines = 0;
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
};

/// Reads a SNAP-style edge list: '#' comment lines, two whitespace-separated
/// labels per data line. Blank lines are skipped.
Graph parse_edge_list(std::istream& in, const ParseOptions& options = {},
                      ParseStats* stats = nullptr);
Graph read_edge_list(const std::filesystem::path& path, const ParseOptions& options = {},
                     ParseStats* stats = nullptr);

/// Writes the graph in the format parse_edge_list reads, so that re-parsing
/// reproduces the same dense indexing. Nodes that would otherwise appear out of
/// index order (or not at all, when isolated) are announced with a "v v" line,
/// which the parser drops as a self-loop but registers as a node.
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace cnca
