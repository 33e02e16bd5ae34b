#include "cnca/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "cnca/error.hpp"

namespace cnca {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges, std::vector<std::string> labels) {
    if (!labels.empty() && labels.size() != n)
        throw ParameterError("label count " + std::to_string(labels.size()) + " != node count " +
                             std::to_string(n));
    std::vector<Edge> directed;
    directed.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
        if (u >= n || v >= n)
            throw ParameterError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                 ") out of range for n=" + std::to_string(n));
        if (u == v) continue;
        directed.emplace_back(u, v);
        directed.emplace_back(v, u);
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (auto [u, v] : directed) ++g.offsets_[u + 1];
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.adjacency_.reserve(directed.size());
    for (auto [u, v] : directed) g.adjacency_.push_back(v);
    g.labels_ = std::move(labels);
    return g;
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
    if (v >= num_nodes())
        throw std::out_of_range("node " + std::to_string(v) + " out of range (n=" +
                                std::to_string(num_nodes()) + ")");
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
}

std::string Graph::label(NodeId v) const {
    return labels_.empty() ? std::to_string(v) : labels_.at(v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (NodeId u = 0; u < num_nodes(); ++u)
        for (NodeId v : neighbors(u))
            if (u < v) out.emplace_back(u, v);
    return out;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

bool Graph::check_invariants() const {
    const std::size_t n = num_nodes();
    if (n == 0) return adjacency_.empty();
    if (offsets_.front() != 0 || offsets_.back() != adjacency_.size()) return false;
    if (adjacency_.size() % 2 != 0) return false;
    if (!labels_.empty() && labels_.size() != n) return false;
    for (NodeId u = 0; u < n; ++u) {
        if (offsets_[u] > offsets_[u + 1]) return false;
        auto nb = neighbors(u);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            if (nb[i] >= n || nb[i] == u) return false;
            if (i > 0 && nb[i - 1] >= nb[i]) return false;
            if (!has_edge(nb[i], u)) return false;
        }
    }
    return true;
}

FeatureMatrix degree_features(const Graph& g) {
    FeatureMatrix x;
    x.rows = g.num_nodes();
    x.cols = 1;
    x.data.resize(x.rows);
    for (NodeId v = 0; v < x.rows; ++v) x.data[v] = static_cast<double>(g.degree(v));
    return x;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        const std::size_t start = i;
        while (i < line.size() && !is_space(line[i])) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

}  // namespace

Graph parse_edge_list(std::istream& in, const ParseOptions& options, ParseStats* stats) {
    ParseStats local;
    std::unordered_map<std::string, NodeId> index;
    std::vector<std::string> labels;
    std::vector<Edge> edges;
    std::size_t max_id = 0;
    bool any_node = false;

    auto node_of = [&](std::string_view token, std::size_t line_no) -> NodeId {
        if (options.relabel) {
            auto [it, inserted] = index.try_emplace(std::string(token), static_cast<NodeId>(labels.size()));
            if (inserted) labels.emplace_back(token);
            return it->second;
        }
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size() || value >= UINT32_MAX)
            throw ParseError("label '" + std::string(token) + "' is not a node index", line_no);
        max_id = std::max<std::size_t>(max_id, value);
        any_node = true;
        return static_cast<NodeId>(value);
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = split_tokens(line);
        if (tokens.empty() || tokens.front().front() == '#') continue;
        if (tokens.size() != 2)
            throw ParseError("expected 2 tokens, found " + std::to_string(tokens.size()), line_no);
        ++local.data_lines;
        const NodeId u = node_of(tokens[0], line_no);
        const NodeId v = node_of(tokens[1], line_no);
        if (u == v) {
            ++local.self_loops;
            continue;
        }
        edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    if (local.data_lines == 0) throw ParseError("edge list contains no data lines");

    std::vector<Edge> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    const auto unique_end = std::unique(sorted.begin(), sorted.end());
    local.duplicates = static_cast<std::size_t>(sorted.end() - unique_end);
    if (!options.dedup && local.duplicates > 0) {
        // Report the first repeated edge in input order.
        std::vector<Edge> seen;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto pos = std::lower_bound(seen.begin(), seen.end(), edges[i]);
            if (pos != seen.end() && *pos == edges[i])
                throw ParseError("duplicate edge (" + std::to_string(edges[i].first) + "," +
                                 std::to_string(edges[i].second) + ")");
            seen.insert(pos, edges[i]);
        }
    }
    if (stats) *stats = local;

    const std::size_t n = options.relabel ? labels.size() : (any_node ? max_id + 1 : 0);
    return Graph::from_edges(n, edges, std::move(labels));
}

Graph read_edge_list(const std::filesystem::path& path, const ParseOptions& options, ParseStats* stats) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open edge list '" + path.string() + "'");
    return parse_edge_list(in, options, stats);
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << "# Undirected graph\n";
    out << "# Nodes: " << g.num_nodes() << " Edges: " << g.num_edges() << '\n';
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        auto nb = g.neighbors(v);
        // Smaller neighbours have all been introduced already; the first one
        // introduces v in index order. Without one, v needs an explicit line.
        if (nb.empty() || nb.front() > v) out << g.label(v) << ' ' << g.label(v) << '\n';
        for (NodeId u : nb) {
            if (u >= v) break;
            out << g.label(u) << ' ' << g.label(v) << '\n';
        }
    }
}

}  // namespace cnca
