#include <doctest.h>

#include <cmath>
#include <limits>

#include "cnca/centrality.hpp"
#include "cnca/error.hpp"
#include "cnca/generators.hpp"

using namespace cnca;

namespace {

Graph complete(std::size_t n) {
    std::vector<Edge> e;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) e.push_back({u, v});
    return Graph::from_edges(n, e);
}

Graph path3() {
    Edge e[] = {{0, 1}, {1, 2}};
    return Graph::from_edges(3, e);
}

// All-pairs hop distances by Floyd-Warshall; -1 when unreachable.
std::vector<std::vector<long>> floyd(const Graph& g) {
    const std::size_t n = g.num_nodes();
    const long inf = std::numeric_limits<long>::max() / 4;
    std::vector<std::vector<long>> d(n, std::vector<long>(n, inf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (auto [u, v] : g.edges()) d[u][v] = d[v][u] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    for (auto& row : d)
        for (auto& x : row)
            if (x >= inf) x = -1;
    return d;
}

std::vector<double> closeness_oracle(const Graph& g) {
    auto d = floyd(g);
    std::vector<double> c(g.num_nodes(), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        long sum = 0, reach = 0;
        for (std::size_t j = 0; j < d.size(); ++j)
            if (j != i && d[i][j] > 0) {
                sum += d[i][j];
                ++reach;
            }
        if (reach > 0) c[i] = static_cast<double>(reach) / static_cast<double>(sum);
    }
    return c;
}

std::vector<Graph> sample_graphs(std::size_t max_n) {
    std::vector<Graph> out;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const std::size_t n = 10 + seed * 7 % (max_n - 10);
        out.push_back(generate({GeneratorModel::ba, n, 1 + seed % 3, 0, 0.0, seed}));
        out.push_back(generate({GeneratorModel::ws, n, 0, 2 + 2 * (seed % 2), 0.3, seed}));
        out.push_back(generate({GeneratorModel::plc, n, 2, 0, 0.5, seed}));
    }
    // Disconnected: two BA components plus isolated nodes.
    auto a = generate({GeneratorModel::ba, 20, 2, 0, 0.0, 5});
    std::vector<Edge> e = a.edges();
    for (auto [u, v] : generate({GeneratorModel::ws, 15, 0, 2, 0.2, 5}).edges())
        e.push_back({static_cast<NodeId>(u + 20), static_cast<NodeId>(v + 20)});
    out.push_back(Graph::from_edges(38, e));
    return out;
}

}  // namespace

TEST_CASE("closeness examples") {
    auto c = closeness_all(path3());
    CHECK(c.values[1] == 1.0);
    CHECK(c.values[0] == doctest::Approx(2.0 / 3.0));
    CHECK(c.values[2] == doctest::Approx(2.0 / 3.0));
    for (double v : closeness_all(complete(4)).values) CHECK(v == 1.0);

    Edge two[] = {{0, 1}, {2, 3}};
    for (double v : closeness_all(Graph::from_edges(4, two)).values) CHECK(v == 1.0);

    Edge one[] = {{0, 1}};
    auto iso = closeness_all(Graph::from_edges(3, one));
    CHECK(iso.values[2] == 0.0);
    CHECK_THROWS_AS(closeness_all(Graph::from_edges(1, {})), ParameterError);
}

TEST_CASE("betweenness examples") {
    auto b = betweenness_all(path3());
    CHECK(b.values[1] == doctest::Approx(1.0 / 3.0));
    CHECK(b.values[0] == 0.0);
    Edge star[] = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    auto s = betweenness_all(Graph::from_edges(5, star));
    CHECK(s.values[0] == doctest::Approx(0.6));
    for (int i = 1; i < 5; ++i) CHECK(s.values[static_cast<std::size_t>(i)] == 0.0);

    Edge c5[] = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}};
    auto c = brute_force_betweenness(Graph::from_edges(5, c5));
    for (double v : c.values) CHECK(v == doctest::Approx(c.values[0]).epsilon(1e-12));
    CHECK(brute_force_betweenness(path3()).values == betweenness_all(path3()).values);

    Edge e2[] = {{0, 1}};
    CHECK_THROWS_AS(betweenness_all(Graph::from_edges(2, e2)), ParameterError);
    CHECK_THROWS_AS(brute_force_betweenness(generate({GeneratorModel::ba, 201, 2, 0, 0.0, 1})), ParameterError);
}

TEST_CASE("complete graphs") {
    for (std::size_t n = 3; n <= 8; ++n) {
        auto g = complete(n);
        for (double v : closeness_all(g).values) CHECK(v == 1.0);
        for (double v : betweenness_all(g).values) CHECK(v == 0.0);
    }
}

TEST_CASE("brandes matches brute force") {
    for (const auto& g : sample_graphs(100)) {
        auto fast = betweenness_all(g);
        auto slow = brute_force_betweenness(g);
        for (std::size_t i = 0; i < g.num_nodes(); ++i) {
            CHECK(std::abs(fast.values[i] - slow.values[i]) < 1e-9);
            CHECK(fast.values[i] >= 0.0);
            CHECK(fast.values[i] <= 1.0);
        }
    }
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto g = generate({GeneratorModel::ba, 40 + seed, 2, 0, 0.0, 1000 + seed});
        auto fast = betweenness_all(g), slow = brute_force_betweenness(g);
        for (std::size_t i = 0; i < g.num_nodes(); ++i) CHECK(std::abs(fast.values[i] - slow.values[i]) < 1e-9);
    }
}

TEST_CASE("closeness matches floyd-warshall") {
    for (const auto& g : sample_graphs(100)) {
        auto c = closeness_all(g);
        auto oracle = closeness_oracle(g);
        for (std::size_t i = 0; i < g.num_nodes(); ++i) CHECK(c.values[i] == doctest::Approx(oracle[i]).epsilon(1e-14));
    }
}

TEST_CASE("betweenness mass equals interior path length") {
    // Summed over w, unnormalized ordered-pair betweenness counts the interior
    // vertices of each connected pair's shortest paths: d(s,t) - 1.
    for (const auto& g : sample_graphs(30)) {
        auto d = floyd(g);
        double expected = 0;
        for (const auto& row : d)
            for (long x : row)
                if (x > 0) expected += static_cast<double>(x - 1);
        const double n = static_cast<double>(g.num_nodes());
        double total = 0;
        for (double v : brute_force_betweenness(g).values) total += v * n * (n - 1);
        CHECK(total == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("results do not depend on thread count") {
    auto g = generate({GeneratorModel::ba, 400, 3, 0, 0.0, 8});
    CHECK(betweenness_all(g, 1).values == betweenness_all(g, 4).values);
    CHECK(closeness_all(g, 1).values == closeness_all(g, 3).values);
}

TEST_CASE("rank_of") {
    CHECK(rank_of(std::vector<double>{0.2, 0.5, 0.1}) == std::vector<std::size_t>{1, 0, 2});
    CHECK(rank_of(std::vector<double>{1, 1, 1, 1}) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(rank_of(closeness_all(path3()))[1] == 0);
}

TEST_CASE("degree and kind names") {
    auto d = degree_all(path3());
    CHECK(d.values == std::vector<double>{1, 2, 1});
    CHECK(parse_centrality_kind("bc") == CentralityKind::betweenness);
    CHECK(to_string(CentralityKind::closeness) == "cc");
    CHECK_THROWS_AS(parse_centrality_kind("pagerank"), ParameterError);
}
