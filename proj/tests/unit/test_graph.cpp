#include <doctest.h>

#include <numeric>
#include <sstream>

#include "cnca/error.hpp"
#include "cnca/generators.hpp"
#include "cnca/graph.hpp"

using namespace cnca;

namespace {

Graph parse(const std::string& text, ParseOptions opts = {}, ParseStats* stats = nullptr) {
    std::istringstream in(text);
    return parse_edge_list(in, opts, stats);
}

std::vector<NodeId> nbrs(const Graph& g, NodeId v) {
    auto s = g.neighbors(v);
    return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("parse simple path") {
    auto g = parse("0 1\n1 2");
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 2);
    CHECK(nbrs(g, 1) == std::vector<NodeId>{0, 2});
    CHECK(g.check_invariants());
}

TEST_CASE("comments, reversed duplicates and self-loops are dropped") {
    ParseStats stats;
    auto g = parse("# c\n5 7\n7 5\n5 5", {}, &stats);
    CHECK(g.num_nodes() == 2);
    CHECK(g.num_edges() == 1);
    CHECK(g.label(0) == "5");
    CHECK(g.label(1) == "7");
    CHECK(stats.data_lines == 3);
    CHECK(stats.self_loops == 1);
    CHECK(stats.duplicates == 1);
}

TEST_CASE("malformed line reports its line number") {
    try {
        parse("# header\n0 1\n1 2 3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse("0\n"), ParseError);
}

TEST_CASE("empty input is an error") {
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("# only a comment\n\n"), ParseError);
}

TEST_CASE("dedup disabled rejects repeats") {
    CHECK_THROWS_AS(parse("0 1\n1 0\n", ParseOptions{.dedup = false}), ParseError);
}

TEST_CASE("relabel disabled uses integer labels as indices") {
    auto g = parse("3 1\n", ParseOptions{.relabel = false});
    CHECK(g.num_nodes() == 4);
    CHECK(g.degree(0) == 0);
    CHECK(nbrs(g, 3) == std::vector<NodeId>{1});
    CHECK_THROWS_AS(parse("a b\n", ParseOptions{.relabel = false}), ParseError);
}

TEST_CASE("degree features") {
    Edge k3[] = {{0, 1}, {1, 2}, {0, 2}};
    auto f = degree_features(Graph::from_edges(3, k3));
    CHECK(f.rows == 3);
    CHECK(f.cols == 1);
    CHECK(f.data == std::vector<double>{2, 2, 2});

    Edge p3[] = {{0, 1}, {1, 2}};
    CHECK(degree_features(Graph::from_edges(3, p3)).data == std::vector<double>{1, 2, 1});

    Edge star[] = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    CHECK(degree_features(Graph::from_edges(5, star)).data == std::vector<double>{4, 1, 1, 1, 1});
}

TEST_CASE("neighbors") {
    Edge p3[] = {{0, 1}, {1, 2}};
    auto g = Graph::from_edges(4, p3);
    CHECK(nbrs(g, 1) == std::vector<NodeId>{0, 2});
    CHECK(nbrs(g, 3).empty());
    CHECK_THROWS_AS(g.neighbors(4), std::out_of_range);
    Edge k3[] = {{2, 1}, {1, 0}, {0, 2}};
    CHECK(nbrs(Graph::from_edges(3, k3), 0) == std::vector<NodeId>{1, 2});
}

TEST_CASE("invariants and degree sum over generated graphs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GeneratorSpec spec{seed % 2 ? GeneratorModel::ba : GeneratorModel::ws, 60, 3, 4, 0.3, seed};
        auto g = generate(spec);
        REQUIRE(g.check_invariants());
        auto f = degree_features(g);
        CHECK(std::accumulate(f.data.begin(), f.data.end(), 0.0) == doctest::Approx(2.0 * g.num_edges()));
        for (auto [u, v] : g.edges()) {
            CHECK(g.has_edge(u, v));
            CHECK(g.has_edge(v, u));
        }
    }
}

TEST_CASE("serialization round trip keeps indexing") {
    const std::string inputs[] = {
        "a b\nc d\nb c\n",
        "# x\n10 3\n3 7\n7 10\n42 42\n",
        "9 8\n1 2\n8 1\n",
    };
    for (const auto& text : inputs) {
        auto g1 = parse(text);
        std::stringstream out;
        write_edge_list(out, g1);
        auto g2 = parse(out.str());
        std::stringstream out2;
        write_edge_list(out2, g2);
        auto g3 = parse(out2.str());
        CHECK(g2.num_nodes() == g1.num_nodes());
        CHECK(g2.edges() == g1.edges());
        CHECK(g3.edges() == g1.edges());
        CHECK(g2.labels() == g1.labels());
    }
}

TEST_CASE("serialization round trip on random graphs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto g = generate({GeneratorModel::ws, 40, 0, 4, 0.5, seed});
        std::stringstream out;
        write_edge_list(out, g);
        auto back = parse(out.str());
        CHECK(back.num_nodes() == g.num_nodes());
        CHECK(back.edges() == g.edges());
    }
}
