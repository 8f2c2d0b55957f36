#include "wips/graph.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace wips;

TEST_SUITE_BEGIN("graph");

namespace {

Graph from_lines(const std::string& text) {
    std::istringstream in(text);
    return load_edges(in);
}

}  // namespace

TEST_CASE("load_edges defaults and inference") {
    const Graph g = from_lines("0 1\n1 2\n");
    CHECK(g.n == 3);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].i == 0);
    CHECK(g.edges[0].j == 1);
    CHECK(g.edges[0].w == 1.0);
    CHECK(g.onehot);
    CHECK(g.feature_dim() == 3);
}

TEST_CASE("load_edges canonical ordering") {
    const Graph g = from_lines("2 0 3.5\n");
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].i == 0);
    CHECK(g.edges[0].j == 2);
    CHECK(g.edges[0].w == 3.5);
}

TEST_CASE("load_edges rejects duplicates naming the line") {
    CHECK_THROWS_WITH_AS(from_lines("0 1\n0 1\n"), doctest::Contains("line 2"),
                         std::runtime_error);
    // also when reversed
    CHECK_THROWS_WITH_AS(from_lines("0 1\n1 0 2.0\n"), doctest::Contains("line 2"),
                         std::runtime_error);
}

TEST_CASE("load_edges diagnostics carry line numbers") {
    CHECK_THROWS_WITH_AS(from_lines("0 1\n3 -1\n"), doctest::Contains("line 2"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(from_lines("1 1\n"), doctest::Contains("self-loop"), std::runtime_error);
    CHECK_THROWS_WITH_AS(from_lines("0 1 -2.0\n"), doctest::Contains("line 1"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(from_lines("0\n"), doctest::Contains("line 1"), std::runtime_error);
}

TEST_CASE("load_edges comments and blanks") {
    const Graph g = from_lines("# a comment\n\n0 1 # trailing\n");
    CHECK(g.n == 2);
    CHECK(g.edges.size() == 1);
}

TEST_CASE("canonicalization is idempotent through serialize/load") {
    const Graph g = from_lines("4 0 2.5\n1 0\n2 3 0.125\n");
    std::ostringstream out;
    write_edges(out, g);
    const Graph g2 = from_lines(out.str());
    REQUIRE(g2.edges.size() == g.edges.size());
    CHECK(g2.n == g.n);
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        CHECK(g2.edges[k].i == g.edges[k].i);
        CHECK(g2.edges[k].j == g.edges[k].j);
        CHECK(g2.edges[k].w == g.edges[k].w);
    }
}

TEST_CASE("feature file parsing") {
    Graph g = from_lines("0 1\n1 2\n");
    SUBCASE("dense") {
        std::istringstream f("3 2\n1 0\n0.5 0.5\n0 1\n");
        load_features(f, g);
        CHECK_FALSE(g.onehot);
        CHECK(g.feature_dim() == 2);
        CHECK(g.features(1, 0) == 0.5);
    }
    SUBCASE("onehot header") {
        std::istringstream f("onehot 3\n");
        load_features(f, g);
        CHECK(g.onehot);
        CHECK(g.feature_dim() == 3);
    }
    SUBCASE("node count mismatch") {
        std::istringstream f("4 2\n1 0\n0 1\n1 1\n0 0\n");
        CHECK_THROWS_AS(load_features(f, g), std::runtime_error);
    }
    SUBCASE("short row") {
        std::istringstream f("3 2\n1 0\n0.5\n0 1\n");
        CHECK_THROWS_AS(load_features(f, g), std::runtime_error);
    }
}

TEST_CASE("split_nodes sizes") {
    Graph g;
    g.n = 100;
    Rng rng(1);
    const NodeSplit s = split_nodes(g, 0.64, 0.16, 0.20, rng);
    CHECK(s.train.size() == 64);
    CHECK(s.valid.size() == 16);
    CHECK(s.test.size() == 20);
}

TEST_CASE("split_nodes rounding remainder to train") {
    Graph g;
    g.n = 5;
    Rng rng(1);
    const NodeSplit s = split_nodes(g, 0.64, 0.16, 0.20, rng);
    CHECK(s.train.size() == 3);
    CHECK(s.valid.size() == 1);
    CHECK(s.test.size() == 1);
}

TEST_CASE("split_nodes determinism and partition property") {
    Graph g;
    g.n = 37;
    Rng r1(9), r2(9);
    const NodeSplit a = split_nodes(g, 0.64, 0.16, 0.20, r1);
    const NodeSplit b = split_nodes(g, 0.64, 0.16, 0.20, r2);
    CHECK(a.train == b.train);
    CHECK(a.valid == b.valid);
    CHECK(a.test == b.test);

    std::vector<bool> seen(g.n, false);
    for (const auto* part : {&a.train, &a.valid, &a.test})
        for (auto v : *part) {
            CHECK_FALSE(seen[v]);
            seen[v] = true;
        }
    for (bool s : seen) CHECK(s);
}

TEST_CASE("split_nodes rejects tiny graphs") {
    Graph g;
    g.n = 4;
    Rng rng(1);
    CHECK_THROWS_AS(split_nodes(g, 0.64, 0.16, 0.20, rng), std::invalid_argument);
}

TEST_CASE("induced_subgraph identity") {
    const Graph g = from_lines("0 1\n1 2 0.5\n");
    const Graph s = induced_subgraph(g, {0, 1, 2});
    CHECK(s.n == g.n);
    REQUIRE(s.edges.size() == g.edges.size());
    CHECK(s.edges[1].w == 0.5);
}

TEST_CASE("induced_subgraph drops cross edges") {
    const Graph g = from_lines("0 1\n1 2\n");
    const Graph s = induced_subgraph(g, {0, 2});
    CHECK(s.n == 2);
    CHECK(s.edges.empty());
}

TEST_CASE("induced_subgraph relabels densely") {
    const Graph g = from_lines("0 2\n1 2\n");
    const Graph s = induced_subgraph(g, {1, 2});
    CHECK(s.n == 2);
    REQUIRE(s.edges.size() == 1);
    CHECK(s.edges[0].i == 0);
    CHECK(s.edges[0].j == 1);
}

TEST_CASE("induced_subgraph features") {
    Graph g = from_lines("0 1\n1 2\n");
    SUBCASE("onehot stays onehot over new n") {
        const Graph s = induced_subgraph(g, {1, 2});
        CHECK(s.onehot);
        CHECK(s.feature_dim() == 2);
    }
    SUBCASE("dense rows subset") {
        std::istringstream f("3 2\n1 2\n3 4\n5 6\n");
        load_features(f, g);
        const Graph s = induced_subgraph(g, {0, 2});
        CHECK(s.features(0, 1) == 2.0);
        CHECK(s.features(1, 0) == 5.0);
    }
    SUBCASE("empty keep rejected") {
        CHECK_THROWS_AS(induced_subgraph(g, {}), std::invalid_argument);
    }
}

TEST_CASE("sample_batch counts") {
    const Graph g = from_lines("0 1\n1 2\n2 3\n");
    Rng rng(5);
    const PairBatch b = sample_batch(g, 64, 5, rng);
    CHECK(b.positives.size() == 64);
    CHECK(b.negatives.size() == 320);
    for (const auto& q : b.negatives) CHECK(q.i != q.j);
}

TEST_CASE("sample_batch single-edge graph") {
    const Graph g = from_lines("0 1\n");
    Rng rng(5);
    const PairBatch b = sample_batch(g, 16, 1, rng);
    for (const auto& p : b.positives) {
        CHECK(p.i == 0);
        CHECK(p.j == 1);
    }
}

TEST_CASE("sample_batch n=2 negatives hit the other node") {
    const Graph g = from_lines("0 1\n");
    Rng rng(5);
    const PairBatch b = sample_batch(g, 8, 1, rng);
    for (const auto& q : b.negatives) CHECK(q.j == (q.i == 0 ? 1 : 0));
}

TEST_CASE("sample_batch rejects edgeless graphs") {
    Graph g;
    g.n = 4;
    Rng rng(1);
    CHECK_THROWS_AS(sample_batch(g, 4, 1, rng), std::invalid_argument);
}

TEST_CASE("negative endpoints are uniform within 3 sigma on a cycle") {
    // A cycle is vertex-transitive, so the marginal of the second endpoint
    // is exactly uniform 1/n.
    Graph g;
    g.n = 100;
    for (std::uint32_t i = 0; i < 100; ++i) {
        const std::uint32_t j = (i + 1) % 100;
        g.edges.push_back({std::min(i, j), std::max(i, j), 1.0});
    }
    g.build_edge_index();
    Rng rng(1234);
    std::vector<int> counts(g.n, 0);
    const PairBatch b = sample_batch(g, 10000, 1, rng);
    REQUIRE(b.negatives.size() == 10000);
    for (const auto& q : b.negatives) counts[q.j]++;
    const double mean = 100.0;
    const double sigma = std::sqrt(10000.0 * 0.01 * 0.99);
    for (int c : counts) CHECK(std::abs(c - mean) <= 3.0 * sigma);
}

TEST_CASE("gather_features onehot rows") {
    const Graph g = from_lines("0 1\n1 2\n");
    const DenseMatrix x = gather_features(g, {2, 0});
    CHECK(x.rows() == 2);
    CHECK(x.cols() == 3);
    CHECK(x(0, 2) == 1.0);
    CHECK(x(1, 0) == 1.0);
    CHECK(x(0, 0) == 0.0);
}

TEST_SUITE_END();
