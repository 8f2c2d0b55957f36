#pragma once

#include "wips/numerics.hpp"
#include "wips/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace wips {

// Undirected weighted graph with per-node data vectors. Edges are canonical:
// i < j, no self-loops, no duplicates, weights >= 0. Nodes without observed
// attributes carry 1-hot features (effective input dimension p = n).
struct Graph {
    struct Edge {
        std::uint32_t i, j;
        double w;
    };

    std::size_t n = 0;
    std::vector<Edge> edges;
    bool onehot = true;
    DenseMatrix features;  // n x p when !onehot

    std::size_t feature_dim() const { return onehot ? n : features.cols(); }
    bool has_edge(std::uint32_t a, std::uint32_t b) const;

    // Rebuilds the sorted key index used by has_edge; called by loaders.
    void build_edge_index();

private:
    std::vector<std::uint64_t> edge_keys_;  // (i << 32) | j, sorted
};

struct NodeSplit {
    std::vector<std::uint32_t> train, valid, test;
};

// One training mini-batch: positives drawn from the edge list, negatives
// formed by resampling the second endpoint.
struct PairBatch {
    struct Pos {
        std::uint32_t i, j;
        double w;
    };
    struct Neg {
        std::uint32_t i, j;
    };
    std::vector<Pos> positives;
    std::vector<Neg> negatives;
};

enum class NegativeSampling { Uniform, DegreeProportional };

// Parses an edge-list stream: one edge per line "i j [w]", '#' starts a
// comment line, ids are 0-based. n is inferred as 1 + max id unless
// n_override is given. Malformed input is rejected with its line number.
Graph load_edges(std::istream& in, std::size_t n_override = 0);

// Feature stream: header "n p" then n lines of p reals, or the literal
// header "onehot n".
void load_features(std::istream& in, Graph& g);

Graph load_graph_files(const std::string& edge_path, const std::string& feature_path);

void write_edges(std::ostream& out, const Graph& g);

// Node split by seeded shuffle; valid/test sizes round(ratio * n), remainder
// to train. Requires n >= 5.
NodeSplit split_nodes(const Graph& g, double train_ratio, double valid_ratio, double test_ratio,
                      Rng& rng);

// Subgraph on `keep`, nodes relabeled densely preserving order. OneHot
// features stay OneHot over the new n; dense feature rows are subset.
Graph induced_subgraph(const Graph& g, const std::vector<std::uint32_t>& keep);

// Positives uniform with replacement from the edge list; for each positive
// (i,j), `negatives_per_positive` pairs (i,j') with j' resampled from
// {0..n-1}\{i}. Sampled pairs that happen to be linked are kept.
PairBatch sample_batch(const Graph& g, std::size_t batch_size, std::size_t negatives_per_positive,
                       Rng& rng, NegativeSampling mode = NegativeSampling::Uniform);

// Gathers feature rows (or 1-hot rows) for `ids` into a dense batch.
DenseMatrix gather_features(const Graph& g, const std::vector<std::uint32_t>& ids);

}  // namespace wips
