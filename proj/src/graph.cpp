#include "wips/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace wips {

namespace {

std::uint64_t edge_key(std::uint32_t i, std::uint32_t j) {
    return (static_cast<std::uint64_t>(i) << 32) | j;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

void Graph::build_edge_index() {
    edge_keys_.clear();
    edge_keys_.reserve(edges.size());
    for (const auto& e : edges) edge_keys_.push_back(edge_key(e.i, e.j));
    std::sort(edge_keys_.begin(), edge_keys_.end());
}

bool Graph::has_edge(std::uint32_t a, std::uint32_t b) const {
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    return std::binary_search(edge_keys_.begin(), edge_keys_.end(), edge_key(a, b));
}

Graph load_edges(std::istream& in, std::size_t n_override) {
    Graph g;
    std::unordered_map<std::uint64_t, std::size_t> seen;  // key -> first line
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t max_id = 0;
    bool any_node = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        long long a, b;
        if (!(ls >> a)) continue;  // blank line
        if (!(ls >> b)) parse_fail(line_no, "expected \"i j [w]\"");
        double w = 1.0;
        if (ls >> w) {
            std::string rest;
            if (ls >> rest) parse_fail(line_no, "trailing tokens after weight");
        }
        if (a < 0 || b < 0) parse_fail(line_no, "negative node id");
        if (a == b) parse_fail(line_no, "self-loop");
        if (w < 0.0 || !std::isfinite(w)) parse_fail(line_no, "negative or non-finite weight");
        std::uint32_t i = static_cast<std::uint32_t>(a), j = static_cast<std::uint32_t>(b);
        if (i > j) std::swap(i, j);
        auto [it, inserted] = seen.emplace(edge_key(i, j), line_no);
        if (!inserted)
            parse_fail(line_no, "duplicate edge (" + std::to_string(i) + "," + std::to_string(j) +
                                    "), first seen at line " + std::to_string(it->second));
        g.edges.push_back({i, j, w});
        max_id = std::max<std::uint64_t>(max_id, j);
        any_node = true;
    }
    g.n = any_node ? static_cast<std::size_t>(max_id) + 1 : 0;
    if (n_override > 0) {
        if (n_override < g.n)
            throw std::runtime_error("node count override " + std::to_string(n_override) +
                                     " is smaller than 1 + max node id " + std::to_string(g.n - 1));
        g.n = n_override;
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const Graph::Edge& x, const Graph::Edge& y) {
        return edge_key(x.i, x.j) < edge_key(y.i, y.j);
    });
    g.build_edge_index();
    return g;
}

void load_features(std::istream& in, Graph& g) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("feature file: missing header");
    std::istringstream hs(header);
    std::string first;
    hs >> first;
    if (first == "onehot") {
        std::size_t n = 0;
        if (!(hs >> n)) throw std::runtime_error("feature file: expected \"onehot n\"");
        if (n != g.n)
            throw std::runtime_error("feature file: onehot node count " + std::to_string(n) +
                                     " does not match graph (" + std::to_string(g.n) + ")");
        g.onehot = true;
        g.features = DenseMatrix();
        return;
    }
    std::size_t n = 0, p = 0;
    {
        std::istringstream hs2(header);
        if (!(hs2 >> n >> p) || p == 0) throw std::runtime_error("feature file: expected \"n p\" header");
    }
    if (n != g.n)
        throw std::runtime_error("feature file: node count " + std::to_string(n) +
                                 " does not match graph (" + std::to_string(g.n) + ")");
    DenseMatrix f(n, p);
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("feature file: expected " + std::to_string(n) +
                                     " rows, got " + std::to_string(i));
        std::istringstream ls(line);
        for (std::size_t k = 0; k < p; ++k) {
            if (!(ls >> f(i, k)))
                parse_fail(i + 2, "expected " + std::to_string(p) + " values");
            if (!std::isfinite(f(i, k))) parse_fail(i + 2, "non-finite feature value");
        }
    }
    g.onehot = false;
    g.features = std::move(f);
}

Graph load_graph_files(const std::string& edge_path, const std::string& feature_path) {
    std::ifstream ef(edge_path);
    if (!ef) throw std::runtime_error("cannot open edge file: " + edge_path);
    Graph g = load_edges(ef);
    if (!feature_path.empty() && feature_path != "onehot") {
        std::ifstream ff(feature_path);
        if (!ff) throw std::runtime_error("cannot open feature file: " + feature_path);
        load_features(ff, g);
    }
    return g;
}

void write_edges(std::ostream& out, const Graph& g) {
    char buf[64];
    for (const auto& e : g.edges) {
        std::snprintf(buf, sizeof(buf), "%u %u %.17g\n", e.i, e.j, e.w);
        out << buf;
    }
}

NodeSplit split_nodes(const Graph& g, double train_ratio, double valid_ratio, double test_ratio,
                      Rng& rng) {
    if (g.n < 5) throw std::invalid_argument("split_nodes: need at least 5 nodes");
    const double sum = train_ratio + valid_ratio + test_ratio;
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split_nodes: ratios must sum to 1");
    const std::size_t n = g.n;
    std::size_t n_valid = static_cast<std::size_t>(std::llround(valid_ratio * static_cast<double>(n)));
    std::size_t n_test = static_cast<std::size_t>(std::llround(test_ratio * static_cast<double>(n)));
    if (n_valid + n_test >= n) throw std::invalid_argument("split_nodes: ratios leave no train nodes");

    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t k = rng.uniform_index(i);
        std::swap(perm[i - 1], perm[k]);
    }
    NodeSplit s;
    s.train.assign(perm.begin(), perm.end() - static_cast<long>(n_valid + n_test));
    s.valid.assign(perm.end() - static_cast<long>(n_valid + n_test), perm.end() - static_cast<long>(n_test));
    s.test.assign(perm.end() - static_cast<long>(n_test), perm.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.valid.begin(), s.valid.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

Graph induced_subgraph(const Graph& g, const std::vector<std::uint32_t>& keep) {
    if (keep.empty()) throw std::invalid_argument("induced_subgraph: empty node set");
    std::vector<std::uint32_t> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.back() >= g.n) throw std::invalid_argument("induced_subgraph: node id out of range");

    std::vector<std::uint32_t> relabel(g.n, UINT32_MAX);
    for (std::size_t k = 0; k < sorted.size(); ++k) relabel[sorted[k]] = static_cast<std::uint32_t>(k);

    Graph out;
    out.n = sorted.size();
    for (const auto& e : g.edges) {
        const std::uint32_t a = relabel[e.i], b = relabel[e.j];
        if (a == UINT32_MAX || b == UINT32_MAX) continue;
        out.edges.push_back({std::min(a, b), std::max(a, b), e.w});
    }
    std::sort(out.edges.begin(), out.edges.end(), [](const Graph::Edge& x, const Graph::Edge& y) {
        return edge_key(x.i, x.j) < edge_key(y.i, y.j);
    });
    out.onehot = g.onehot;
    if (!g.onehot) {
        DenseMatrix f(out.n, g.features.cols());
        for (std::size_t k = 0; k < sorted.size(); ++k)
            for (std::size_t c = 0; c < g.features.cols(); ++c) f(k, c) = g.features(sorted[k], c);
        out.features = std::move(f);
    }
    out.build_edge_index();
    return out;
}

PairBatch sample_batch(const Graph& g, std::size_t batch_size, std::size_t negatives_per_positive,
                       Rng& rng, NegativeSampling mode) {
    if (g.edges.empty()) throw std::invalid_argument("sample_batch: graph has no edges");
    if (batch_size == 0) throw std::invalid_argument("sample_batch: batch_size must be >= 1");

    // Degree-proportional target table, built lazily per call. Off by default.
    std::vector<std::uint32_t> degree_table;
    if (mode == NegativeSampling::DegreeProportional) {
        degree_table.reserve(2 * g.edges.size());
        for (const auto& e : g.edges) {
            degree_table.push_back(e.i);
            degree_table.push_back(e.j);
        }
    }

    PairBatch batch;
    batch.positives.reserve(batch_size);
    batch.negatives.reserve(batch_size * negatives_per_positive);
    for (std::size_t b = 0; b < batch_size; ++b) {
        const auto& e = g.edges[rng.uniform_index(g.edges.size())];
        batch.positives.push_back({e.i, e.j, e.w});
        for (std::size_t k = 0; k < negatives_per_positive; ++k) {
            std::uint32_t j;
            do {
                j = (mode == NegativeSampling::Uniform)
                        ? static_cast<std::uint32_t>(rng.uniform_index(g.n))
                        : degree_table[rng.uniform_index(degree_table.size())];
            } while (j == e.i);
            batch.negatives.push_back({e.i, j});
        }
    }
    return batch;
}

DenseMatrix gather_features(const Graph& g, const std::vector<std::uint32_t>& ids) {
    const std::size_t p = g.feature_dim();
    DenseMatrix x(ids.size(), p);
    for (std::size_t r = 0; r < ids.size(); ++r) {
        if (ids[r] >= g.n) throw std::invalid_argument("gather_features: node id out of range");
        if (g.onehot)
            x(r, ids[r]) = 1.0;
        else
            for (std::size_t c = 0; c < p; ++c) x(r, c) = g.features(ids[r], c);
    }
    return x;
}

}  // namespace wips
