#include "wips/eval.hpp"

#include "wips/encoder.hpp"
#include "wips/trainer.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace wips;

TEST_SUITE_BEGIN("eval");

TEST_CASE("roc_auc basics") {
    CHECK(roc_auc({{0.9, 1}, {0.8, 1}, {0.1, 0}}) == 1.0);
    CHECK(roc_auc({{0.3, 1}, {0.3, 0}, {0.3, 1}, {0.3, 0}}) == 0.5);
    CHECK(roc_auc({{0.4, 1}, {0.6, 0}}) == 0.0);
    CHECK_THROWS_AS(roc_auc({{0.4, 1}, {0.6, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(roc_auc({}), std::invalid_argument);
}

TEST_CASE("roc_auc handles infinite scores") {
    CHECK(roc_auc({{HUGE_VAL, 1}, {-HUGE_VAL, 0}, {0.0, 0}}) == 1.0);
}

TEST_CASE("roc_auc invariant under strictly increasing transforms") {
    Rng rng(3);
    std::vector<ScoredPair> base;
    for (int i = 0; i < 200; ++i)
        base.push_back({rng.normal(), static_cast<int>(rng.uniform_index(2))});
    base[0].label = 1;
    base[1].label = 0;
    const double auc = roc_auc(base);
    auto affine = base;
    for (auto& sp : affine) sp.score = 2.0 * sp.score + 1.0;
    CHECK(std::abs(roc_auc(affine) - auc) < 1e-12);
    auto tanh_stretched = base;
    for (auto& sp : tanh_stretched) sp.score = std::tanh(sp.score * 0.3);
    CHECK(std::abs(roc_auc(tanh_stretched) - auc) < 1e-12);
}

TEST_CASE("roc_auc complement under score negation") {
    Rng rng(5);
    std::vector<ScoredPair> base;
    for (int i = 0; i < 301; ++i)
        base.push_back({rng.normal(), static_cast<int>(rng.uniform_index(2))});
    base[0].label = 1;
    base[1].label = 0;
    const double auc = roc_auc(base);
    auto neg = base;
    for (auto& sp : neg) sp.score = -sp.score;
    CHECK(roc_auc(neg) == doctest::Approx(1.0 - auc).epsilon(1e-12));
}

namespace {

Graph random_graph(std::size_t n, double p, Rng& rng) {
    Graph g;
    g.n = n;
    for (std::uint32_t i = 0; i + 1 < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p) g.edges.push_back({i, j, 1.0});
    g.build_edge_index();
    return g;
}

}  // namespace

TEST_CASE("reconstruction pair universe is exhaustive for small n") {
    Rng rng(7);
    const Graph g = random_graph(30, 0.2, rng);
    const PairSet ps = reconstruction_pairs(g, 1);
    CHECK(ps.pairs.size() == 30 * 29 / 2);
    std::size_t pos = 0;
    for (int l : ps.labels) pos += static_cast<std::size_t>(l);
    CHECK(pos == g.edges.size());
}

TEST_CASE("sampled negatives agree with exhaustive AUC within 0.01") {
    Rng rng(11);
    const Graph g = random_graph(200, 0.07, rng);
    // noisy planted score, deterministic per pair, so the AUC sits away from
    // both 0.5 and 1 and both pair universes see identical scores
    auto pair_score = [&](std::uint32_t i, std::uint32_t j) {
        Rng prng(1000003ULL * i + j);
        return (g.has_edge(i, j) ? 1.0 : 0.0) + 0.7 * prng.normal();
    };
    auto scored_auc = [&](const PairSet& ps) {
        std::vector<ScoredPair> sp;
        for (std::size_t k = 0; k < ps.pairs.size(); ++k)
            sp.push_back({pair_score(ps.pairs[k].first, ps.pairs[k].second), ps.labels[k]});
        return roc_auc(std::move(sp));
    };
    const double exhaustive = scored_auc(reconstruction_pairs(g, 1, 2000));
    const double sampled = scored_auc(reconstruction_pairs(g, 1, 100));  // force sampling
    CHECK(std::abs(exhaustive - sampled) < 0.01);
}

TEST_CASE("untrained random encoder reconstructs at chance") {
    Rng grng(17);
    const Graph g = random_graph(60, 0.15, grng);
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        const EncoderParams params = init_encoder({g.n, 8}, rng);
        const DenseMatrix y = forward_onehot(params, [&] {
            std::vector<std::uint32_t> ids(g.n);
            for (std::size_t i = 0; i < g.n; ++i) ids[i] = static_cast<std::uint32_t>(i);
            return ids;
        }());
        SimilarityHead head;
        head.kind = HeadKind::IPS;
        head.dim = 8;
        const double auc = auc_for_pairs(y, head, reconstruction_pairs(g, seed));
        worst = std::max(worst, std::abs(auc - 0.5));
    }
    CHECK(worst < 0.08);
}

TEST_CASE("linkpred pair universe") {
    Rng rng(19);
    const Graph g = random_graph(25, 0.3, rng);
    std::vector<std::uint32_t> eval_nodes{0, 1, 2, 3, 4};
    std::vector<std::uint32_t> all(g.n);
    for (std::size_t i = 0; i < g.n; ++i) all[i] = static_cast<std::uint32_t>(i);
    const PairSet ps = linkpred_pairs(g, eval_nodes, all, 1);
    // both-endpoints-held-out pairs counted once
    std::size_t expected = 0;
    for (std::uint32_t u : eval_nodes)
        for (std::uint32_t v : all) {
            if (u == v) continue;
            const bool both = v < 5;
            if (both && v <= u) continue;
            ++expected;
        }
    CHECK(ps.pairs.size() == expected);

    // no-positive split rejected
    Graph isolated = g;
    isolated.n = g.n + 1;  // a node with no links
    isolated.build_edge_index();
    CHECK_THROWS_AS(
        linkpred_pairs(isolated, {static_cast<std::uint32_t>(g.n)}, all, 1),
        std::invalid_argument);
}

TEST_CASE("perfect oracle scorer reaches AUC 1") {
    Rng rng(23);
    const Graph g = random_graph(25, 0.25, rng);
    std::vector<std::uint32_t> eval_nodes{1, 7, 11};
    std::vector<std::uint32_t> all(g.n);
    for (std::size_t i = 0; i < g.n; ++i) all[i] = static_cast<std::uint32_t>(i);
    const PairSet ps = linkpred_pairs(g, eval_nodes, all, 1);
    std::vector<ScoredPair> sp;
    for (std::size_t k = 0; k < ps.pairs.size(); ++k)
        sp.push_back({ps.labels[k] ? 10.0 : -10.0, ps.labels[k]});
    CHECK(roc_auc(std::move(sp)) == 1.0);
}

TEST_CASE("classifier separable toy set") {
    DenseMatrix x(8, 2);
    std::vector<int> labels;
    for (int i = 0; i < 8; ++i) {
        const bool right = i % 2 == 0;
        x(i, 0) = right ? 2.0 + 0.1 * i : -2.0 - 0.1 * i;
        x(i, 1) = 0.5;
        labels.push_back(right ? 1 : 0);
    }
    const ClassifierModel m = train_classifier(x, labels);
    CHECK(classify_accuracy(m, x, labels) == 1.0);
}

TEST_CASE("classifier permuted labels score near chance") {
    Rng rng(29);
    DenseMatrix x(120, 4);
    for (auto& v : x.data()) v = rng.normal();
    std::vector<int> labels(120);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3);
    // train on the first 80 rows, evaluate on the rest; labels carry no signal
    DenseMatrix train_x(80, 4), test_x(40, 4);
    std::vector<int> train_y(labels.begin(), labels.begin() + 80);
    std::vector<int> test_y(labels.begin() + 80, labels.end());
    for (std::size_t i = 0; i < 80; ++i)
        for (std::size_t c = 0; c < 4; ++c) train_x(i, c) = x(i, c);
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t c = 0; c < 4; ++c) test_x(i, c) = x(80 + i, c);
    const ClassifierModel m = train_classifier(train_x, train_y);
    const double acc = classify_accuracy(m, test_x, test_y);
    CHECK(std::abs(acc - 1.0 / 3.0) < 0.1);
}

TEST_CASE("zero-iteration classifier predicts uniformly") {
    DenseMatrix x(4, 2);
    x(0, 0) = 1.0;
    std::vector<int> labels{0, 1, 2, 0};
    ClassifierConfig cfg;
    cfg.iterations = 0;
    const ClassifierModel m = train_classifier(x, labels, cfg);
    for (double v : m.weights.data()) CHECK(v == 0.0);
    // all logits equal: argmax tie-break picks class 0
    std::vector<int> zeros{0, 0, 0, 0};
    CHECK(classify_accuracy(m, x, zeros) == 1.0);
}

TEST_CASE("classifier rejects degenerate input") {
    DenseMatrix x(3, 2);
    CHECK_THROWS_AS(train_classifier(x, {0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(train_classifier(x, {0, 1}), std::invalid_argument);
    const ClassifierModel m = train_classifier(x, {0, 1, 0});
    DenseMatrix empty(0, 2);
    CHECK_THROWS_AS(classify_accuracy(m, empty, {}), std::invalid_argument);
}

TEST_CASE("accuracy invariant under constant shift of all class rows") {
    Rng rng(31);
    DenseMatrix x(50, 3);
    for (auto& v : x.data()) v = rng.normal();
    std::vector<int> labels(50);
    for (auto& l : labels) l = static_cast<int>(rng.uniform_index(3));
    labels[0] = 0;
    labels[1] = 1;
    labels[2] = 2;
    ClassifierModel m = train_classifier(x, labels);
    const double before = classify_accuracy(m, x, labels);
    for (std::size_t k = 0; k < m.classes(); ++k) {
        for (std::size_t f = 0; f < 3; ++f) m.weights(k, f) += 0.75 * (f + 1.0);
        m.bias[k] += -2.5;
    }
    CHECK(classify_accuracy(m, x, labels) == before);
}

TEST_SUITE_END();
