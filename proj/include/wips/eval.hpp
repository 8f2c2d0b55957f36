#pragma once

#include "wips/graph.hpp"
#include "wips/numerics.hpp"
#include "wips/rng.hpp"
#include "wips/similarity.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace wips {

struct ScoredPair {
    double score;
    int label;  // 0 or 1
};

// Mann-Whitney AUC, P(score+ > score-) + 0.5 P(equal), by average ranks.
// Requires at least one positive and one negative label.
double roc_auc(std::vector<ScoredPair> pairs);

using NodePair = std::pair<std::uint32_t, std::uint32_t>;

struct PairSet {
    std::vector<NodePair> pairs;
    std::vector<int> labels;
};

// Pair universe for reconstruction scoring: positives are all edges;
// negatives are all non-edges when n <= exhaustive_limit, otherwise a seeded
// uniform sample of 10x the positive count.
PairSet reconstruction_pairs(const Graph& g, std::uint64_t seed, std::size_t exhaustive_limit = 2000);

// Pair universe for inductive evaluation: (u, v) with u in `eval_nodes` and
// v in `candidates`; pairs with both endpoints in eval_nodes counted once.
// Labels come from `full`, the graph holding ground-truth links.
PairSet linkpred_pairs(const Graph& full, const std::vector<std::uint32_t>& eval_nodes,
                       const std::vector<std::uint32_t>& candidates, std::uint64_t seed,
                       std::size_t exhaustive_limit = 2000);

// Scores pair (i, j) as head(Y_row_i, Y_row_j). Y is n x K.
double score_pair(const DenseMatrix& features, const SimilarityHead& head, std::uint32_t i,
                  std::uint32_t j);

double auc_for_pairs(const DenseMatrix& features, const SimilarityHead& head, const PairSet& ps);

// Multinomial logistic regression, full-batch gradient descent with L2
// penalty; zero-initialized and deterministic.
struct ClassifierModel {
    DenseMatrix weights;       // classes x feature dim
    std::vector<double> bias;  // classes
    std::size_t classes() const { return bias.size(); }
};

struct ClassifierConfig {
    double l2 = 1e-4;
    std::size_t iterations = 500;
    double learning_rate = 0.5;
};

ClassifierModel train_classifier(const DenseMatrix& features, const std::vector<int>& labels,
                                 const ClassifierConfig& cfg = {});

// Fraction of argmax-correct predictions; ties broken toward the lowest
// class index.
double classify_accuracy(const ClassifierModel& model, const DenseMatrix& features,
                         const std::vector<int>& labels);

}  // namespace wips
