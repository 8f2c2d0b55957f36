#pragma once

#include "wips/encoder.hpp"
#include "wips/eval.hpp"
#include "wips/graph.hpp"
#include "wips/similarity.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wips {

struct TrainConfig {
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t batch_size = 64;
    std::size_t negatives_per_positive = 5;
    std::size_t max_iterations = 1000;
    std::size_t eval_interval = 100;
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden_dims{64, 64};
    std::vector<double> lr_grid;                                   // grid_search cells
    std::vector<double> q_ratio_grid{0.01, 0.25, 0.5, 0.75, 0.99}; // IPDS cells
    NegativeSampling negative_sampling = NegativeSampling::Uniform;
    bool freeze_lambda = false;

    std::vector<std::size_t> layer_dims(std::size_t input_dim, std::size_t feature_dim) const;
};

// Joint gradients of the negative-sampling objective.
struct LossGrads {
    double loss = 0.0;
    EncoderGrads encoder;
    std::vector<double> d_lambda;  // empty unless the head carries lambda
};

struct TrainState {
    EncoderParams encoder;
    SimilarityHead head;
    // Adam moments, flattened in parameter order (weights, biases, lambda).
    std::vector<double> adam_m, adam_v;
    std::size_t iteration = 0;
    Rng rng{0};
    bool freeze_lambda = false;
};

struct Checkpoint {
    SimilarityHead head;
    EncoderParams encoder;
    std::size_t iteration = 0;
    std::optional<double> best_val_auc;
    TrainConfig config;
};

struct CurvePoint {
    std::size_t iteration;
    double loss;                    // mean over the trailing window of 100 batches
    std::optional<double> val_auc;
};

// Validation pairs are indexed against `graph`, which may differ from the
// training graph (inductive evaluation embeds held-out nodes by their data
// vectors).
struct ValidationSpec {
    const Graph* graph = nullptr;
    PairSet pairs;
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<CurvePoint> curve;
    double false_negative_rate = 0.0;  // sampled negatives that are true links
};

struct GridCell {
    double learning_rate;
    long q;  // -1 when the head has no q
    double best_val_auc;
    std::size_t best_iteration;
};

struct GridResult {
    Checkpoint best;
    std::vector<GridCell> cells;
};

// Mean negative log-likelihood over batch terms (positives score label 1,
// sampled negatives label 0) and its exact gradients through the head and
// the encoder; evaluated with log_sigmoid for stability. Throws on a
// non-finite loss, naming the offending pair.
LossGrads batch_loss_and_grads(const TrainState& state, const PairBatch& batch, const Graph& g);

// Standard Adam update with bias correction.
void adam_step(TrainState& state, const LossGrads& grads, double lr, const TrainConfig& cfg);

// Fresh state: He-init encoder, lambda ~ U(0, 1/K) for WIPS heads whose
// lambda is unset. Deterministic in config.seed.
TrainState init_train_state(const Graph& g, const SimilarityHead& head_spec,
                            const TrainConfig& cfg);

// Mini-batch training; evaluates validation AUC every eval_interval
// iterations and returns the best-validation checkpoint (ties keep the
// earlier iteration), or the final iterate when no validation is given.
TrainResult train(const Graph& g, const SimilarityHead& head_spec, const TrainConfig& cfg,
                  const ValidationSpec* validation = nullptr);

// One independent training run per (learning rate x q-ratio) cell with
// seed-derived streams; cells may run on `jobs` threads. Requires a
// validation spec to rank cells.
GridResult grid_search(const Graph& g, const SimilarityHead& head_spec, const TrainConfig& cfg,
                       const ValidationSpec& validation, std::size_t jobs = 1);

// Embeds the listed nodes with the current encoder (1-hot fast path when
// the graph has no observed attributes).
DenseMatrix embed_nodes(const EncoderParams& params, const Graph& g,
                        const std::vector<std::uint32_t>& ids);
DenseMatrix embed_all_nodes(const EncoderParams& params, const Graph& g);

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint load_checkpoint(std::istream& in);
void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint_file(const std::string& path);

std::string head_descriptor(const SimilarityHead& head);

}  // namespace wips
