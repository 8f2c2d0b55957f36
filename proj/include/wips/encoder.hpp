#pragma once

#include "wips/numerics.hpp"
#include "wips/rng.hpp"

#include <cstdint>
#include <vector>

namespace wips {

// Fully-connected MLP f: R^p -> R^K. Hidden layers use ReLU; the output
// layer has no activation, so feature vectors range over all of R^K (any
// squashing would re-restrict the similarity class).
struct EncoderParams {
    std::vector<std::size_t> layer_dims;    // [p, h1, ..., hL, K]
    std::vector<DenseMatrix> weights;       // per layer, out x in
    std::vector<std::vector<double>> biases;

    std::size_t num_layers() const { return weights.size(); }
    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t output_dim() const { return layer_dims.back(); }
    std::size_t parameter_count() const;
};

// Backprop cache: per-layer pre-activations and activations for one batch.
struct ForwardTrace {
    bool input_onehot = false;
    DenseMatrix input;                     // batch x p (dense path)
    std::vector<std::uint32_t> input_ids;  // 1-hot path
    std::vector<DenseMatrix> pre;          // per layer, batch x out
    std::vector<DenseMatrix> act;          // per layer; act.back() is the output
};

// Same shapes as the parameters they differentiate.
struct EncoderGrads {
    std::vector<DenseMatrix> weights;
    std::vector<std::vector<double>> biases;

    void accumulate(const EncoderGrads& other, double scale = 1.0);
    void scale(double s);
};

EncoderGrads zero_grads(const EncoderParams& params);

// He-normal weights (std = sqrt(2 / fan_in)), zero biases; deterministic per
// seed. layer_dims must all be >= 1 and contain at least [p, K].
EncoderParams init_encoder(const std::vector<std::size_t>& layer_dims, Rng& rng);

// Y = W_L relu(... relu(W_1 X^T + b_1) ...) + b_L, rows of X are inputs.
DenseMatrix forward(const EncoderParams& params, const DenseMatrix& x, ForwardTrace* trace = nullptr);

// 1-hot fast path: row r of the batch is the one-hot vector for ids[r].
// Produces bit-identical results to forward() on the gathered dense batch.
DenseMatrix forward_onehot(const EncoderParams& params, const std::vector<std::uint32_t>& ids,
                           ForwardTrace* trace = nullptr);

// Exact reverse-mode gradients; ReLU subgradient at 0 is 0. If dx is
// non-null it receives dL/dX (dense batches only).
EncoderGrads backward(const EncoderParams& params, const ForwardTrace& trace, const DenseMatrix& dy,
                      DenseMatrix* dx = nullptr);

}  // namespace wips
