#include "wips/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace wips {

std::size_t EncoderParams::parameter_count() const {
    std::size_t c = 0;
    for (const auto& w : weights) c += w.size();
    for (const auto& b : biases) c += b.size();
    return c;
}

void EncoderGrads::accumulate(const EncoderGrads& other, double s) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t k = 0; k < weights[l].size(); ++k)
            weights[l].data()[k] += s * other.weights[l].data()[k];
        for (std::size_t k = 0; k < biases[l].size(); ++k) biases[l][k] += s * other.biases[l][k];
    }
}

void EncoderGrads::scale(double s) {
    for (auto& w : weights)
        for (auto& v : w.data()) v *= s;
    for (auto& b : biases)
        for (auto& v : b) v *= s;
}

EncoderGrads zero_grads(const EncoderParams& params) {
    EncoderGrads g;
    for (const auto& w : params.weights) g.weights.emplace_back(w.rows(), w.cols());
    for (const auto& b : params.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

EncoderParams init_encoder(const std::vector<std::size_t>& layer_dims, Rng& rng) {
    if (layer_dims.size() < 2)
        throw std::invalid_argument("init_encoder: need at least [input_dim, output_dim]");
    for (std::size_t d : layer_dims)
        if (d == 0) throw std::invalid_argument("init_encoder: zero layer dimension");

    EncoderParams p;
    p.layer_dims = layer_dims;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const std::size_t fan_in = layer_dims[l], fan_out = layer_dims[l + 1];
        DenseMatrix w(fan_out, fan_in);
        const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (auto& v : w.data()) v = std_dev * rng.normal();
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(fan_out, 0.0);
    }
    return p;
}

namespace {

void apply_layers(const EncoderParams& params, DenseMatrix h, ForwardTrace* trace,
                  DenseMatrix& out, std::size_t first_layer) {
    const std::size_t num_layers = params.num_layers();
    for (std::size_t l = first_layer; l < num_layers; ++l) {
        const DenseMatrix& w = params.weights[l];
        const auto& b = params.biases[l];
        DenseMatrix z(h.rows(), w.rows());
        for (std::size_t r = 0; r < h.rows(); ++r) {
            const double* hr = h.row(r);
            double* zr = z.row(r);
            for (std::size_t o = 0; o < w.rows(); ++o) {
                const double* wo = w.row(o);
                double s = b[o];
                for (std::size_t c = 0; c < w.cols(); ++c) s += hr[c] * wo[c];
                zr[o] = s;
            }
        }
        const bool last = (l + 1 == num_layers);
        DenseMatrix a = z;
        if (!last)
            for (auto& v : a.data()) v = v > 0.0 ? v : 0.0;
        if (trace) {
            trace->pre.push_back(std::move(z));
            trace->act.push_back(a);
        }
        h = std::move(a);
    }
    out = std::move(h);
}

}  // namespace

DenseMatrix forward(const EncoderParams& params, const DenseMatrix& x, ForwardTrace* trace) {
    if (x.cols() != params.input_dim())
        throw std::invalid_argument("forward: input width " + std::to_string(x.cols()) +
                                    " does not match encoder input dim " +
                                    std::to_string(params.input_dim()));
    if (trace) {
        *trace = ForwardTrace{};
        trace->input = x;
    }
    DenseMatrix out;
    apply_layers(params, x, trace, out, 0);
    return out;
}

DenseMatrix forward_onehot(const EncoderParams& params, const std::vector<std::uint32_t>& ids,
                           ForwardTrace* trace) {
    const std::size_t p = params.input_dim();
    for (std::uint32_t id : ids)
        if (id >= p) throw std::invalid_argument("forward_onehot: id out of range");
    if (trace) {
        *trace = ForwardTrace{};
        trace->input_onehot = true;
        trace->input_ids = ids;
    }
    // First layer is a column lookup: z = b + W[:, id].
    const DenseMatrix& w = params.weights[0];
    const auto& b = params.biases[0];
    DenseMatrix z(ids.size(), w.rows());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        double* zr = z.row(r);
        for (std::size_t o = 0; o < w.rows(); ++o) zr[o] = b[o] + w(o, ids[r]);
    }
    const bool only_layer = params.num_layers() == 1;
    DenseMatrix a = z;
    if (!only_layer)
        for (auto& v : a.data()) v = v > 0.0 ? v : 0.0;
    if (trace) {
        trace->pre.push_back(std::move(z));
        trace->act.push_back(a);
    }
    if (only_layer) return a;
    DenseMatrix out;
    apply_layers(params, std::move(a), trace, out, 1);
    return out;
}

EncoderGrads backward(const EncoderParams& params, const ForwardTrace& trace, const DenseMatrix& dy,
                      DenseMatrix* dx) {
    const std::size_t num_layers = params.num_layers();
    if (trace.pre.size() != num_layers)
        throw std::invalid_argument("backward: trace does not match encoder depth");
    if (dy.rows() != trace.pre.back().rows() || dy.cols() != params.output_dim())
        throw std::invalid_argument("backward: dY shape mismatch");

    EncoderGrads grads = zero_grads(params);
    DenseMatrix dz = dy;  // output layer has no activation
    for (std::size_t li = num_layers; li-- > 0;) {
        const DenseMatrix& w = params.weights[li];
        // Input to this layer: previous activation, or the batch input.
        const DenseMatrix* in = (li == 0) ? &trace.input : &trace.act[li - 1];
        const bool in_onehot = (li == 0) && trace.input_onehot;

        // dW = dZ^T * input, db = column sums of dZ; batch index innermost
        // ascending so the 1-hot and dense paths accumulate identically.
        DenseMatrix& dw = grads.weights[li];
        auto& db = grads.biases[li];
        for (std::size_t r = 0; r < dz.rows(); ++r) {
            const double* dzr = dz.row(r);
            for (std::size_t o = 0; o < w.rows(); ++o) {
                const double g = dzr[o];
                db[o] += g;
                if (g == 0.0) continue;
                double* dwo = dw.row(o);
                if (in_onehot) {
                    dwo[trace.input_ids[r]] += g;
                } else {
                    const double* inr = in->row(r);
                    for (std::size_t c = 0; c < w.cols(); ++c) dwo[c] += g * inr[c];
                }
            }
        }

        const bool need_dinput = li > 0 || dx != nullptr;
        if (!need_dinput) break;
        if (li == 0 && in_onehot)
            throw std::invalid_argument("backward: dX is undefined for 1-hot input batches");

        DenseMatrix din(dz.rows(), w.cols());
        for (std::size_t r = 0; r < dz.rows(); ++r) {
            const double* dzr = dz.row(r);
            double* dr = din.row(r);
            for (std::size_t o = 0; o < w.rows(); ++o) {
                const double g = dzr[o];
                if (g == 0.0) continue;
                const double* wo = w.row(o);
                for (std::size_t c = 0; c < w.cols(); ++c) dr[c] += g * wo[c];
            }
        }
        if (li == 0) {
            *dx = std::move(din);
            break;
        }
        // ReLU backprop; subgradient at exactly 0 is 0.
        const DenseMatrix& pre = trace.pre[li - 1];
        for (std::size_t k = 0; k < din.size(); ++k)
            if (pre.data()[k] <= 0.0) din.data()[k] = 0.0;
        dz = std::move(din);
    }
    return grads;
}

}  // namespace wips
