#include "wips/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace wips {

std::vector<std::size_t> TrainConfig::layer_dims(std::size_t input_dim,
                                                 std::size_t feature_dim) const {
    std::vector<std::size_t> dims;
    dims.push_back(input_dim);
    for (std::size_t h : hidden_dims) dims.push_back(h);
    dims.push_back(feature_dim);
    return dims;
}

DenseMatrix embed_nodes(const EncoderParams& params, const Graph& g,
                        const std::vector<std::uint32_t>& ids) {
    if (g.onehot) return forward_onehot(params, ids);
    return forward(params, gather_features(g, ids));
}

DenseMatrix embed_all_nodes(const EncoderParams& params, const Graph& g) {
    std::vector<std::uint32_t> ids(g.n);
    for (std::size_t i = 0; i < g.n; ++i) ids[i] = static_cast<std::uint32_t>(i);
    return embed_nodes(params, g, ids);
}

LossGrads batch_loss_and_grads(const TrainState& state, const PairBatch& batch, const Graph& g) {
    if (batch.positives.empty() && batch.negatives.empty())
        throw std::invalid_argument("batch_loss_and_grads: empty batch");

    // Local row index per node, first-appearance order.
    std::vector<std::uint32_t> nodes;
    std::unordered_map<std::uint32_t, std::uint32_t> local;
    auto local_of = [&](std::uint32_t id) {
        auto [it, inserted] = local.emplace(id, static_cast<std::uint32_t>(nodes.size()));
        if (inserted) nodes.push_back(id);
        return it->second;
    };
    struct Term {
        std::uint32_t a, b;  // local rows
        std::uint32_t i, j;  // graph ids, for diagnostics
        int label;
    };
    std::vector<Term> terms;
    terms.reserve(batch.positives.size() + batch.negatives.size());
    for (const auto& p : batch.positives)
        terms.push_back({local_of(p.i), local_of(p.j), p.i, p.j, p.w > 0.0 ? 1 : 0});
    for (const auto& q : batch.negatives) terms.push_back({local_of(q.i), local_of(q.j), q.i, q.j, 0});

    ForwardTrace trace;
    DenseMatrix y = g.onehot ? forward_onehot(state.encoder, nodes, &trace)
                             : forward(state.encoder, gather_features(g, nodes), &trace);
    const std::size_t K = state.head.dim;

    LossGrads out;
    if (state.head.has_lambda()) out.d_lambda.assign(K, 0.0);
    DenseMatrix dy(y.rows(), K);
    const double inv_m = 1.0 / static_cast<double>(terms.size());

    double loss = 0.0;
    for (const auto& t : terms) {
        std::span<const double> ya(y.row(t.a), K), yb(y.row(t.b), K);
        const double h = head_value(state.head, ya, yb);
        // label 1: -log sigma(h); label 0: -log sigma(-h).
        const double term_loss = t.label ? -log_sigmoid(h) : -log_sigmoid(-h);
        if (!std::isfinite(term_loss))
            throw std::runtime_error("non-finite loss at pair (" + std::to_string(t.i) + "," +
                                     std::to_string(t.j) + ")");
        loss += term_loss * inv_m;
        const double dh = (t.label ? -sigmoid(-h) : sigmoid(h)) * inv_m;
        const HeadGradients hg = head_gradients(state.head, ya, yb);
        double* da = dy.row(t.a);
        double* db = dy.row(t.b);
        for (std::size_t k = 0; k < K; ++k) {
            da[k] += dh * hg.d_y[k];
            db[k] += dh * hg.d_y_prime[k];
        }
        if (!out.d_lambda.empty())
            for (std::size_t k = 0; k < K; ++k) out.d_lambda[k] += dh * hg.d_lambda[k];
    }
    out.loss = loss;
    out.encoder = backward(state.encoder, trace, dy);
    return out;
}

namespace {

std::size_t flat_param_count(const TrainState& s) {
    std::size_t c = s.encoder.parameter_count();
    if (s.head.has_lambda()) c += s.head.lambda.size();
    return c;
}

// Visits parameters and their gradients in a fixed flat order:
// per layer weights then biases, then lambda.
template <typename F>
void for_each_param(TrainState& s, const LossGrads& g, F&& f) {
    std::size_t idx = 0;
    for (std::size_t l = 0; l < s.encoder.num_layers(); ++l) {
        auto& w = s.encoder.weights[l].data();
        const auto& gw = g.encoder.weights[l].data();
        for (std::size_t k = 0; k < w.size(); ++k) f(idx++, w[k], gw[k]);
        auto& b = s.encoder.biases[l];
        const auto& gb = g.encoder.biases[l];
        for (std::size_t k = 0; k < b.size(); ++k) f(idx++, b[k], gb[k]);
    }
    if (s.head.has_lambda()) {
        const bool frozen = s.freeze_lambda;
        for (std::size_t k = 0; k < s.head.lambda.size(); ++k) {
            const double gk = frozen ? 0.0 : g.d_lambda[k];
            f(idx++, s.head.lambda[k], gk);
        }
    }
}

}  // namespace

void adam_step(TrainState& state, const LossGrads& grads, double lr, const TrainConfig& cfg) {
    const std::size_t count = flat_param_count(state);
    if (state.adam_m.size() != count) {
        state.adam_m.assign(count, 0.0);
        state.adam_v.assign(count, 0.0);
    }
    state.iteration += 1;
    const double t = static_cast<double>(state.iteration);
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, t);
    for_each_param(state, grads, [&](std::size_t idx, double& p, double g) {
        double& m = state.adam_m[idx];
        double& v = state.adam_v[idx];
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g * g;
        p -= lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.adam_eps);
    });
}

TrainState init_train_state(const Graph& g, const SimilarityHead& head_spec,
                            const TrainConfig& cfg) {
    if (head_spec.dim == 0) throw std::invalid_argument("train: head dim must be >= 1");
    TrainState s;
    s.rng = Rng(cfg.seed);
    s.encoder = init_encoder(cfg.layer_dims(g.feature_dim(), head_spec.dim), s.rng);
    s.head = head_spec;
    s.freeze_lambda = cfg.freeze_lambda;
    if (s.head.kind == HeadKind::WIPS && s.head.lambda.empty()) {
        s.head.lambda.resize(s.head.dim);
        const double hi = 1.0 / static_cast<double>(s.head.dim);
        for (auto& l : s.head.lambda) l = s.rng.uniform_open(0.0, hi);
    }
    s.head.validate();
    return s;
}

namespace {

double validation_auc(const TrainState& state, const ValidationSpec& val) {
    // Embed only the nodes the validation pairs touch.
    std::vector<std::uint32_t> nodes;
    std::unordered_map<std::uint32_t, std::uint32_t> local;
    auto local_of = [&](std::uint32_t id) {
        auto [it, inserted] = local.emplace(id, static_cast<std::uint32_t>(nodes.size()));
        if (inserted) nodes.push_back(id);
        return it->second;
    };
    PairSet remapped;
    remapped.labels = val.pairs.labels;
    remapped.pairs.reserve(val.pairs.pairs.size());
    for (const auto& pr : val.pairs.pairs)
        remapped.pairs.emplace_back(local_of(pr.first), local_of(pr.second));
    const DenseMatrix y = embed_nodes(state.encoder, *val.graph, nodes);
    return auc_for_pairs(y, state.head, remapped);
}

Checkpoint snapshot(const TrainState& state, const TrainConfig& cfg, std::size_t iteration,
                    std::optional<double> best_val) {
    Checkpoint c;
    c.head = state.head;
    c.encoder = state.encoder;
    c.iteration = iteration;
    c.best_val_auc = best_val;
    c.config = cfg;
    return c;
}

}  // namespace

TrainResult train(const Graph& g, const SimilarityHead& head_spec, const TrainConfig& cfg,
                  const ValidationSpec* validation) {
    if (g.edges.empty()) throw std::invalid_argument("train: graph has no edges");
    if (cfg.max_iterations < 1) throw std::invalid_argument("train: max_iterations must be >= 1");
    if (validation && (validation->graph == nullptr || validation->pairs.pairs.empty()))
        validation = nullptr;  // fall back to final-iterate checkpoint

    TrainState state = init_train_state(g, head_spec, cfg);

    TrainResult result;
    std::deque<double> window;
    double window_sum = 0.0;
    std::size_t false_negatives = 0, negatives_total = 0;
    std::optional<double> best_auc;
    std::optional<Checkpoint> best_ckpt;

    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        PairBatch batch = sample_batch(g, cfg.batch_size, cfg.negatives_per_positive, state.rng,
                                       cfg.negative_sampling);
        for (const auto& q : batch.negatives)
            if (g.has_edge(q.i, q.j)) ++false_negatives;
        negatives_total += batch.negatives.size();

        LossGrads grads;
        try {
            grads = batch_loss_and_grads(state, batch, g);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("training diverged at iteration " + std::to_string(it) + ": " +
                                     e.what());
        }
        adam_step(state, grads, cfg.learning_rate, cfg);

        window.push_back(grads.loss);
        window_sum += grads.loss;
        if (window.size() > 100) {
            window_sum -= window.front();
            window.pop_front();
        }

        if (it % cfg.eval_interval == 0 || it == cfg.max_iterations) {
            CurvePoint cp;
            cp.iteration = it;
            cp.loss = window_sum / static_cast<double>(window.size());
            if (validation) {
                const double auc = validation_auc(state, *validation);
                cp.val_auc = auc;
                if (!best_auc || auc > *best_auc) {  // strict: ties keep earlier
                    best_auc = auc;
                    best_ckpt = snapshot(state, cfg, it, best_auc);
                }
            }
            result.curve.push_back(cp);
        }
    }

    result.false_negative_rate =
        negatives_total ? static_cast<double>(false_negatives) / static_cast<double>(negatives_total)
                        : 0.0;
    result.checkpoint = best_ckpt ? std::move(*best_ckpt)
                                  : snapshot(state, cfg, state.iteration, std::nullopt);
    return result;
}

GridResult grid_search(const Graph& g, const SimilarityHead& head_spec, const TrainConfig& cfg,
                       const ValidationSpec& validation, std::size_t jobs) {
    if (validation.graph == nullptr || validation.pairs.pairs.empty())
        throw std::invalid_argument("grid_search: a validation set is required to rank cells");
    std::vector<double> lrs = cfg.lr_grid.empty() ? std::vector<double>{cfg.learning_rate}
                                                  : cfg.lr_grid;
    std::vector<long> qs;
    if (head_spec.kind == HeadKind::IPDS) {
        if (cfg.q_ratio_grid.empty()) throw std::invalid_argument("grid_search: empty q grid");
        for (double r : cfg.q_ratio_grid) {
            const long q = std::clamp<long>(std::lround(r * static_cast<double>(head_spec.dim)), 0,
                                            static_cast<long>(head_spec.dim));
            qs.push_back(q);
        }
        qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    } else {
        qs.push_back(-1);  // heads without q: cells = |lr grid|
    }

    struct Cell {
        TrainConfig cfg;
        SimilarityHead head;
        TrainResult result;
    };
    std::vector<Cell> cells;
    for (double lr : lrs)
        for (long q : qs) {
            Cell c;
            c.cfg = cfg;
            c.cfg.learning_rate = lr;
            c.cfg.lr_grid.clear();
            c.head = head_spec;
            if (q >= 0) c.head.q = static_cast<std::size_t>(q);
            // Fresh seed-derived stream per cell, stable in cell order.
            c.cfg.seed = Rng(cfg.seed).fork(cells.size() + 1).seed();
            cells.push_back(std::move(c));
        }

    const auto run_cell = [&](Cell& c) { c.result = train(g, c.head, c.cfg, &validation); };
    if (jobs <= 1 || cells.size() <= 1) {
        for (auto& c : cells) run_cell(c);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::mutex mu;
        const std::size_t workers = std::min(jobs, cells.size());
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t mine;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= cells.size()) return;
                        mine = next++;
                    }
                    run_cell(cells[mine]);
                }
            });
        for (auto& t : pool) t.join();
    }

    GridResult out;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& r = cells[i].result;
        GridCell gc;
        gc.learning_rate = cells[i].cfg.learning_rate;
        gc.q = (head_spec.kind == HeadKind::IPDS) ? static_cast<long>(cells[i].head.q) : -1;
        gc.best_val_auc = r.checkpoint.best_val_auc.value_or(0.0);
        gc.best_iteration = r.checkpoint.iteration;
        out.cells.push_back(gc);
        if (gc.best_val_auc > out.cells[best_idx].best_val_auc) best_idx = i;
    }
    out.best = cells[best_idx].result.checkpoint;
    return out;
}

}  // namespace wips
