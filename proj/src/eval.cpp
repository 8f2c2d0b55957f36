#include "wips/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace wips {

double roc_auc(std::vector<ScoredPair> pairs) {
    std::size_t pos = 0, neg = 0;
    for (const auto& sp : pairs) {
        if (!std::isfinite(sp.score) && std::isnan(sp.score))
            throw std::invalid_argument("roc_auc: NaN score");
        (sp.label ? pos : neg) += 1;
    }
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("roc_auc: need at least one positive and one negative");

    std::sort(pairs.begin(), pairs.end(),
              [](const ScoredPair& a, const ScoredPair& b) { return a.score < b.score; });
    // Average ranks over tie groups; AUC = (R+ - P(P+1)/2) / (P N).
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < pairs.size()) {
        std::size_t j = i;
        while (j < pairs.size() && pairs[j].score == pairs[i].score) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k)
            if (pairs[k].label) rank_sum_pos += avg_rank;
        i = j;
    }
    const double p = static_cast<double>(pos), n = static_cast<double>(neg);
    return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n);
}

namespace {

std::uint64_t pack(std::uint32_t i, std::uint32_t j) {
    return (static_cast<std::uint64_t>(i) << 32) | j;
}

}  // namespace

PairSet reconstruction_pairs(const Graph& g, std::uint64_t seed, std::size_t exhaustive_limit) {
    PairSet ps;
    std::size_t positives = 0;
    for (const auto& e : g.edges)
        if (e.w > 0.0) {
            ps.pairs.emplace_back(e.i, e.j);
            ps.labels.push_back(1);
            ++positives;
        }
    if (positives == 0) throw std::invalid_argument("reconstruction_pairs: graph has no positive edges");

    if (g.n <= exhaustive_limit) {
        for (std::uint32_t i = 0; i + 1 < g.n; ++i)
            for (std::uint32_t j = i + 1; j < g.n; ++j)
                if (!g.has_edge(i, j)) {
                    ps.pairs.emplace_back(i, j);
                    ps.labels.push_back(0);
                }
    } else {
        Rng rng(seed);
        std::unordered_set<std::uint64_t> taken;
        const std::size_t want = 10 * positives;
        while (taken.size() < want) {
            std::uint32_t i = static_cast<std::uint32_t>(rng.uniform_index(g.n));
            std::uint32_t j = static_cast<std::uint32_t>(rng.uniform_index(g.n));
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            if (g.has_edge(i, j)) continue;
            if (!taken.insert(pack(i, j)).second) continue;
            ps.pairs.emplace_back(i, j);
            ps.labels.push_back(0);
        }
    }
    return ps;
}

PairSet linkpred_pairs(const Graph& full, const std::vector<std::uint32_t>& eval_nodes,
                       const std::vector<std::uint32_t>& candidates, std::uint64_t seed,
                       std::size_t exhaustive_limit) {
    if (eval_nodes.empty()) throw std::invalid_argument("linkpred_pairs: empty evaluation set");
    std::unordered_set<std::uint32_t> eval_set(eval_nodes.begin(), eval_nodes.end());

    PairSet ps;
    std::size_t positives = 0;
    auto consider = [&](std::uint32_t u, std::uint32_t v, bool positive, bool record) {
        // Canonical: count (u,v) once when both endpoints are held out.
        if (eval_set.count(v) && v <= u) return false;
        if (record) {
            ps.pairs.emplace_back(u, v);
            ps.labels.push_back(positive ? 1 : 0);
        }
        return true;
    };

    for (std::uint32_t u : eval_nodes)
        for (std::uint32_t v : candidates) {
            if (u == v) continue;
            if (full.has_edge(u, v) && consider(u, v, true, true)) ++positives;
        }
    if (positives == 0)
        throw std::invalid_argument("linkpred_pairs: no positive links touch the evaluation set");

    const std::size_t universe = eval_nodes.size() * candidates.size();
    if (full.n <= exhaustive_limit) {
        for (std::uint32_t u : eval_nodes)
            for (std::uint32_t v : candidates) {
                if (u == v || full.has_edge(u, v)) continue;
                consider(u, v, false, true);
            }
    } else {
        Rng rng(seed);
        std::unordered_set<std::uint64_t> taken;
        const std::size_t want = std::min(10 * positives, universe);
        std::size_t guard = 0;
        while (taken.size() < want && guard < 1000 * want) {
            ++guard;
            const std::uint32_t u = eval_nodes[rng.uniform_index(eval_nodes.size())];
            const std::uint32_t v = candidates[rng.uniform_index(candidates.size())];
            if (u == v || full.has_edge(u, v)) continue;
            if (!consider(u, v, false, false)) continue;
            if (!taken.insert(pack(u, v)).second) continue;
            ps.pairs.emplace_back(u, v);
            ps.labels.push_back(0);
        }
    }
    return ps;
}

double score_pair(const DenseMatrix& features, const SimilarityHead& head, std::uint32_t i,
                  std::uint32_t j) {
    const std::size_t k = features.cols();
    return head_value(head, std::span<const double>(features.row(i), k),
                      std::span<const double>(features.row(j), k));
}

double auc_for_pairs(const DenseMatrix& features, const SimilarityHead& head, const PairSet& ps) {
    std::vector<ScoredPair> scored;
    scored.reserve(ps.pairs.size());
    for (std::size_t k = 0; k < ps.pairs.size(); ++k)
        scored.push_back({score_pair(features, head, ps.pairs[k].first, ps.pairs[k].second),
                          ps.labels[k]});
    return roc_auc(std::move(scored));
}

namespace {

void softmax_row(const double* logits, std::size_t c, double* out) {
    double m = logits[0];
    for (std::size_t k = 1; k < c; ++k) m = std::max(m, logits[k]);
    double z = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        out[k] = std::exp(logits[k] - m);
        z += out[k];
    }
    for (std::size_t k = 0; k < c; ++k) out[k] /= z;
}

}  // namespace

ClassifierModel train_classifier(const DenseMatrix& features, const std::vector<int>& labels,
                                 const ClassifierConfig& cfg) {
    const std::size_t n = features.rows(), d = features.cols();
    if (labels.size() != n) throw std::invalid_argument("train_classifier: label count mismatch");
    if (n == 0) throw std::invalid_argument("train_classifier: no rows");
    int max_label = 0;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("train_classifier: negative label");
        max_label = std::max(max_label, l);
    }
    const std::size_t c = static_cast<std::size_t>(max_label) + 1;
    if (c < 2) throw std::invalid_argument("train_classifier: need at least two classes");

    ClassifierModel m;
    m.weights = DenseMatrix(c, d);
    m.bias.assign(c, 0.0);

    std::vector<double> probs(c);
    DenseMatrix gw(c, d);
    std::vector<double> gb(c);
    std::vector<double> logits(c);
    const double inv_n = 1.0 / static_cast<double>(n);

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        for (auto& v : gw.data()) v = 0.0;
        std::fill(gb.begin(), gb.end(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const double* x = features.row(r);
            for (std::size_t k = 0; k < c; ++k) {
                const double* wk = m.weights.row(k);
                double s = m.bias[k];
                for (std::size_t f = 0; f < d; ++f) s += wk[f] * x[f];
                logits[k] = s;
            }
            softmax_row(logits.data(), c, probs.data());
            probs[static_cast<std::size_t>(labels[r])] -= 1.0;
            for (std::size_t k = 0; k < c; ++k) {
                const double g = probs[k] * inv_n;
                gb[k] += g;
                double* gwk = gw.row(k);
                for (std::size_t f = 0; f < d; ++f) gwk[f] += g * x[f];
            }
        }
        for (std::size_t k = 0; k < c; ++k) {
            double* wk = m.weights.row(k);
            const double* gwk = gw.row(k);
            for (std::size_t f = 0; f < d; ++f)
                wk[f] -= cfg.learning_rate * (gwk[f] + cfg.l2 * wk[f]);
            m.bias[k] -= cfg.learning_rate * gb[k];
        }
    }
    return m;
}

double classify_accuracy(const ClassifierModel& model, const DenseMatrix& features,
                         const std::vector<int>& labels) {
    const std::size_t n = features.rows();
    if (n == 0) throw std::invalid_argument("classify_accuracy: no rows");
    if (labels.size() != n) throw std::invalid_argument("classify_accuracy: label count mismatch");
    if (features.cols() != model.weights.cols())
        throw std::invalid_argument("classify_accuracy: feature width mismatch");
    std::size_t correct = 0;
    const std::size_t c = model.classes();
    for (std::size_t r = 0; r < n; ++r) {
        const double* x = features.row(r);
        std::size_t best = 0;
        double best_score = -HUGE_VAL;
        for (std::size_t k = 0; k < c; ++k) {
            const double* wk = model.weights.row(k);
            double s = model.bias[k];
            for (std::size_t f = 0; f < features.cols(); ++f) s += wk[f] * x[f];
            if (s > best_score) {  // strict: ties keep the lowest class index
                best_score = s;
                best = k;
            }
        }
        if (static_cast<int>(best) == labels[r]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace wips
