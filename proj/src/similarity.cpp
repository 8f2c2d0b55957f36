#include "wips/similarity.hpp"

#include <cmath>
#include <stdexcept>

namespace wips {

std::string head_kind_name(HeadKind k) {
    switch (k) {
        case HeadKind::IPS: return "ips";
        case HeadKind::SIPS: return "sips";
        case HeadKind::IPDS: return "ipds";
        case HeadKind::WIPS: return "wips";
        case HeadKind::NegPoincare: return "poincare";
    }
    throw std::logic_error("head_kind_name: bad enum");
}

HeadKind head_kind_from_name(const std::string& name) {
    if (name == "ips") return HeadKind::IPS;
    if (name == "sips") return HeadKind::SIPS;
    if (name == "ipds") return HeadKind::IPDS;
    if (name == "wips") return HeadKind::WIPS;
    if (name == "poincare") return HeadKind::NegPoincare;
    throw std::invalid_argument("unknown similarity head: " + name);
}

void SimilarityHead::validate() const {
    if (dim == 0) throw std::invalid_argument("similarity head: dim must be >= 1");
    if (kind == HeadKind::IPDS && q > dim)
        throw std::invalid_argument("ipds: q = " + std::to_string(q) + " exceeds K = " +
                                    std::to_string(dim));
    if (kind == HeadKind::WIPS && lambda.size() != dim)
        throw std::invalid_argument("wips: lambda length does not match K");
    if (kind == HeadKind::NegPoincare && !(eps_ball > 0.0 && eps_ball <= 0.01))
        throw std::invalid_argument("poincare: eps_ball must lie in (0, 0.01]");
}

namespace {

void check_same_length(std::span<const double> a, std::span<const double> b, const char* who) {
    if (a.size() != b.size()) throw std::invalid_argument(std::string(who) + ": length mismatch");
}

// All inner-product heads accumulate as (weight * (y_k * y'_k)) in a single
// left-to-right pass: the inner product commutes, so every head is bitwise
// symmetric, and with weights of exactly +-1 the heads are bitwise identical
// to each other, which the reduction identities assert.
double weighted_dot(std::span<const double> y, std::span<const double> y2, const double* w,
                    std::size_t split_q) {
    double s = 0.0;
    const std::size_t k_pos = y.size() - split_q;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double wk = w ? w[k] : (k < k_pos ? 1.0 : -1.0);
        s += wk * (y[k] * y2[k]);
    }
    return s;
}

struct Clipped {
    std::vector<double> v;
    double norm_raw = 0.0;
    bool clipped = false;
};

Clipped clip_to_ball(std::span<const double> y, double eps_ball) {
    Clipped c;
    c.v.assign(y.begin(), y.end());
    double sq = 0.0;
    for (double x : c.v) sq += x * x;
    c.norm_raw = std::sqrt(sq);
    const double limit = 1.0 - eps_ball;
    if (c.norm_raw >= limit) {
        c.clipped = true;
        const double scale = limit / c.norm_raw;
        for (double& x : c.v) x *= scale;
    }
    return c;
}

double sq_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

double sim_ips(std::span<const double> y, std::span<const double> y2) {
    check_same_length(y, y2, "sim_ips");
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) s += y[k] * y2[k];
    return s;
}

double sim_sips(std::span<const double> yt, double u, std::span<const double> yt2, double u2) {
    check_same_length(yt, yt2, "sim_sips");
    return sim_ips(yt, yt2) + (u + u2);  // biases grouped so the value is symmetric bitwise
}

double sim_ipds(std::span<const double> y, std::span<const double> y2, std::size_t q) {
    check_same_length(y, y2, "sim_ipds");
    if (q > y.size()) throw std::invalid_argument("sim_ipds: q exceeds K");
    return weighted_dot(y, y2, nullptr, q);
}

double sim_wips(std::span<const double> y, std::span<const double> y2,
                std::span<const double> lambda) {
    check_same_length(y, y2, "sim_wips");
    if (lambda.size() != y.size()) throw std::invalid_argument("sim_wips: lambda length mismatch");
    return weighted_dot(y, y2, lambda.data(), 0);
}

double sim_neg_poincare(std::span<const double> y, std::span<const double> y2, double eps_ball) {
    check_same_length(y, y2, "sim_neg_poincare");
    const Clipped u = clip_to_ball(y, eps_ball);
    const Clipped v = clip_to_ball(y2, eps_ball);
    double diff_sq = 0.0;
    for (std::size_t k = 0; k < u.v.size(); ++k) {
        const double d = u.v[k] - v.v[k];
        diff_sq += d * d;
    }
    if (diff_sq == 0.0) return 0.0;
    const double alpha = 1.0 - sq_norm(u.v);
    const double beta = 1.0 - sq_norm(v.v);
    const double z = 1.0 + 2.0 * diff_sq / (alpha * beta);
    return -std::acosh(z);
}

std::vector<double> to_hyperbolic(std::span<const double> y, double eps_ball) {
    const Clipped u = clip_to_ball(y, eps_ball);
    const double scale = 2.0 / (1.0 - sq_norm(u.v));
    std::vector<double> out(u.v.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = scale * u.v[k];
    return out;
}

std::vector<double> sips_as_ipds_embedding(std::span<const double> yt, double u) {
    std::vector<double> out;
    out.reserve(yt.size() + 3);
    out.assign(yt.begin(), yt.end());
    out.push_back(u);
    out.push_back(1.0);
    out.push_back(u - 1.0);
    return out;
}

double head_value(const SimilarityHead& head, std::span<const double> y,
                  std::span<const double> y2) {
    if (y.size() != head.dim || y2.size() != head.dim)
        throw std::invalid_argument("head_value: feature width does not match head");
    switch (head.kind) {
        case HeadKind::IPS:
            return sim_ips(y, y2);
        case HeadKind::SIPS:
            return sim_sips(y.first(head.dim - 1), y[head.dim - 1], y2.first(head.dim - 1),
                            y2[head.dim - 1]);
        case HeadKind::IPDS:
            return sim_ipds(y, y2, head.q);
        case HeadKind::WIPS:
            return sim_wips(y, y2, head.lambda);
        case HeadKind::NegPoincare:
            return sim_neg_poincare(y, y2, head.eps_ball);
    }
    throw std::logic_error("head_value: bad enum");
}

namespace {

// d(-poincare_distance)/du at clipped points, then pulled back through the
// radial projection for inputs that were clipped.
void neg_poincare_grad(std::span<const double> y, std::span<const double> y2, double eps_ball,
                       std::vector<double>& d_y, std::vector<double>& d_y2) {
    const std::size_t K = y.size();
    d_y.assign(K, 0.0);
    d_y2.assign(K, 0.0);
    const Clipped u = clip_to_ball(y, eps_ball);
    const Clipped v = clip_to_ball(y2, eps_ball);

    double diff_sq = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double d = u.v[k] - v.v[k];
        diff_sq += d * d;
    }
    if (diff_sq == 0.0) return;  // distance minimum; subgradient 0

    const double alpha = 1.0 - sq_norm(u.v);
    const double beta = 1.0 - sq_norm(v.v);
    const double zm1 = 2.0 * diff_sq / (alpha * beta);
    const double z = 1.0 + zm1;
    // 1/sqrt(z^2 - 1) computed from z - 1 to keep precision for close pairs.
    const double dacosh = 1.0 / std::sqrt(zm1 * (z + 1.0));

    std::vector<double> gu(K), gv(K);
    for (std::size_t k = 0; k < K; ++k) {
        // dz/du_k = 4 (u_k - v_k) / (alpha beta) + 4 diff_sq u_k / (alpha^2 beta)
        gu[k] = -dacosh * (4.0 * (u.v[k] - v.v[k]) / (alpha * beta) +
                           4.0 * diff_sq * u.v[k] / (alpha * alpha * beta));
        gv[k] = -dacosh * (4.0 * (v.v[k] - u.v[k]) / (alpha * beta) +
                           4.0 * diff_sq * v.v[k] / (beta * beta * alpha));
    }

    const auto pull_back = [](const Clipped& c, const std::vector<double>& g,
                              std::vector<double>& out, double eps) {
        const std::size_t n = g.size();
        if (!c.clipped) {
            out = g;
            return;
        }
        // Projection y -> limit * y / |y| has Jacobian (limit/|y|)(I - n n^T);
        // the radial component vanishes.
        const double limit = 1.0 - eps;
        double dot = 0.0, csq = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            dot += g[k] * c.v[k];
            csq += c.v[k] * c.v[k];
        }
        const double radial = dot / csq;  // csq = limit^2 > 0
        const double s = limit / c.norm_raw;
        for (std::size_t k = 0; k < n; ++k) out[k] = s * (g[k] - radial * c.v[k]);
    };
    pull_back(u, gu, d_y, eps_ball);
    pull_back(v, gv, d_y2, eps_ball);
}

}  // namespace

HeadGradients head_gradients(const SimilarityHead& head, std::span<const double> y,
                             std::span<const double> y2) {
    if (y.size() != head.dim || y2.size() != head.dim)
        throw std::invalid_argument("head_gradients: feature width does not match head");
    const std::size_t K = head.dim;
    HeadGradients g;
    switch (head.kind) {
        case HeadKind::IPS:
            g.d_y.assign(y2.begin(), y2.end());
            g.d_y_prime.assign(y.begin(), y.end());
            break;
        case HeadKind::SIPS:
            g.d_y.assign(y2.begin(), y2.end());
            g.d_y_prime.assign(y.begin(), y.end());
            g.d_y[K - 1] = 1.0;
            g.d_y_prime[K - 1] = 1.0;
            break;
        case HeadKind::IPDS: {
            g.d_y.resize(K);
            g.d_y_prime.resize(K);
            const std::size_t k_pos = K - head.q;
            for (std::size_t k = 0; k < K; ++k) {
                const double s = k < k_pos ? 1.0 : -1.0;
                g.d_y[k] = s * y2[k];
                g.d_y_prime[k] = s * y[k];
            }
            break;
        }
        case HeadKind::WIPS: {
            g.d_y.resize(K);
            g.d_y_prime.resize(K);
            g.d_lambda.resize(K);
            for (std::size_t k = 0; k < K; ++k) {
                g.d_y[k] = head.lambda[k] * y2[k];
                g.d_y_prime[k] = head.lambda[k] * y[k];
                g.d_lambda[k] = y[k] * y2[k];
            }
            break;
        }
        case HeadKind::NegPoincare:
            neg_poincare_grad(y, y2, head.eps_ball, g.d_y, g.d_y_prime);
            break;
    }
    return g;
}

}  // namespace wips
