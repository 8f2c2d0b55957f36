#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wips {

enum class HeadKind { IPS, SIPS, IPDS, WIPS, NegPoincare };

std::string head_kind_name(HeadKind k);
HeadKind head_kind_from_name(const std::string& name);

// Similarity head g(y, y') over K-dimensional feature vectors.
//   IPS          <y, y'>
//   SIPS         <y~, y~'> + u + u'   (y = (y~, u), bias in the last coord)
//   IPDS(q)      <y+, y+'> - <y-, y-'> (y- = last q coords)
//   WIPS(lambda) sum_k lambda_k y_k y'_k, lambda learned, any sign
//   NegPoincare  -arcosh(1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2))), inputs
//                radially clipped to the ball of radius 1 - eps_ball
struct SimilarityHead {
    HeadKind kind = HeadKind::IPS;
    std::size_t dim = 0;          // K
    std::size_t q = 0;            // IPDS only, 0 <= q <= K
    std::vector<double> lambda;   // WIPS only, length K
    double eps_ball = 1e-5;       // NegPoincare only

    void validate() const;
    bool has_lambda() const { return kind == HeadKind::WIPS; }
};

struct HeadGradients {
    std::vector<double> d_y;
    std::vector<double> d_y_prime;
    std::vector<double> d_lambda;  // empty unless the head carries lambda
};

double sim_ips(std::span<const double> y, std::span<const double> y_prime);
double sim_sips(std::span<const double> y_tilde, double u, std::span<const double> y_tilde_prime,
                double u_prime);
double sim_ipds(std::span<const double> y, std::span<const double> y_prime, std::size_t q);
double sim_wips(std::span<const double> y, std::span<const double> y_prime,
                std::span<const double> lambda);
double sim_neg_poincare(std::span<const double> y, std::span<const double> y_prime,
                        double eps_ball);

// Radial clip to norm <= 1 - eps_ball, then componentwise scale by
// 2 / (1 - |y|^2): coordinates of the same point in the hyperboloid chart.
std::vector<double> to_hyperbolic(std::span<const double> y, double eps_ball);

// Embeds a SIPS feature (y~, u) of width K as (y~, u, 1, u-1), width K+2,
// so that IPDS with q = 1 reproduces the SIPS value exactly.
std::vector<double> sips_as_ipds_embedding(std::span<const double> y_tilde, double u);

double head_value(const SimilarityHead& head, std::span<const double> y,
                  std::span<const double> y_prime);

// Exact analytic gradients of head_value w.r.t. both inputs and, for WIPS,
// lambda. NegPoincare differentiates through the radial clip (the projection
// Jacobian zeroes the radial component for clipped inputs).
HeadGradients head_gradients(const SimilarityHead& head, std::span<const double> y,
                             std::span<const double> y_prime);

}  // namespace wips
