#pragma once

#include "wips/numerics.hpp"
#include "wips/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace wips {

// Rank-K signed factorization H ~ Y^T diag(lambda) Y: eigenvalues ordered by
// |lambda| descending (ties: larger signed value, then lower original
// index), rows of Y are the transposed unit eigenvectors.
struct SpectralFactorization {
    std::size_t rank = 0;
    std::vector<double> lambda;
    DenseMatrix y;  // rank x n

    double reconstruct(std::size_t i, std::size_t j) const;
    DenseMatrix reconstruct_all() const;
};

enum class KernelVerdict { PD, CPD_NOT_PD, NEG_DEF, INDEFINITE };

std::string verdict_name(KernelVerdict v);

struct KernelClass {
    KernelVerdict verdict;
    double min_eigenvalue;           // of H
    double max_eigenvalue;           // of H (scale witness)
    double min_centered_eigenvalue;  // of P H P, P = I - ones/n
};

SpectralFactorization wips_factorize(const DenseMatrix& h, std::size_t rank);

// PD iff lambda_min(H) >= -tol*s with s = max(1, |lambda|_max); NEG_DEF iff
// lambda_min(-H) >= -tol*s; CPD (not PD) iff the centered matrix P H P is
// PSD under the same tolerance; otherwise indefinite.
KernelClass classify_kernel(const DenseMatrix& h, double tol = 1e-9);

// Named Gram-matrix generators over row-vector points:
//   gaussian:<gamma>        exp(-gamma |x - x'|^2)
//   neg_sq_dist             -|x - x'|^2
//   neg_poincare:<eps>      negative Poincare distance (points clipped)
//   epanechnikov:<bw>       max(0, 1 - (|x - x'| / bw)^2)
//   random_indefinite:<q>:<K>:<seed>   Y^T diag(1..1,-1..-1) Y, random Y;
//                           ignores point values, uses the point count
DenseMatrix similarity_matrix(const DenseMatrix& points, const std::string& kernel);

struct HierarchyRow {
    std::string kernel;
    std::size_t n;
    std::size_t rank;
    KernelVerdict verdict;
    double residual_ips;   // nonnegative weights only (PSD truncation)
    double residual_q1;    // at most one negative direction
    double residual_wips;  // signed truncation, top-|lambda|
};

// Best-achievable rank-K approximation residuals under the three head
// constraints, per kernel and rank; demonstrates the containment
// IPS < SIPS < IPDS = WIPS on concrete Gram matrices.
std::vector<HierarchyRow> hierarchy_report(const DenseMatrix& points,
                                           const std::vector<std::string>& kernels,
                                           const std::vector<std::size_t>& ranks);

void write_hierarchy_tsv(std::ostream& out, const std::vector<HierarchyRow>& rows);

}  // namespace wips
