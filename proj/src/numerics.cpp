#include "wips/numerics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace wips {

bool DenseMatrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

DenseMatrix matmul_bt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("matmul_bt: inner dimensions differ");
    DenseMatrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* bj = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += ai[k] * bj[k];
            c(i, j) = s;
        }
    }
    return c;
}

DenseMatrix matmul_at(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("matmul_at: inner dimensions differ");
    DenseMatrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ak = a.row(k);
        const double* bk = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* ci = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

double frobenius_norm(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return std::sqrt(s);
}

double max_abs(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.data()) s = std::max(s, std::abs(v));
    return s;
}

namespace {

double off_diag_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace

EigenSym eigendecompose_sym(const DenseMatrix& h, double tol) {
    const std::size_t n = h.rows();
    if (n == 0 || h.cols() != n)
        throw std::invalid_argument("eigendecompose_sym: matrix must be square and non-empty");
    const double scale = std::max(1.0, max_abs(h));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(h(i, j) - h(j, i)) > 1e-12 * scale)
                throw std::invalid_argument("eigendecompose_sym: matrix is not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");

    DenseMatrix a = h;
    DenseMatrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    const double hnorm = frobenius_norm(h);
    const double target = 1e-12 * hnorm;
    const int max_sweeps = 100;

    double off = off_diag_norm(a);
    for (int sweep = 0; sweep < max_sweeps && off > target; ++sweep) {
        // Threshold: skip rotations that cannot move the off-diagonal mass.
        const double thresh = off / (static_cast<double>(n) * static_cast<double>(n));
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= thresh) continue;
                const double app = a(p, p), aqq = a(q, q);
                // Stable rotation (Golub & Van Loan, sym. Schur 2x2).
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        off = off_diag_norm(a);
    }

    if (off > tol * std::max(1.0, hnorm))
        throw std::runtime_error("eigendecompose_sym: no convergence after 100 sweeps, residual " +
                                 std::to_string(off));

    EigenSym out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);

    // Sort ascending, permuting eigenvector columns alongside.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return out.values[x] < out.values[y]; });
    EigenSym sorted;
    sorted.values.resize(n);
    sorted.vectors = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted.values[k] = out.values[order[k]];
        for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, k) = v(i, order[k]);
    }
    return sorted;
}

}  // namespace wips
