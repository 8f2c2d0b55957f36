#pragma once

#include <cstddef>
#include <cmath>
#include <string>
#include <vector>

namespace wips {

// Numerically stable logistic function; saturates smoothly, never overflows.
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// softplus(x) = log(1 + e^x) without overflow for |x| up to ~700.
inline double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// log(sigmoid(x)) = -softplus(-x); exact asymptote log_sigmoid(x) -> x as x -> -inf.
inline double log_sigmoid(double x) { return -softplus(-x); }

// Dense row-major matrix of 64-bit floats. All training and evaluation
// arithmetic is double precision; the matrices this engine handles are small.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;
    bool same_shape(const DenseMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    DenseMatrix transposed() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// C = A * B.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// C = A * B^T; the hot product in the encoder (weights are stored out x in).
DenseMatrix matmul_bt(const DenseMatrix& a, const DenseMatrix& b);
// C = A^T * B.
DenseMatrix matmul_at(const DenseMatrix& a, const DenseMatrix& b);

double frobenius_norm(const DenseMatrix& m);
double max_abs(const DenseMatrix& m);

struct EigenSym {
    std::vector<double> values;  // ascending
    DenseMatrix vectors;         // columns are unit eigenvectors, same order
};

// Symmetric eigendecomposition by cyclic Jacobi with threshold sweeps
// (max 100 sweeps, off-diagonal target 1e-12 * ||H||_F). Throws on
// non-square or asymmetric input, and on non-convergence past `tol`
// (reporting the achieved residual). Eigenvalues returned ascending.
EigenSym eigendecompose_sym(const DenseMatrix& h, double tol = 1e-10);

}  // namespace wips
