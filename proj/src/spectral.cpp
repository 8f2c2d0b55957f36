#include "wips/spectral.hpp"

#include "wips/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>

namespace wips {

double SpectralFactorization::reconstruct(std::size_t i, std::size_t j) const {
    double s = 0.0;
    for (std::size_t k = 0; k < rank; ++k) s += lambda[k] * y(k, i) * y(k, j);
    return s;
}

DenseMatrix SpectralFactorization::reconstruct_all() const {
    const std::size_t n = y.cols();
    DenseMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = reconstruct(i, j);
    return h;
}

namespace {

// |lambda| descending; ties by larger signed value, then lower original index.
std::vector<std::size_t> magnitude_order(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(values[a]), mb = std::abs(values[b]);
        if (ma != mb) return ma > mb;
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });
    return order;
}

}  // namespace

SpectralFactorization wips_factorize(const DenseMatrix& h, std::size_t rank) {
    const std::size_t n = h.rows();
    if (rank < 1 || rank > n) throw std::invalid_argument("wips_factorize: rank must be in [1, n]");
    const EigenSym eig = eigendecompose_sym(h);
    const std::vector<std::size_t> order = magnitude_order(eig.values);

    SpectralFactorization f;
    f.rank = rank;
    f.lambda.resize(rank);
    f.y = DenseMatrix(rank, n);
    for (std::size_t k = 0; k < rank; ++k) {
        const std::size_t src = order[k];
        f.lambda[k] = eig.values[src];
        for (std::size_t i = 0; i < n; ++i) f.y(k, i) = eig.vectors(i, src);
    }
    return f;
}

std::string verdict_name(KernelVerdict v) {
    switch (v) {
        case KernelVerdict::PD: return "PD";
        case KernelVerdict::CPD_NOT_PD: return "CPD_not_PD";
        case KernelVerdict::NEG_DEF: return "NEG_DEF";
        case KernelVerdict::INDEFINITE: return "INDEFINITE";
    }
    throw std::logic_error("verdict_name: bad enum");
}

KernelClass classify_kernel(const DenseMatrix& h, double tol) {
    const std::size_t n = h.rows();
    const EigenSym eig = eigendecompose_sym(h);  // rejects asymmetric input

    KernelClass out{};
    out.min_eigenvalue = eig.values.front();
    out.max_eigenvalue = eig.values.back();

    // Centered matrix P H P with P = I - ones/n: the finite-sample form of
    // the zero-sum coefficient constraint.
    DenseMatrix centered(n, n);
    {
        std::vector<double> row_mean(n, 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) row_mean[i] += h(i, j);
            total += row_mean[i];
            row_mean[i] /= static_cast<double>(n);
        }
        total /= static_cast<double>(n) * static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                centered(i, j) = h(i, j) - row_mean[i] - row_mean[j] + total;
        // Exact symmetry despite row_mean rounding.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) centered(j, i) = centered(i, j);
    }
    out.min_centered_eigenvalue = eigendecompose_sym(centered).values.front();

    const double scale =
        std::max(1.0, std::max(std::abs(out.min_eigenvalue), std::abs(out.max_eigenvalue)));
    const double cut = -tol * scale;
    if (out.min_eigenvalue >= cut)
        out.verdict = KernelVerdict::PD;
    else if (-out.max_eigenvalue >= cut)  // lambda_min(-H) = -lambda_max(H)
        out.verdict = KernelVerdict::NEG_DEF;
    else if (out.min_centered_eigenvalue >= cut)
        out.verdict = KernelVerdict::CPD_NOT_PD;
    else
        out.verdict = KernelVerdict::INDEFINITE;
    return out;
}

namespace {

struct KernelSpec {
    std::string name;
    std::vector<double> args;
};

KernelSpec parse_kernel(const std::string& kernel) {
    KernelSpec spec;
    std::stringstream ss(kernel);
    std::string tok;
    if (!std::getline(ss, tok, ':')) throw std::invalid_argument("empty kernel name");
    spec.name = tok;
    while (std::getline(ss, tok, ':')) spec.args.push_back(std::stod(tok));
    return spec;
}

double sq_dist(const DenseMatrix& pts, std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < pts.cols(); ++c) {
        const double d = pts(i, c) - pts(j, c);
        s += d * d;
    }
    return s;
}

}  // namespace

DenseMatrix similarity_matrix(const DenseMatrix& points, const std::string& kernel) {
    const KernelSpec spec = parse_kernel(kernel);
    const std::size_t n = points.rows();
    if (n == 0) throw std::invalid_argument("similarity_matrix: no points");
    DenseMatrix h(n, n);

    if (spec.name == "gaussian") {
        const double gamma = spec.args.empty() ? 1.0 : spec.args[0];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) h(i, j) = std::exp(-gamma * sq_dist(points, i, j));
    } else if (spec.name == "neg_sq_dist") {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) h(i, j) = -sq_dist(points, i, j);
    } else if (spec.name == "neg_poincare") {
        const double eps = spec.args.empty() ? 1e-5 : spec.args[0];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                h(i, j) = sim_neg_poincare(std::span<const double>(points.row(i), points.cols()),
                                           std::span<const double>(points.row(j), points.cols()),
                                           eps);
    } else if (spec.name == "epanechnikov") {
        const double bw = spec.args.empty() ? 1.0 : spec.args[0];
        if (bw <= 0.0) throw std::invalid_argument("epanechnikov: bandwidth must be positive");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                h(i, j) = std::max(0.0, 1.0 - sq_dist(points, i, j) / (bw * bw));
    } else if (spec.name == "random_indefinite") {
        const std::size_t q = spec.args.size() > 0 ? static_cast<std::size_t>(spec.args[0]) : 1;
        const std::size_t k = spec.args.size() > 1 ? static_cast<std::size_t>(spec.args[1]) : 4;
        const std::uint64_t seed = spec.args.size() > 2 ? static_cast<std::uint64_t>(spec.args[2]) : 1;
        if (q > k) throw std::invalid_argument("random_indefinite: q exceeds K");
        Rng rng(seed);
        DenseMatrix y(k, n);
        for (auto& v : y.data()) v = rng.normal();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                double s = 0.0;
                for (std::size_t d = 0; d < k; ++d)
                    s += (d < k - q ? 1.0 : -1.0) * y(d, i) * y(d, j);
                h(i, j) = s;
            }
    } else {
        throw std::invalid_argument("unknown kernel: " + spec.name);
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) h(i, j) = h(j, i);  // mirror upper triangle
    return h;
}

namespace {

// Residual of keeping exactly the eigenpairs in `kept`: since eigenvectors
// are orthonormal, the Frobenius error is the norm of the dropped spectrum.
double residual_for(const std::vector<double>& values, const std::vector<bool>& kept) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!kept[i]) s += values[i] * values[i];
    return std::sqrt(s);
}

double best_residual_ips(const std::vector<double>& values,
                         const std::vector<std::size_t>& by_mag, std::size_t rank) {
    std::vector<bool> kept(values.size(), false);
    std::size_t used = 0;
    for (std::size_t idx : by_mag) {
        if (used == rank) break;
        if (values[idx] > 0.0) {
            kept[idx] = true;
            ++used;
        }
    }
    return residual_for(values, kept);
}

double best_residual_q1(const std::vector<double>& values,
                        const std::vector<std::size_t>& by_mag, std::size_t rank) {
    // At most one negative direction: keep the largest-|.| negatives out of
    // the running except the single best one, then fill with positives.
    std::vector<bool> kept(values.size(), false);
    std::size_t used = 0;
    bool negative_used = false;
    for (std::size_t idx : by_mag) {
        if (used == rank) break;
        if (values[idx] > 0.0) {
            kept[idx] = true;
            ++used;
        } else if (values[idx] < 0.0 && !negative_used) {
            kept[idx] = true;
            negative_used = true;
            ++used;
        }
    }
    return residual_for(values, kept);
}

double best_residual_wips(const std::vector<double>& values,
                          const std::vector<std::size_t>& by_mag, std::size_t rank) {
    std::vector<bool> kept(values.size(), false);
    for (std::size_t k = 0; k < rank && k < by_mag.size(); ++k) kept[by_mag[k]] = true;
    return residual_for(values, kept);
}

}  // namespace

std::vector<HierarchyRow> hierarchy_report(const DenseMatrix& points,
                                           const std::vector<std::string>& kernels,
                                           const std::vector<std::size_t>& ranks) {
    std::vector<HierarchyRow> rows;
    for (const auto& kernel : kernels) {
        const DenseMatrix h = similarity_matrix(points, kernel);
        const KernelClass cls = classify_kernel(h);
        const EigenSym eig = eigendecompose_sym(h);
        const std::vector<std::size_t> by_mag = magnitude_order(eig.values);
        for (std::size_t rank : ranks) {
            if (rank < 1 || rank > h.rows()) continue;
            HierarchyRow row;
            row.kernel = kernel;
            row.n = h.rows();
            row.rank = rank;
            row.verdict = cls.verdict;
            row.residual_ips = best_residual_ips(eig.values, by_mag, rank);
            row.residual_q1 = best_residual_q1(eig.values, by_mag, rank);
            row.residual_wips = best_residual_wips(eig.values, by_mag, rank);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_hierarchy_tsv(std::ostream& out, const std::vector<HierarchyRow>& rows) {
    out << "kernel\tn\tK\tverdict\tresidual_ips\tresidual_q1\tresidual_wips\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s\t%zu\t%zu\t%s\t%.12g\t%.12g\t%.12g\n", r.kernel.c_str(),
                      r.n, r.rank, verdict_name(r.verdict).c_str(), r.residual_ips, r.residual_q1,
                      r.residual_wips);
        out << buf;
    }
}

}  // namespace wips
