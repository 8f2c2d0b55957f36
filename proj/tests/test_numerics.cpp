#include "wips/numerics.hpp"
#include "wips/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace wips;

TEST_SUITE_BEGIN("numerics");

TEST_CASE("sigmoid values") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(std::abs(sigmoid(40.0) - 1.0) < 1e-15);
    // 1/(1+e^3), frozen from an arbitrary-precision evaluation
    CHECK(sigmoid(-3.0) == doctest::Approx(0.047425873177566781).epsilon(1e-14));
    CHECK(sigmoid(-800.0) == 0.0);  // saturates, no overflow
    CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("sigmoid symmetry sigma(x) + sigma(-x) = 1") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double x = (rng.uniform() - 0.5) * 80.0;
        CHECK(std::abs(sigmoid(x) + sigmoid(-x) - 1.0) <= 1e-15);
    }
}

TEST_CASE("log_sigmoid values") {
    CHECK(log_sigmoid(0.0) == doctest::Approx(-0.69314718055994531).epsilon(1e-15));
    CHECK(std::abs(log_sigmoid(-50.0) - (-50.0)) < 1e-9);
    // frozen oracle: -log(1+e^-2)
    CHECK(log_sigmoid(2.0) == doctest::Approx(-0.12692801104297250).epsilon(1e-14));
    CHECK(std::isfinite(log_sigmoid(-700.0)));
    CHECK(log_sigmoid(-700.0) == doctest::Approx(-700.0));
}

TEST_CASE("log_sigmoid bounds") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double x = (rng.uniform() - 0.5) * 100.0;
        CHECK(log_sigmoid(x) <= std::min(0.0, x));
    }
    // asymptote gap at -30 is e^-30 ~ 9.4e-14
    CHECK(std::abs(log_sigmoid(-30.0) - (-30.0)) < 1e-12);
}

TEST_CASE("eigendecompose permutation matrix") {
    DenseMatrix h(2, 2);
    h(0, 1) = 1.0;
    h(1, 0) = 1.0;
    const EigenSym e = eigendecompose_sym(h);
    CHECK(e.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-12));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(std::abs(e.vectors(0, k)) == doctest::Approx(inv_sqrt2));
        CHECK(std::abs(e.vectors(1, k)) == doctest::Approx(inv_sqrt2));
    }
}

TEST_CASE("eigendecompose identity") {
    DenseMatrix h(3, 3);
    for (int i = 0; i < 3; ++i) h(i, i) = 1.0;
    const EigenSym e = eigendecompose_sym(h);
    for (double v : e.values) CHECK(v == doctest::Approx(1.0));
}

namespace {

DenseMatrix random_symmetric(std::size_t n, Rng& rng, double scale = 1.0) {
    DenseMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = scale * rng.normal();
            h(i, j) = v;
            h(j, i) = v;
        }
    return h;
}

double reconstruction_residual(const DenseMatrix& h, const EigenSym& e) {
    const std::size_t n = h.rows();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double r = 0.0;
            for (std::size_t k = 0; k < n; ++k) r += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
            s += (r - h(i, j)) * (r - h(i, j));
        }
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("eigendecompose round-trip and orthonormality up to 64x64") {
    Rng rng(11);
    for (std::size_t n : {std::size_t{2}, std::size_t{8}, std::size_t{23}, std::size_t{64}}) {
        const DenseMatrix h = random_symmetric(n, rng, 2.0);
        const EigenSym e = eigendecompose_sym(h);
        const double rel = reconstruction_residual(h, e) / std::max(1.0, frobenius_norm(h));
        CHECK(rel < 1e-10);
        // U^T U = I
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += e.vectors(i, a) * e.vectors(i, b);
                CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-10);
            }
    }
}

TEST_CASE("eigendecompose rejects bad input") {
    DenseMatrix rect(2, 3);
    CHECK_THROWS_AS(eigendecompose_sym(rect), std::invalid_argument);
    DenseMatrix asym(2, 2);
    asym(0, 1) = 1.0;
    asym(1, 0) = 1.5;
    CHECK_THROWS_AS(eigendecompose_sym(asym), std::invalid_argument);
}

TEST_CASE("eigendecompose zero matrix") {
    DenseMatrix z(4, 4);
    const EigenSym e = eigendecompose_sym(z);
    for (double v : e.values) CHECK(v == 0.0);
}

TEST_CASE("matmul shapes and values") {
    DenseMatrix a(2, 3), b(3, 2);
    int c = 0;
    for (auto& v : a.data()) v = ++c;
    c = 0;
    for (auto& v : b.data()) v = ++c;
    const DenseMatrix ab = matmul(a, b);
    CHECK(ab(0, 0) == 22.0);
    CHECK(ab(0, 1) == 28.0);
    CHECK(ab(1, 0) == 49.0);
    CHECK(ab(1, 1) == 64.0);
    CHECK_THROWS_AS(matmul(a, a), std::invalid_argument);
}

TEST_CASE("rng determinism and fork independence") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42);
    Rng f1 = c.fork(1), f2 = c.fork(2);
    CHECK(f1.next_u64() != f2.next_u64());
    // normals deterministic too
    Rng d1(9), d2(9);
    for (int i = 0; i < 100; ++i) CHECK(d1.normal() == d2.normal());
}

TEST_CASE("rng uniform_index bounds and rough uniformity") {
    Rng rng(7);
    int counts[10] = {0};
    for (int i = 0; i < 100000; ++i) {
        const auto k = rng.uniform_index(10);
        REQUIRE(k < 10);
        counts[k]++;
    }
    for (int k = 0; k < 10; ++k) CHECK(std::abs(counts[k] - 10000) < 500);
}

TEST_SUITE_END();
