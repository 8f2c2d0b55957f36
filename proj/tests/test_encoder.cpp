#include "wips/encoder.hpp"

#include "grad_check.hpp"

#include <doctest.h>

#include <cmath>

using namespace wips;

TEST_SUITE_BEGIN("encoder");

TEST_CASE("init shapes") {
    Rng rng(1);
    const EncoderParams p = init_encoder({4, 8, 8, 2}, rng);
    REQUIRE(p.num_layers() == 3);
    CHECK(p.weights[0].rows() == 8);
    CHECK(p.weights[0].cols() == 4);
    CHECK(p.weights[1].rows() == 8);
    CHECK(p.weights[1].cols() == 8);
    CHECK(p.weights[2].rows() == 2);
    CHECK(p.weights[2].cols() == 8);
    for (const auto& b : p.biases)
        for (double v : b) CHECK(v == 0.0);
}

TEST_CASE("init determinism") {
    Rng r1(7), r2(7);
    const EncoderParams a = init_encoder({3, 5, 2}, r1);
    const EncoderParams b = init_encoder({3, 5, 2}, r2);
    for (std::size_t l = 0; l < a.num_layers(); ++l)
        CHECK(a.weights[l].data() == b.weights[l].data());
}

TEST_CASE("linear model allowed, zero dims rejected") {
    Rng rng(1);
    const EncoderParams p = init_encoder({3, 2}, rng);
    CHECK(p.num_layers() == 1);
    CHECK_THROWS_AS(init_encoder({3, 0, 2}, rng), std::invalid_argument);
    CHECK_THROWS_AS(init_encoder({3}, rng), std::invalid_argument);
}

TEST_CASE("forward zero params") {
    Rng rng(1);
    EncoderParams p = init_encoder({3, 4, 2}, rng);
    for (auto& w : p.weights)
        for (auto& v : w.data()) v = 0.0;
    DenseMatrix x(2, 3);
    x(0, 0) = 1.0;
    x(1, 2) = -4.0;
    const DenseMatrix y = forward(p, x);
    for (double v : y.data()) CHECK(v == 0.0);
}

TEST_CASE("forward identity layer") {
    EncoderParams p;
    p.layer_dims = {3, 3};
    DenseMatrix w(3, 3);
    for (int i = 0; i < 3; ++i) w(i, i) = 1.0;
    p.weights.push_back(w);
    p.biases.emplace_back(3, 0.0);
    DenseMatrix x(2, 3);
    for (std::size_t k = 0; k < x.size(); ++k) x.data()[k] = 0.5 * static_cast<double>(k) - 1.0;
    const DenseMatrix y = forward(p, x);
    CHECK(y.data() == x.data());  // no output activation
}

TEST_CASE("forward rejects width mismatch") {
    Rng rng(1);
    const EncoderParams p = init_encoder({3, 2}, rng);
    DenseMatrix x(1, 4);
    CHECK_THROWS_AS(forward(p, x), std::invalid_argument);
}

TEST_CASE("1-hot lookup equals weight column exactly") {
    Rng rng(5);
    const EncoderParams p = init_encoder({6, 3}, rng);
    for (std::uint32_t id = 0; id < 6; ++id) {
        const DenseMatrix y = forward_onehot(p, {id});
        for (std::size_t o = 0; o < 3; ++o) CHECK(y(0, o) == p.weights[0](o, id));
    }
}

TEST_CASE("1-hot path bitwise equals dense path") {
    Rng rng(5);
    for (const auto& dims :
         {std::vector<std::size_t>{6, 3}, std::vector<std::size_t>{6, 4, 3}}) {
        const EncoderParams p = init_encoder(dims, rng);
        const std::vector<std::uint32_t> ids = {3, 0, 5, 3};
        DenseMatrix x(ids.size(), 6);
        for (std::size_t r = 0; r < ids.size(); ++r) x(r, ids[r]) = 1.0;
        const DenseMatrix y_dense = forward(p, x);
        const DenseMatrix y_oh = forward_onehot(p, ids);
        CHECK(y_dense.data() == y_oh.data());

        // gradients agree too
        ForwardTrace td, to;
        forward(p, x, &td);
        forward_onehot(p, ids, &to);
        DenseMatrix dy(ids.size(), 3);
        Rng grng(9);
        for (auto& v : dy.data()) v = grng.normal();
        const EncoderGrads gd = backward(p, td, dy);
        const EncoderGrads go = backward(p, to, dy);
        for (std::size_t l = 0; l < p.num_layers(); ++l) {
            CHECK(gd.weights[l].data() == go.weights[l].data());
            CHECK(gd.biases[l] == go.biases[l]);
        }
    }
}

TEST_CASE("backward zero upstream gives zero grads") {
    Rng rng(2);
    const EncoderParams p = init_encoder({4, 5, 2}, rng);
    DenseMatrix x(3, 4);
    for (auto& v : x.data()) v = rng.normal();
    ForwardTrace t;
    forward(p, x, &t);
    const EncoderGrads g = backward(p, t, DenseMatrix(3, 2));
    for (const auto& w : g.weights)
        for (double v : w.data()) CHECK(v == 0.0);
}

TEST_CASE("backward chain-rule base case dW = G^T X") {
    Rng rng(2);
    const EncoderParams p = init_encoder({3, 2}, rng);
    DenseMatrix x(4, 3);
    for (auto& v : x.data()) v = rng.normal();
    ForwardTrace t;
    forward(p, x, &t);
    DenseMatrix dy(4, 2);
    for (auto& v : dy.data()) v = rng.normal();
    const EncoderGrads g = backward(p, t, dy);
    const DenseMatrix expect = matmul_at(dy, x);  // (2x4)^T-free: dY^T X
    for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(g.weights[0](o, c) == doctest::Approx(expect(o, c)).epsilon(1e-14));
}

TEST_CASE("backward matches finite differences for 0/1/2 hidden layers") {
    using namespace wips::testing;
    Rng rng(31);
    for (const auto& dims : {std::vector<std::size_t>{5, 3}, std::vector<std::size_t>{5, 7, 3},
                             std::vector<std::size_t>{5, 7, 6, 3}}) {
        EncoderParams p = init_encoder(dims, rng);
        DenseMatrix x(4, 5);
        for (auto& v : x.data()) v = rng.normal();
        // scalar loss: weighted sum of squared outputs
        DenseMatrix c(4, 3);
        for (auto& v : c.data()) v = rng.normal();
        const auto loss = [&] {
            const DenseMatrix y = forward(p, x);
            double s = 0.0;
            for (std::size_t k = 0; k < y.size(); ++k)
                s += c.data()[k] * y.data()[k] * y.data()[k];
            return s;
        };
        ForwardTrace t;
        const DenseMatrix y = forward(p, x, &t);
        DenseMatrix dy(4, 3);
        for (std::size_t k = 0; k < y.size(); ++k)
            dy.data()[k] = 2.0 * c.data()[k] * y.data()[k];
        const EncoderGrads g = backward(p, t, dy);

        double worst = 0.0;
        for (std::size_t l = 0; l < p.num_layers(); ++l) {
            for (std::size_t k = 0; k < p.weights[l].size(); ++k)
                worst = std::max(worst, rel_err(g.weights[l].data()[k],
                                                central_diff(p.weights[l].data()[k], loss)));
            for (std::size_t k = 0; k < p.biases[l].size(); ++k)
                worst = std::max(worst,
                                 rel_err(g.biases[l][k], central_diff(p.biases[l][k], loss)));
        }
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("backward dX matches finite differences") {
    using namespace wips::testing;
    Rng rng(13);
    EncoderParams p = init_encoder({4, 6, 2}, rng);
    DenseMatrix x(3, 4);
    for (auto& v : x.data()) v = rng.normal();
    const auto loss = [&] {
        const DenseMatrix y = forward(p, x);
        double s = 0.0;
        for (double v : y.data()) s += v * v;
        return s;
    };
    ForwardTrace t;
    const DenseMatrix y = forward(p, x, &t);
    DenseMatrix dy(3, 2);
    for (std::size_t k = 0; k < y.size(); ++k) dy.data()[k] = 2.0 * y.data()[k];
    DenseMatrix dx;
    backward(p, t, dy, &dx);
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        worst = std::max(worst, rel_err(dx.data()[k], central_diff(x.data()[k], loss)));
    CHECK(worst < 1e-5);
}

TEST_CASE("forward is batch-order equivariant") {
    Rng rng(3);
    const EncoderParams p = init_encoder({4, 5, 2}, rng);
    DenseMatrix x(3, 4);
    for (auto& v : x.data()) v = rng.normal();
    DenseMatrix xp(3, 4);  // rows permuted by (2,0,1)
    const std::size_t perm[3] = {2, 0, 1};
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 4; ++c) xp(r, c) = x(perm[r], c);
    const DenseMatrix y = forward(p, x);
    const DenseMatrix yp = forward(p, xp);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 2; ++c) CHECK(yp(r, c) == y(perm[r], c));
}

TEST_SUITE_END();
