#include <cmath>

#include "doctest.h"
#include "xdeepint/errors.hpp"
#include "xdeepint/oracles.hpp"

using namespace xdeepint;

TEST_CASE("symbolic expansion: L=0 is a single monomial") {
    auto polys = oracle::pin_symbolic(2, 2, {});
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < 2; ++k) {
            REQUIRE(polys[i][k].terms.size() == 1);
            const auto& [vars, coeff] = *polys[i][k].terms.begin();
            CHECK(coeff == 1.0);
            REQUIRE(vars.size() == 1);
            CHECK(vars[0] == oracle::VarId{i, k});
        }
    }
}

TEST_CASE("symbolic expansion: one layer over two fields has three terms") {
    Matrix w(2, 2, {0.5, -0.25, 2.0, 1.0});
    auto polys = oracle::pin_symbolic(2, 1, {w});
    // entry (0,0): x00*(w00*x00 + w01*x10 + 1)
    const auto& p = polys[0][0];
    CHECK(p.terms.size() == 3);
    CHECK(p.terms.at({oracle::VarId{0, 0}}) == 1.0);
    CHECK(p.terms.at({oracle::VarId{0, 0}, oracle::VarId{0, 0}}) == 0.5);
    CHECK(p.terms.at({oracle::VarId{0, 0}, oracle::VarId{1, 0}}) == -0.25);
    CHECK(p.degree() == 2);
}

TEST_CASE("symbolic evaluation matches pin_forward on random inputs") {
    std::uint64_t rng = 606;
    auto uni = [&](double lo, double hi) {
        return lo + (static_cast<double>(splitmix64(rng) >> 11) * 0x1.0p-53) * (hi - lo);
    };
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t rows = 1 + splitmix64(rng) % 4;
        const std::size_t cols = 1 + splitmix64(rng) % 3;
        const std::size_t L = splitmix64(rng) % 5;
        ModelConfig config;
        config.field_count = rows;
        config.embedding_dim = cols;
        config.pin_layers = L;
        config.subspaces = 1;
        ModelParams params;
        for (std::size_t f = 0; f < rows; ++f) params.embeddings.emplace_back(1, cols);
        for (std::size_t l = 0; l < L; ++l) {
            Matrix w(rows, rows);
            for (double& v : w.data()) v = uni(-1, 1);
            params.pin_kernels.push_back(std::move(w));
        }
        params.out_weights = Matrix(1, rows);
        Matrix x0(rows, cols);
        for (double& v : x0.data()) v = uni(-2, 2);

        auto polys = oracle::pin_symbolic(rows, cols, params.pin_kernels);
        ForwardTrace trace = pin_forward(x0, params, config);
        const Matrix& xl = trace.layer(L);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t k = 0; k < cols; ++k) {
                const double expect = polys[i][k].evaluate(x0);
                CHECK(std::abs(xl(i, k) - expect) <=
                      1e-12 * std::max(1.0, std::abs(expect)));
                CHECK(polys[i][k].degree() <= L + 1);
            }
        }
    }
}

TEST_CASE("symbolic budget guard") {
    CHECK_THROWS_AS(oracle::pin_symbolic(9, 2, {}), ValueError);
    CHECK_THROWS_AS(oracle::pin_symbolic(2, 5, {}), ValueError);
}

TEST_CASE("bit-wise limit: h=K rows of W'X'0 touch every input bit") {
    // F=2, K=2, h=2: the stacked input has 4 rows of width 1; one layer's
    // symbolic row is a linear mix of all four bits times the row's own bit.
    Matrix w(4, 4);
    for (std::size_t i = 0; i < 16; ++i) w.data()[i] = 0.1 * static_cast<double>(i + 1);
    auto polys = oracle::pin_symbolic(4, 1, {w});
    const auto& p = polys[0][0];
    // x00 * (sum_j w0j xj0 + 1): one linear term plus 4 quadratic terms
    CHECK(p.terms.size() == 5);
    for (std::size_t j = 0; j < 4; ++j) {
        std::vector<oracle::VarId> key{{0, 0}, {j, 0}};
        std::sort(key.begin(), key.end());
        CHECK(p.terms.count(key) == 1);
    }
}

TEST_CASE("finite differences on simple functionals") {
    ModelConfig config;
    config.field_count = 1;
    config.embedding_dim = 1;
    config.pin_layers = 0;
    config.subspaces = 1;
    ModelParams params = init_params(config, {1}, 1);
    params.bias = 3.0;

    auto square = [](const ModelParams& p) { return p.bias * p.bias; };
    GradientSet g = oracle::finite_diff(square, params, config);
    CHECK(g.d_bias == doctest::Approx(6.0).epsilon(1e-6));

    auto constant = [](const ModelParams&) { return 42.0; };
    GradientSet gc = oracle::finite_diff(constant, params, config);
    CHECK(std::abs(gc.d_bias) < 1e-9);
    CHECK(std::abs(gc.d_out_weights(0, 0)) < 1e-9);
}

TEST_CASE("self-check passes on a pristine build") {
    SelfCheckResult result = run_self_check();
    for (const auto& item : result.items) {
        INFO(item.name, ": ", item.detail);
        CHECK(item.passed);
    }
    CHECK(result.all_passed());
}
