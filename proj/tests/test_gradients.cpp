#include <cmath>

#include "doctest.h"
#include "xdeepint/gradients.hpp"
#include "xdeepint/oracles.hpp"

using namespace xdeepint;

namespace {

double uniform(std::uint64_t& rng, double lo, double hi) {
    return lo + (static_cast<double>(splitmix64(rng) >> 11) * 0x1.0p-53) * (hi - lo);
}

ModelParams random_params(const ModelConfig& config, const std::vector<std::size_t>& cards,
                          std::uint64_t seed) {
    ModelParams p = init_params(config, cards, seed);
    std::uint64_t rng = seed ^ 0xabcd;
    for (auto& w : p.pin_kernels)
        for (double& v : w.data()) v = uniform(rng, -0.5, 0.5);
    for (double& v : p.out_weights.data()) v = uniform(rng, -0.5, 0.5);
    p.bias = uniform(rng, -0.2, 0.2);
    return p;
}

}  // namespace

TEST_CASE("log loss values") {
    CHECK(loss(1, 1.0) == doctest::Approx(1e-12).epsilon(1e-3));
    CHECK(loss(1, 0.5) == doctest::Approx(std::log(2.0)));
    CHECK(loss(0, 0.9) == doctest::Approx(-std::log(0.1)));
    CHECK(loss(0, 0.0) == doctest::Approx(1e-12).epsilon(1e-3));
}

TEST_CASE("zero-initialized model: only bias and head receive gradient") {
    ModelConfig config;
    config.field_count = 2;
    config.embedding_dim = 4;
    config.pin_layers = 1;
    config.subspaces = 2;
    ModelParams params = init_params(config, {3, 3}, 7);
    Example ex{{1, 2}, 1};
    Matrix x0 = restack(embed(ex, params, config), config.subspaces);
    ForwardTrace trace = pin_forward(x0, params, config);
    CHECK(trace.prediction == 0.5);
    GradientSet g = backward(trace, ex, ex.label, params, config);
    const double delta = 0.5 - 1.0;
    CHECK(g.d_bias == delta * 2.0);  // K/h = 2
    for (double v : g.d_pin_kernels[0].data()) CHECK(v == 0.0);
    // embedding grads are zero too: W_out is zero
    for (const auto& [key, row] : g.d_embeddings) {
        for (double v : row) CHECK(v == 0.0);
    }
}

TEST_CASE("scalar model: kernel gradient is 4*delta and matches finite differences") {
    ModelConfig config;
    config.field_count = 1;
    config.embedding_dim = 1;
    config.pin_layers = 1;
    config.subspaces = 1;
    ModelParams params = init_params(config, {1}, 1);
    params.embeddings[0] = Matrix(1, 1, {2.0});
    params.pin_kernels[0] = Matrix(1, 1, {0.5});
    params.out_weights = Matrix(1, 1, {1.0});
    Example ex{{0}, 1};

    Matrix x0 = restack(embed(ex, params, config), 1);
    ForwardTrace trace = pin_forward(x0, params, config);
    CHECK(trace.logit == 4.0);
    const double delta = trace.prediction - 1.0;
    GradientSet g = backward(trace, ex, ex.label, params, config);
    CHECK(g.d_pin_kernels[0](0, 0) == doctest::Approx(4.0 * delta).epsilon(1e-12));

    auto loss_fn = [&](const ModelParams& p) {
        Matrix x = restack(embed(ex, p, config), 1);
        return loss(ex.label, pin_forward(x, p, config).prediction);
    };
    GradientSet fd = oracle::finite_diff(loss_fn, params, config);
    CHECK(max_gradient_mismatch(g, fd) < 1e-6);
}

TEST_CASE("random models match central finite differences, all activations") {
    const Activation acts[] = {Activation::Linear, Activation::Relu, Activation::Tanh,
                               Activation::Sigmoid};
    std::uint64_t rng = 20240;
    for (int trial = 0; trial < 8; ++trial) {
        ModelConfig config;
        config.field_count = 1 + splitmix64(rng) % 3;
        config.subspaces = 1 + splitmix64(rng) % 2;
        config.embedding_dim = config.subspaces * (1 + splitmix64(rng) % 3);
        config.pin_layers = splitmix64(rng) % 4;
        config.activation = acts[trial % 4];
        std::vector<std::size_t> cards(config.field_count, 3);
        ModelParams params = random_params(config, cards, splitmix64(rng));
        Example ex;
        for (std::size_t f = 0; f < config.field_count; ++f) {
            ex.indices.push_back(static_cast<std::uint32_t>(splitmix64(rng) % 3));
        }
        ex.label = static_cast<int>(splitmix64(rng) % 2);

        Matrix x0 = restack(embed(ex, params, config), config.subspaces);
        ForwardTrace trace = pin_forward(x0, params, config);
        GradientSet g = backward(trace, ex, ex.label, params, config);
        auto loss_fn = [&](const ModelParams& p) {
            Matrix x = restack(embed(ex, p, config), config.subspaces);
            return loss(ex.label, pin_forward(x, p, config).prediction);
        };
        GradientSet fd = oracle::finite_diff(loss_fn, params, config);
        CHECK(max_gradient_mismatch(g, fd) < 1e-6);
    }
}

TEST_CASE("batch gradient is the mean of per-example gradients") {
    ModelConfig config;
    config.field_count = 2;
    config.embedding_dim = 2;
    config.pin_layers = 2;
    config.subspaces = 1;
    std::vector<std::size_t> cards{3, 3};
    ModelParams params = random_params(config, cards, 55);
    std::vector<Example> batch{{{0, 1}, 1}, {{1, 2}, 0}, {{2, 0}, 1}};

    BatchResult br = batch_forward_backward(batch, params, config);

    GradientSet acc = zero_gradients(config);
    double total_loss = 0.0;
    for (const auto& ex : batch) {
        Matrix x0 = restack(embed(ex, params, config), 1);
        ForwardTrace trace = pin_forward(x0, params, config);
        total_loss += loss(ex.label, trace.prediction);
        acc.add(backward(trace, ex, ex.label, params, config));
    }
    acc.scale(1.0 / 3.0);
    CHECK(br.mean_loss == doctest::Approx(total_loss / 3.0));
    CHECK(max_gradient_mismatch(acc, br.grads) < 1e-15);
}

TEST_CASE("repeated example accumulates into one embedding row entry") {
    ModelConfig config;
    config.field_count = 2;
    config.embedding_dim = 2;
    config.pin_layers = 1;
    config.subspaces = 1;
    ModelParams params = random_params(config, {3, 3}, 66);
    // both fields select the same row id; distinct (field,row) keys expected
    std::vector<Example> batch{{{1, 1}, 1}, {{1, 1}, 0}};
    BatchResult br = batch_forward_backward(batch, params, config);
    CHECK(br.grads.d_embeddings.size() == 2);
    CHECK(br.grads.d_embeddings.count({0, 1}) == 1);
    CHECK(br.grads.d_embeddings.count({1, 1}) == 1);
}

TEST_CASE("L=0 gradient is the logistic-regression gradient") {
    ModelConfig config;
    config.field_count = 2;
    config.embedding_dim = 2;
    config.pin_layers = 0;
    config.subspaces = 1;
    ModelParams params = random_params(config, {3, 3}, 31);
    Example ex{{1, 2}, 0};
    Matrix x0 = restack(embed(ex, params, config), 1);
    ForwardTrace trace = pin_forward(x0, params, config);
    GradientSet g = backward(trace, ex, ex.label, params, config);
    const double delta = trace.prediction - 0.0;
    // d/dV_f[row][k] = delta * w_out[f], independent of k
    for (std::size_t f = 0; f < 2; ++f) {
        const auto& row = g.d_embeddings.at({f, ex.indices[f]});
        for (double v : row) CHECK(v == doctest::Approx(delta * params.out_weights(0, f)));
    }
}
