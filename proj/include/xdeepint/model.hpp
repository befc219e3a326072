#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xdeepint/feature.hpp"
#include "xdeepint/matrix.hpp"

namespace xdeepint {

enum class Activation { Linear, Relu, Tanh, Sigmoid };

Activation parse_activation(const std::string& name);
std::string activation_name(Activation a);

struct ModelConfig {
    std::size_t field_count = 0;    // F
    std::size_t embedding_dim = 0;  // K
    std::size_t pin_layers = 0;     // L
    std::size_t subspaces = 1;      // h, must divide K
    Activation activation = Activation::Linear;

    std::size_t stacked_rows() const { return field_count * subspaces; }   // F*h
    std::size_t stacked_cols() const { return embedding_dim / subspaces; } // K/h
    void validate() const;
};

/// All trainable state: per-field embedding tables V_f (C_f x K), the
/// per-layer interaction kernels (F*h x F*h), the output weights
/// (1 x F*h) and the scalar bias.
struct ModelParams {
    std::vector<Matrix> embeddings;
    std::vector<Matrix> pin_kernels;
    Matrix out_weights;
    double bias = 0.0;
};

/// Embeddings ~ uniform(-1/sqrt(K), 1/sqrt(K)); kernels, head and bias
/// start at zero so the fresh model is exactly the logistic-regression
/// baseline.
ModelParams init_params(const ModelConfig& config, const std::vector<std::size_t>& cardinalities,
                        std::uint64_t seed);

/// Everything the backward pass needs from one forward evaluation.
struct ForwardTrace {
    Matrix x0_stacked;                 // X'_0, (F*h) x (K/h)
    std::vector<Matrix> layer_outputs; // X'_1 .. X'_L
    std::vector<Matrix> pre_acts;      // W'_l X'_0 per layer
    std::vector<Matrix> aggregates;    // act(W'_l X'_0) + 1 per layer
    double logit = 0.0;
    double prediction = 0.5;           // clamped into (0,1)

    const Matrix& layer(std::size_t l) const {  // X'_l, with layer(0) == X'_0
        return l == 0 ? x0_stacked : layer_outputs[l - 1];
    }
};

/// Gather the per-field embedding rows into an F x K feature map.
Matrix embed(const Example& example, const ModelParams& params, const ModelConfig& config);

/// Subspace stacking: sub-matrix j of the K dimension becomes block row j.
Matrix restack(const Matrix& x0, std::size_t h);
/// Inverse permutation of restack.
Matrix unstack(const Matrix& stacked, std::size_t h);

ForwardTrace pin_forward(const Matrix& x0_stacked, const ModelParams& params,
                         const ModelConfig& config);

struct HeadOutput {
    double logit;
    double prediction;
};

HeadOutput output_head(const Matrix& xl, const ModelParams& params, const ModelConfig& config);

std::vector<double> predict_batch(const std::vector<Example>& examples, const ModelParams& params,
                                  const ModelConfig& config);

double apply_activation(double v, Activation a);
double activation_grad(double v, Activation a);  // derivative at pre-activation v

}  // namespace xdeepint
