#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "xdeepint/model.hpp"

namespace xdeepint {

/// Cotangents structure-matched to ModelParams. Embedding gradients are
/// kept sparse: one K-vector per distinct (field, row) touched.
struct GradientSet {
    std::vector<Matrix> d_pin_kernels;
    Matrix d_out_weights;
    double d_bias = 0.0;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> d_embeddings;

    void scale(double factor);
    /// Accumulate other into this (shapes must match).
    void add(const GradientSet& other);
};

GradientSet zero_gradients(const ModelConfig& config);

/// Log loss -(y ln p + (1-y) ln(1-p)); p is clamped before the logs.
double loss(int y, double y_hat);

/// Hand-derived reverse pass through head, PIN recursion, restack and
/// embedding lookup for a single example.
GradientSet backward(const ForwardTrace& trace, const Example& example, int y,
                     const ModelParams& params, const ModelConfig& config);

struct BatchResult {
    double mean_loss = 0.0;
    GradientSet grads;  // mean-reduced over the batch
};

BatchResult batch_forward_backward(const std::vector<Example>& batch, const ModelParams& params,
                                   const ModelConfig& config);

}  // namespace xdeepint
