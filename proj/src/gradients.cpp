#include "xdeepint/gradients.hpp"

#include <cmath>

#include "xdeepint/errors.hpp"

namespace xdeepint {

void GradientSet::scale(double factor) {
    for (auto& m : d_pin_kernels)
        for (double& v : m.data()) v *= factor;
    for (double& v : d_out_weights.data()) v *= factor;
    d_bias *= factor;
    for (auto& [key, row] : d_embeddings)
        for (double& v : row) v *= factor;
}

void GradientSet::add(const GradientSet& other) {
    for (std::size_t l = 0; l < d_pin_kernels.size(); ++l) {
        d_pin_kernels[l] = scale_add(d_pin_kernels[l], 1.0, other.d_pin_kernels[l], 1.0);
    }
    d_out_weights = scale_add(d_out_weights, 1.0, other.d_out_weights, 1.0);
    d_bias += other.d_bias;
    for (const auto& [key, row] : other.d_embeddings) {
        auto& dst = d_embeddings[key];
        if (dst.empty()) dst.assign(row.size(), 0.0);
        for (std::size_t k = 0; k < row.size(); ++k) dst[k] += row[k];
    }
}

GradientSet zero_gradients(const ModelConfig& config) {
    GradientSet g;
    const std::size_t fh = config.stacked_rows();
    g.d_pin_kernels.assign(config.pin_layers, Matrix(fh, fh));
    g.d_out_weights = Matrix(1, fh);
    return g;
}

double loss(int y, double y_hat) {
    const double p = clamp_prob(y_hat);
    return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

GradientSet backward(const ForwardTrace& trace, const Example& example, int y,
                     const ModelParams& params, const ModelConfig& config) {
    const std::size_t L = config.pin_layers;
    const std::size_t fh = config.stacked_rows();
    const std::size_t sub = config.stacked_cols();
    if (trace.layer_outputs.size() != L || trace.x0_stacked.rows() != fh) {
        throw ValueError("forward trace does not match model config");
    }

    GradientSet g = zero_gradients(config);
    const double delta = trace.prediction - static_cast<double>(y);

    g.d_bias = delta * static_cast<double>(sub);
    const Matrix& xL = trace.layer(L);
    for (std::size_t i = 0; i < fh; ++i) {
        double rowsum = 0.0;
        for (std::size_t k = 0; k < sub; ++k) rowsum += xL(i, k);
        g.d_out_weights(0, i) = delta * rowsum;
    }

    // Seed the cotangent into X'_L.
    Matrix cot(fh, sub);
    for (std::size_t i = 0; i < fh; ++i) {
        const double gi = delta * params.out_weights(0, i);
        for (std::size_t k = 0; k < sub; ++k) cot(i, k) = gi;
    }

    Matrix d_x0(fh, sub);
    for (std::size_t l = L; l-- > 0;) {
        // X'_{l+1} = X'_l o [act(W_l X'_0) + 1]
        const Matrix& prev = trace.layer(l);
        Matrix d_pre = hadamard(cot, prev);
        if (config.activation != Activation::Linear) {
            const Matrix& pre = trace.pre_acts[l];
            for (std::size_t i = 0; i < d_pre.size(); ++i) {
                d_pre.data()[i] *= activation_grad(pre.data()[i], config.activation);
            }
        }
        g.d_pin_kernels[l] = matmul(d_pre, transpose(trace.x0_stacked));
        d_x0 = scale_add(d_x0, 1.0, matmul(transpose(params.pin_kernels[l]), d_pre), 1.0);
        cot = hadamard(cot, trace.aggregates[l]);
    }
    d_x0 = scale_add(d_x0, 1.0, cot, 1.0);

    Matrix d_x0_flat = unstack(d_x0, config.subspaces);
    for (std::size_t f = 0; f < config.field_count; ++f) {
        auto& row = g.d_embeddings[{f, example.indices[f]}];
        if (row.empty()) row.assign(config.embedding_dim, 0.0);
        for (std::size_t k = 0; k < config.embedding_dim; ++k) row[k] += d_x0_flat(f, k);
    }
    return g;
}

BatchResult batch_forward_backward(const std::vector<Example>& batch, const ModelParams& params,
                                   const ModelConfig& config) {
    if (batch.empty()) throw ValueError("empty batch");
    BatchResult result;
    result.grads = zero_gradients(config);
    for (const auto& ex : batch) {
        Matrix x0 = restack(embed(ex, params, config), config.subspaces);
        ForwardTrace trace = pin_forward(x0, params, config);
        result.mean_loss += loss(ex.label, trace.prediction);
        result.grads.add(backward(trace, ex, ex.label, params, config));
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    result.mean_loss *= inv;
    result.grads.scale(inv);
    return result;
}

}  // namespace xdeepint
