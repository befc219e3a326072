#include "xdeepint/model.hpp"

#include <cmath>

#include "xdeepint/errors.hpp"

namespace xdeepint {

Activation parse_activation(const std::string& name) {
    if (name == "linear") return Activation::Linear;
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw ValueError("unknown activation: " + name);
}

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Linear: return "linear";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "linear";
}

double apply_activation(double v, Activation a) {
    switch (a) {
        case Activation::Linear: return v;
        case Activation::Relu: return v > 0.0 ? v : 0.0;
        case Activation::Tanh: return std::tanh(v);
        case Activation::Sigmoid: return sigmoid(v);
    }
    return v;
}

double activation_grad(double v, Activation a) {
    switch (a) {
        case Activation::Linear: return 1.0;
        case Activation::Relu: return v > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            double t = std::tanh(v);
            return 1.0 - t * t;
        }
        case Activation::Sigmoid: {
            double s = sigmoid(v);
            return s * (1.0 - s);
        }
    }
    return 1.0;
}

void ModelConfig::validate() const {
    if (field_count == 0) throw ValueError("field_count must be positive");
    if (embedding_dim == 0) throw ValueError("embedding_dim must be positive");
    if (subspaces == 0) throw ValueError("subspaces must be >= 1");
    if (embedding_dim % subspaces != 0) {
        throw ValueError("subspaces (" + std::to_string(subspaces) +
                         ") must divide embedding_dim (" + std::to_string(embedding_dim) + ")");
    }
}

ModelParams init_params(const ModelConfig& config, const std::vector<std::size_t>& cardinalities,
                        std::uint64_t seed) {
    config.validate();
    if (cardinalities.size() != config.field_count) {
        throw ValueError("cardinality list length does not match field_count");
    }
    ModelParams params;
    const double bound = 1.0 / std::sqrt(static_cast<double>(config.embedding_dim));
    std::uint64_t state = seed;
    params.embeddings.reserve(config.field_count);
    for (std::size_t f = 0; f < config.field_count; ++f) {
        Matrix table(cardinalities[f], config.embedding_dim);
        for (double& v : table.data()) {
            // uniform in (-bound, bound) from the top 53 bits
            double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
            v = (2.0 * u - 1.0) * bound;
        }
        params.embeddings.push_back(std::move(table));
    }
    const std::size_t fh = config.stacked_rows();
    params.pin_kernels.assign(config.pin_layers, Matrix(fh, fh));
    params.out_weights = Matrix(1, fh);
    params.bias = 0.0;
    return params;
}

Matrix embed(const Example& example, const ModelParams& params, const ModelConfig& config) {
    if (example.indices.size() != config.field_count) {
        throw ValueError("example has " + std::to_string(example.indices.size()) +
                         " indices, model expects " + std::to_string(config.field_count));
    }
    Matrix x0(config.field_count, config.embedding_dim);
    for (std::size_t f = 0; f < config.field_count; ++f) {
        const Matrix& table = params.embeddings[f];
        const std::size_t row = example.indices[f];
        if (row >= table.rows()) {
            throw ValueError("index " + std::to_string(row) + " out of range for field " +
                             std::to_string(f) + " (cardinality " + std::to_string(table.rows()) +
                             ")");
        }
        for (std::size_t k = 0; k < config.embedding_dim; ++k) x0(f, k) = table(row, k);
    }
    return x0;
}

Matrix restack(const Matrix& x0, std::size_t h) {
    if (h == 0 || x0.cols() % h != 0) {
        throw ValueError("subspace count " + std::to_string(h) + " does not divide embedding dim " +
                         std::to_string(x0.cols()));
    }
    const std::size_t F = x0.rows();
    const std::size_t sub = x0.cols() / h;
    Matrix out(F * h, sub);
    for (std::size_t j = 0; j < h; ++j) {
        for (std::size_t f = 0; f < F; ++f) {
            for (std::size_t c = 0; c < sub; ++c) {
                out(j * F + f, c) = x0(f, j * sub + c);
            }
        }
    }
    return out;
}

Matrix unstack(const Matrix& stacked, std::size_t h) {
    if (h == 0 || stacked.rows() % h != 0) {
        throw ValueError("stacked rows not divisible by subspace count");
    }
    const std::size_t F = stacked.rows() / h;
    const std::size_t sub = stacked.cols();
    Matrix out(F, sub * h);
    for (std::size_t j = 0; j < h; ++j) {
        for (std::size_t f = 0; f < F; ++f) {
            for (std::size_t c = 0; c < sub; ++c) {
                out(f, j * sub + c) = stacked(j * F + f, c);
            }
        }
    }
    return out;
}

ForwardTrace pin_forward(const Matrix& x0_stacked, const ModelParams& params,
                         const ModelConfig& config) {
    const std::size_t fh = config.stacked_rows();
    if (x0_stacked.rows() != fh || x0_stacked.cols() != config.stacked_cols()) {
        throw ShapeError("stacked input has wrong shape for model config");
    }
    ForwardTrace trace;
    trace.x0_stacked = x0_stacked;
    trace.layer_outputs.reserve(config.pin_layers);
    trace.pre_acts.reserve(config.pin_layers);
    trace.aggregates.reserve(config.pin_layers);
    for (std::size_t l = 0; l < config.pin_layers; ++l) {
        Matrix pre = matmul(params.pin_kernels[l], x0_stacked);
        Matrix agg(pre.rows(), pre.cols());
        for (std::size_t i = 0; i < pre.size(); ++i) {
            agg.data()[i] = apply_activation(pre.data()[i], config.activation) + 1.0;
        }
        const Matrix& prev = trace.layer(l);
        trace.layer_outputs.push_back(hadamard(prev, agg));
        trace.pre_acts.push_back(std::move(pre));
        trace.aggregates.push_back(std::move(agg));
    }
    auto head = output_head(trace.layer(config.pin_layers), params, config);
    trace.logit = head.logit;
    trace.prediction = head.prediction;
    return trace;
}

HeadOutput output_head(const Matrix& xl, const ModelParams& params, const ModelConfig& config) {
    const std::size_t fh = config.stacked_rows();
    if (xl.rows() != fh || params.out_weights.cols() != fh) {
        throw ShapeError("output head shape mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < fh; ++i) {
        const double w = params.out_weights(0, i);
        for (std::size_t k = 0; k < xl.cols(); ++k) s += w * xl(i, k);
    }
    s += params.bias * static_cast<double>(xl.cols());
    return HeadOutput{s, clamp_prob(sigmoid(s))};
}

std::vector<double> predict_batch(const std::vector<Example>& examples, const ModelParams& params,
                                  const ModelConfig& config) {
    std::vector<double> out;
    out.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        try {
            Matrix x0 = restack(embed(examples[i], params, config), config.subspaces);
            out.push_back(pin_forward(x0, params, config).prediction);
        } catch (const std::exception& e) {
            throw ValueError("example " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace xdeepint
