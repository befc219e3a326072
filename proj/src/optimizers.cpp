#include "xdeepint/optimizers.hpp"

#include <cmath>

#include "xdeepint/errors.hpp"

namespace xdeepint {

void ftrl_apply(FtrlState& state, double* weights, const double* grads, std::size_t count) {
    const auto& h = state.hyper;
    for (std::size_t i = 0; i < count; ++i) {
        const double g = grads[i];
        if (g == 0.0) continue;  // lazy update
        if (!std::isfinite(g)) throw NumericError("non-finite gradient in ftrl_apply");
        const double sigma = (std::sqrt(state.n[i] + g * g) - std::sqrt(state.n[i])) / h.alpha;
        state.z[i] += g - sigma * weights[i];
        state.n[i] += g * g;
        const double z = state.z[i];
        if (std::abs(z) <= h.lambda1) {
            weights[i] = 0.0;
        } else {
            const double sgn = z >= 0.0 ? 1.0 : -1.0;
            weights[i] = -(z - sgn * h.lambda1) /
                         ((h.beta + std::sqrt(state.n[i])) / h.alpha + h.lambda2);
        }
    }
}

void group_ftrl_apply(GroupFtrlState& state, Matrix& table,
                      const std::vector<std::pair<std::size_t, const std::vector<double>*>>& rows) {
    const auto& h = state.hyper;
    const std::size_t K = state.row_width;
    const double group_cutoff = h.lambda1 * std::sqrt(static_cast<double>(K));
    for (const auto& [row, grad] : rows) {
        const std::vector<double>& g = *grad;
        double* w = &table.data()[row * K];
        double* z = &state.z[row * K];
        double* n = &state.n[row * K];
        for (std::size_t i = 0; i < K; ++i) {
            if (!std::isfinite(g[i])) throw NumericError("non-finite gradient in group_ftrl_apply");
            const double sigma = (std::sqrt(n[i] + g[i] * g[i]) - std::sqrt(n[i])) / h.alpha;
            z[i] += g[i] - sigma * w[i];
            n[i] += g[i] * g[i];
        }
        double z_norm = 0.0;
        for (std::size_t i = 0; i < K; ++i) z_norm += z[i] * z[i];
        z_norm = std::sqrt(z_norm);
        if (z_norm <= group_cutoff) {
            for (std::size_t i = 0; i < K; ++i) w[i] = 0.0;
        } else {
            // Written as z - cutoff*(z/||z||) so the K=1 case reduces
            // bitwise to the scalar FTRL update.
            for (std::size_t i = 0; i < K; ++i) {
                w[i] = -(z[i] - group_cutoff * (z[i] / z_norm)) /
                       ((h.beta + std::sqrt(n[i])) / h.alpha + h.lambda2);
            }
        }
    }
}

void adam_apply(AdamState& state, double* weights, const double* grads, std::size_t count) {
    const auto& h = state.hyper;
    ++state.t;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < count; ++i) {
        const double g = grads[i];
        if (!std::isfinite(g)) throw NumericError("non-finite gradient in adam_apply");
        state.m[i] = h.beta1 * state.m[i] + (1.0 - h.beta1) * g;
        state.v[i] = h.beta2 * state.v[i] + (1.0 - h.beta2) * g * g;
        weights[i] -= h.alpha * (state.m[i] / bc1) / (std::sqrt(state.v[i] / bc2) + h.eps);
    }
}

void adam_apply_rows(AdamState& state, Matrix& table,
                     const std::vector<std::pair<std::size_t, const std::vector<double>*>>& rows) {
    const auto& h = state.hyper;
    const std::size_t K = table.cols();
    ++state.t;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));
    for (const auto& [row, grad] : rows) {
        const std::vector<double>& g = *grad;
        double* w = &table.data()[row * K];
        double* m = &state.m[row * K];
        double* v = &state.v[row * K];
        for (std::size_t i = 0; i < K; ++i) {
            if (!std::isfinite(g[i])) throw NumericError("non-finite gradient in adam_apply_rows");
            m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
            v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
            w[i] -= h.alpha * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + h.eps);
        }
    }
}

OptimizerKind parse_optimizer(const std::string& name) {
    if (name == "gftrl_ftrl") return OptimizerKind::GftrlFtrl;
    if (name == "adam") return OptimizerKind::Adam;
    throw ValueError("unknown optimizer: " + name);
}

std::string optimizer_name(OptimizerKind k) {
    return k == OptimizerKind::GftrlFtrl ? "gftrl_ftrl" : "adam";
}

OptimizerBundle OptimizerBundle::create(OptimizerKind kind, const ModelConfig& config,
                                        const std::vector<std::size_t>& cardinalities,
                                        FtrlHyper ftrl, AdamHyper adam) {
    OptimizerBundle bundle;
    bundle.kind = kind;
    const std::size_t fh = config.stacked_rows();
    if (kind == OptimizerKind::GftrlFtrl) {
        for (std::size_t f = 0; f < config.field_count; ++f) {
            bundle.gftrl_embeddings.emplace_back(cardinalities[f], config.embedding_dim, ftrl);
        }
        bundle.ftrl_kernels.assign(config.pin_layers, FtrlState(fh * fh, ftrl));
        bundle.ftrl_head = FtrlState(fh + 1, ftrl);
    } else {
        for (std::size_t f = 0; f < config.field_count; ++f) {
            bundle.adam_embeddings.emplace_back(cardinalities[f] * config.embedding_dim, adam);
        }
        bundle.adam_kernels.assign(config.pin_layers, AdamState(fh * fh, adam));
        bundle.adam_head = AdamState(fh + 1, adam);
    }
    return bundle;
}

void OptimizerBundle::step(ModelParams& params, const GradientSet& grads,
                           const ModelConfig& config) {
    const std::size_t fh = config.stacked_rows();

    // Group sparse embedding rows per field, in deterministic (field,row)
    // order as provided by the ordered gradient map.
    std::vector<std::vector<std::pair<std::size_t, const std::vector<double>*>>> per_field(
        config.field_count);
    for (const auto& [key, row] : grads.d_embeddings) {
        per_field[key.first].emplace_back(key.second, &row);
    }

    // Head gradient as one span: out_weights then bias.
    std::vector<double> head_grad(fh + 1);
    for (std::size_t i = 0; i < fh; ++i) head_grad[i] = grads.d_out_weights.data()[i];
    head_grad[fh] = grads.d_bias;
    std::vector<double> head_w(fh + 1);
    for (std::size_t i = 0; i < fh; ++i) head_w[i] = params.out_weights.data()[i];
    head_w[fh] = params.bias;

    if (kind == OptimizerKind::GftrlFtrl) {
        for (std::size_t f = 0; f < config.field_count; ++f) {
            if (!per_field[f].empty()) {
                group_ftrl_apply(gftrl_embeddings[f], params.embeddings[f], per_field[f]);
            }
        }
        for (std::size_t l = 0; l < config.pin_layers; ++l) {
            ftrl_apply(ftrl_kernels[l], params.pin_kernels[l].data().data(),
                       grads.d_pin_kernels[l].data().data(), fh * fh);
        }
        ftrl_apply(ftrl_head, head_w.data(), head_grad.data(), fh + 1);
    } else {
        for (std::size_t f = 0; f < config.field_count; ++f) {
            if (!per_field[f].empty()) {
                adam_apply_rows(adam_embeddings[f], params.embeddings[f], per_field[f]);
            }
        }
        for (std::size_t l = 0; l < config.pin_layers; ++l) {
            adam_apply(adam_kernels[l], params.pin_kernels[l].data().data(),
                       grads.d_pin_kernels[l].data().data(), fh * fh);
        }
        adam_apply(adam_head, head_w.data(), head_grad.data(), fh + 1);
    }

    for (std::size_t i = 0; i < fh; ++i) params.out_weights.data()[i] = head_w[i];
    params.bias = head_w[fh];
}

SparsityReport sparsity_report(const ModelParams& params) {
    SparsityReport report;
    std::size_t total_rows = 0, zero_rows = 0;
    for (const auto& table : params.embeddings) {
        for (std::size_t r = 0; r < table.rows(); ++r) {
            ++total_rows;
            bool all_zero = true;
            for (std::size_t k = 0; k < table.cols(); ++k) {
                if (table(r, k) != 0.0) { all_zero = false; break; }
            }
            if (all_zero) ++zero_rows;
        }
    }
    std::size_t total_w = 0, zero_w = 0;
    for (const auto& kernel : params.pin_kernels) {
        total_w += kernel.size();
        for (double v : kernel.data()) {
            if (v == 0.0) ++zero_w;
        }
    }
    if (total_rows > 0) {
        report.feature_sparse_ratio =
            static_cast<double>(zero_rows) / static_cast<double>(total_rows);
    }
    if (total_w > 0) {
        report.weight_sparse_ratio = static_cast<double>(zero_w) / static_cast<double>(total_w);
    }
    return report;
}

}  // namespace xdeepint
