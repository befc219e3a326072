#pragma once

#include <cstdint>
#include <vector>

#include "xdeepint/gradients.hpp"
#include "xdeepint/model.hpp"

namespace xdeepint {

struct FtrlHyper {
    double alpha = 0.01;
    double beta = 1.0;
    double lambda1 = 0.001;
    double lambda2 = 0.001;
};

/// Per-coordinate z/n accumulators for one dense parameter tensor.
struct FtrlState {
    FtrlHyper hyper;
    std::vector<double> z;
    std::vector<double> n;

    explicit FtrlState(std::size_t size = 0, FtrlHyper h = {})
        : hyper(h), z(size, 0.0), n(size, 0.0) {}
};

/// Row-grouped z/n accumulators for one embedding table; thresholding is
/// all-or-nothing per row with the group cutoff lambda1*sqrt(K).
struct GroupFtrlState {
    FtrlHyper hyper;
    std::size_t row_width = 0;
    std::vector<double> z;  // rows * row_width, row-major
    std::vector<double> n;

    GroupFtrlState() = default;
    GroupFtrlState(std::size_t rows, std::size_t width, FtrlHyper h)
        : hyper(h), row_width(width), z(rows * width, 0.0), n(rows * width, 0.0) {}
};

struct AdamHyper {
    double alpha = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamHyper hyper;
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;

    explicit AdamState(std::size_t size = 0, AdamHyper h = {})
        : hyper(h), m(size, 0.0), v(size, 0.0) {}
};

/// FTRL-Proximal step over a dense coordinate span. Coordinates with zero
/// incoming gradient are left untouched (lazy update).
void ftrl_apply(FtrlState& state, double* weights, const double* grads, std::size_t count);

/// G-FTRL step on the touched rows of one embedding table.
void group_ftrl_apply(GroupFtrlState& state, Matrix& table,
                      const std::vector<std::pair<std::size_t, const std::vector<double>*>>& rows);

/// Bias-corrected Adam over a dense span; increments the step counter.
void adam_apply(AdamState& state, double* weights, const double* grads, std::size_t count);

/// Adam on the touched rows of an embedding table, sharing the table's
/// step counter (counted once per call).
void adam_apply_rows(AdamState& state, Matrix& table,
                     const std::vector<std::pair<std::size_t, const std::vector<double>*>>& rows);

enum class OptimizerKind { GftrlFtrl, Adam };

OptimizerKind parse_optimizer(const std::string& name);
std::string optimizer_name(OptimizerKind k);

/// All optimizer state for one model, routed per the default assignment:
/// embeddings <-> G-FTRL, PIN kernels and output head <-> FTRL; or Adam
/// for everything.
struct OptimizerBundle {
    OptimizerKind kind = OptimizerKind::GftrlFtrl;
    std::vector<GroupFtrlState> gftrl_embeddings;  // one per field
    std::vector<FtrlState> ftrl_kernels;           // one per PIN layer
    FtrlState ftrl_head;                           // out_weights then bias
    std::vector<AdamState> adam_embeddings;
    std::vector<AdamState> adam_kernels;
    AdamState adam_head;

    static OptimizerBundle create(OptimizerKind kind, const ModelConfig& config,
                                  const std::vector<std::size_t>& cardinalities,
                                  FtrlHyper ftrl, AdamHyper adam);

    void step(ModelParams& params, const GradientSet& grads, const ModelConfig& config);
};

struct SparsityReport {
    double feature_sparse_ratio = 0.0;  // fraction of all-zero embedding rows
    double weight_sparse_ratio = 0.0;   // fraction of zero PIN-kernel entries
};

SparsityReport sparsity_report(const ModelParams& params);

}  // namespace xdeepint
