#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xdeepint/feature.hpp"
#include "xdeepint/metrics.hpp"
#include "xdeepint/model.hpp"
#include "xdeepint/optimizers.hpp"

namespace xdeepint {

struct TrainConfig {
    ModelConfig model;
    OptimizerKind optimizer = OptimizerKind::GftrlFtrl;
    FtrlHyper ftrl;
    AdamHyper adam;
    std::size_t batch_size = 4096;
    std::size_t eval_every_steps = 2000;
    std::size_t patience = 3;  // evaluations without valid-AUC improvement
    std::size_t max_steps = 10000;
    std::uint64_t seed = 42;

    void validate() const;
};

/// Binary format: magic XDPI, u32 version=1, little-endian throughout;
/// counts as u64, reals as IEEE-754 binary64, matrices row-major;
/// sections in fixed order (config, embeddings, kernels, head, optimizer
/// states, metadata).
struct Checkpoint {
    ModelConfig model;
    ModelParams params;
    OptimizerBundle opt;
    std::uint64_t vocab_hash = 0;
    std::uint64_t step = 0;
    double best_valid_auc = 0.0;
    double best_valid_logloss = 0.0;
    std::uint64_t evals_since_improvement = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct MetricRecord {
    std::uint64_t step;
    std::string split;
    double auc;
    double logloss;
};

struct TrainOutcome {
    Checkpoint best;   // parameters with the best valid AUC seen
    Checkpoint final;  // state at the last executed step (resumable)
    std::vector<MetricRecord> history;
};

/// Mini-batch loop: seed-derived per-epoch permutations, periodic
/// evaluation on the validation split, early stopping on valid AUC.
/// Passing `resume` continues a previous run; the datasets and config
/// must match the original run for the trajectory to be reproduced.
TrainOutcome train(const EncodedDataset& train_ds, const EncodedDataset& valid_ds,
                   const TrainConfig& config, const std::optional<Checkpoint>& resume = {},
                   std::uint64_t vocab_hash = 0);

void write_metrics_csv(const std::vector<MetricRecord>& history, const std::string& path);

}  // namespace xdeepint
