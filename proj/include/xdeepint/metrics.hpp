#pragma once

#include <cstddef>
#include <vector>

#include "xdeepint/feature.hpp"
#include "xdeepint/model.hpp"

namespace xdeepint {

struct EvalResult {
    double auc = 0.0;
    double logloss = 0.0;
    std::size_t n_examples = 0;
    std::size_t n_positive = 0;
};

/// Rank-statistic AUC with average ranks on ties; throws ValueError when
/// only one class is present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

EvalResult evaluate(const ModelParams& params, const ModelConfig& config,
                    const EncodedDataset& dataset);

}  // namespace xdeepint
