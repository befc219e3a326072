#include "xdeepint/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "xdeepint/errors.hpp"
#include "xdeepint/gradients.hpp"

namespace xdeepint {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw ValueError("scores/labels length mismatch");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int y : labels) pos += static_cast<std::size_t>(y);
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) {
        throw ValueError("AUC undefined: both classes must be present");
    }

    // Stable sort on (score, original index) for cross-platform determinism.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return a < b;
    });

    // Average ranks over tied scores (1-based ranks).
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) positive_rank_sum += avg_rank;
        }
        i = j;
    }
    const double p = static_cast<double>(pos);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

EvalResult evaluate(const ModelParams& params, const ModelConfig& config,
                    const EncodedDataset& dataset) {
    if (dataset.examples.empty()) throw ValueError("cannot evaluate on an empty dataset");
    EvalResult result;
    result.n_examples = dataset.examples.size();
    std::vector<double> scores = predict_batch(dataset.examples, params, config);
    std::vector<int> labels;
    labels.reserve(dataset.examples.size());
    double loss_sum = 0.0;
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        const int y = dataset.examples[i].label;
        labels.push_back(y);
        result.n_positive += static_cast<std::size_t>(y);
        loss_sum += loss(y, scores[i]);
    }
    result.logloss = loss_sum / static_cast<double>(dataset.examples.size());
    result.auc = auc(scores, labels);
    return result;
}

}  // namespace xdeepint
