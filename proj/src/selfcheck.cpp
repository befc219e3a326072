#include <cmath>
#include <sstream>

#include "xdeepint/metrics.hpp"
#include "xdeepint/oracles.hpp"

namespace xdeepint {

namespace {

double uniform(std::uint64_t& state, double lo, double hi) {
    double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

}  // namespace

bool SelfCheckResult::all_passed() const {
    for (const auto& item : items) {
        if (!item.passed) return false;
    }
    return true;
}

SelfCheckResult run_self_check() {
    SelfCheckResult result;

    // Polynomial expansion vs forward recursion, linear activation.
    {
        std::uint64_t rng = 0x5eedf00d;
        double worst = 0.0;
        bool ok = true;
        for (int trial = 0; trial < 40 && ok; ++trial) {
            const std::size_t rows = 1 + splitmix64(rng) % 6;
            const std::size_t cols = 1 + splitmix64(rng) % 4;
            const std::size_t L = splitmix64(rng) % 5;
            ModelConfig config;
            config.field_count = rows;
            config.embedding_dim = cols;
            config.pin_layers = L;
            config.subspaces = 1;
            ModelParams params;
            for (std::size_t f = 0; f < rows; ++f) params.embeddings.emplace_back(2, cols);
            for (std::size_t l = 0; l < L; ++l) {
                Matrix w(rows, rows);
                for (double& v : w.data()) v = uniform(rng, -1.0, 1.0);
                params.pin_kernels.push_back(std::move(w));
            }
            params.out_weights = Matrix(1, rows);
            Matrix x0(rows, cols);
            for (double& v : x0.data()) v = uniform(rng, -2.0, 2.0);
            auto polys = oracle::pin_symbolic(rows, cols, params.pin_kernels);
            ForwardTrace trace = pin_forward(x0, params, config);
            const Matrix& xl = trace.layer(L);
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t k = 0; k < cols; ++k) {
                    const double expect = polys[i][k].evaluate(x0);
                    const double got = xl(i, k);
                    const double rel = std::abs(got - expect) / std::max(1.0, std::abs(expect));
                    worst = std::max(worst, rel);
                    if (rel > 1e-12) ok = false;
                }
            }
        }
        std::ostringstream detail;
        detail << "worst relative error " << worst;
        result.items.push_back({"polynomial-expansion-equivalence", ok, detail.str()});
    }

    // Analytic backward vs central finite differences.
    {
        std::uint64_t rng = 0xdeadc0de;
        double worst = 0.0;
        bool ok = true;
        const Activation acts[] = {Activation::Linear, Activation::Relu, Activation::Tanh,
                                   Activation::Sigmoid};
        for (int trial = 0; trial < 12 && ok; ++trial) {
            ModelConfig config;
            config.field_count = 1 + splitmix64(rng) % 3;
            config.subspaces = 1 + splitmix64(rng) % 2;
            config.embedding_dim = config.subspaces * (1 + splitmix64(rng) % 2);
            config.pin_layers = splitmix64(rng) % 4;
            config.activation = acts[trial % 4];
            std::vector<std::size_t> cards(config.field_count, 3);
            ModelParams params = init_params(config, cards, splitmix64(rng));
            for (auto& w : params.pin_kernels)
                for (double& v : w.data()) v = uniform(rng, -0.5, 0.5);
            for (double& v : params.out_weights.data()) v = uniform(rng, -0.5, 0.5);
            params.bias = uniform(rng, -0.2, 0.2);
            Example ex;
            for (std::size_t f = 0; f < config.field_count; ++f) {
                ex.indices.push_back(static_cast<std::uint32_t>(splitmix64(rng) % 3));
            }
            ex.label = static_cast<int>(splitmix64(rng) % 2);

            Matrix x0 = restack(embed(ex, params, config), config.subspaces);
            ForwardTrace trace = pin_forward(x0, params, config);
            GradientSet analytic = backward(trace, ex, ex.label, params, config);
            auto loss_fn = [&](const ModelParams& p) {
                Matrix x = restack(embed(ex, p, config), config.subspaces);
                return loss(ex.label, pin_forward(x, p, config).prediction);
            };
            GradientSet numeric = oracle::finite_diff(loss_fn, params, config);
            worst = std::max(worst, max_gradient_mismatch(analytic, numeric));
            if (worst > 1e-6) ok = false;
        }
        std::ostringstream detail;
        detail << "worst relative error " << worst;
        result.items.push_back({"finite-difference-gradients", ok, detail.str()});
    }

    // Rank-statistic AUC vs brute-force pairwise count.
    {
        std::uint64_t rng = 0xabcdef01;
        bool ok = true;
        for (int trial = 0; trial < 200 && ok; ++trial) {
            const std::size_t n = 2 + splitmix64(rng) % 60;
            std::vector<double> scores(n);
            std::vector<int> labels(n);
            bool has_pos = false, has_neg = false;
            for (std::size_t i = 0; i < n; ++i) {
                // Quantized scores so heavy ties occur.
                scores[i] = static_cast<double>(splitmix64(rng) % 8) / 8.0;
                labels[i] = static_cast<int>(splitmix64(rng) % 2);
                (labels[i] == 1 ? has_pos : has_neg) = true;
            }
            if (!has_pos || !has_neg) continue;
            if (auc(scores, labels) != oracle::pairwise_auc(scores, labels)) ok = false;
        }
        result.items.push_back({"auc-pairwise-agreement", ok, ok ? "exact match" : "mismatch"});
    }

    return result;
}

}  // namespace xdeepint
