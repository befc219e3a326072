#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "xdeepint/gradients.hpp"
#include "xdeepint/matrix.hpp"
#include "xdeepint/model.hpp"

namespace xdeepint {
namespace oracle {

// Brute-force references used only by tests and the self-check command.
// Deliberately naive; correctness over speed.

Matrix naive_matmul(const Matrix& a, const Matrix& b);
Matrix naive_hadamard(const Matrix& a, const Matrix& b);
Matrix naive_scale_add(const Matrix& a, double alpha, const Matrix& b, double beta);

/// Variable id: one entry (row, col) of the stacked input feature map.
using VarId = std::pair<std::size_t, std::size_t>;

/// A monomial is a sorted multiset of variable ids; the polynomial maps
/// monomials to coefficients, zero coefficients pruned.
struct SparsePolynomial {
    std::map<std::vector<VarId>, double> terms;

    double evaluate(const Matrix& x0) const;
    std::size_t degree() const;
    void add_term(std::vector<VarId> vars, double coeff);
    SparsePolynomial multiply(const SparsePolynomial& other) const;
};

/// Exact symbolic expansion of the stacked interaction recursion with
/// linear activation: entry (i,k) after L layers is
/// x_ik * prod_r (sum_j w^(r)_ij x_jk + 1). Shapes are capped (rows <= 8,
/// cols <= 4, L <= 4) to keep the expansion tractable.
std::vector<std::vector<SparsePolynomial>> pin_symbolic(std::size_t rows, std::size_t cols,
                                                        const std::vector<Matrix>& kernels);

/// Central finite differences of an arbitrary scalar loss over every
/// coordinate of ModelParams. Embedding rows land in the sparse map (all
/// rows are probed; zero rows are dropped).
GradientSet finite_diff(const std::function<double(const ModelParams&)>& loss_fn,
                        const ModelParams& params, const ModelConfig& config, double step = 1e-6);

/// O(P*N) pairwise AUC, ties scored 0.5.
double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace oracle

/// Largest |a-b| / max(1, |a|) over every coordinate of the two gradient
/// sets; absent sparse embedding rows count as zero.
double max_gradient_mismatch(const GradientSet& analytic, const GradientSet& numeric);

struct SelfCheckResult {
    struct Item {
        std::string name;
        bool passed;
        std::string detail;
    };
    std::vector<Item> items;
    bool all_passed() const;
};

/// Runs the oracle suites (polynomial equivalence, finite-difference
/// gradient check, pairwise AUC agreement) at fixed seeds.
SelfCheckResult run_self_check();

}  // namespace xdeepint
