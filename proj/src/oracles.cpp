#include "xdeepint/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "xdeepint/errors.hpp"

namespace xdeepint {
namespace oracle {

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("naive_matmul shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    }
    return c;
}

Matrix naive_hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeError("naive_hadamard shape mismatch");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) * b(i, j);
    return c;
}

Matrix naive_scale_add(const Matrix& a, double alpha, const Matrix& b, double beta) {
    if (!a.same_shape(b)) throw ShapeError("naive_scale_add shape mismatch");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = alpha * a(i, j) + beta * b(i, j);
    return c;
}

void SparsePolynomial::add_term(std::vector<VarId> vars, double coeff) {
    if (coeff == 0.0) return;
    std::sort(vars.begin(), vars.end());
    auto it = terms.find(vars);
    if (it == terms.end()) {
        terms.emplace(std::move(vars), coeff);
    } else {
        it->second += coeff;
        if (it->second == 0.0) terms.erase(it);
    }
}

double SparsePolynomial::evaluate(const Matrix& x0) const {
    double total = 0.0;
    for (const auto& [vars, coeff] : terms) {
        double prod = coeff;
        for (const auto& [r, c] : vars) prod *= x0(r, c);
        total += prod;
    }
    return total;
}

std::size_t SparsePolynomial::degree() const {
    std::size_t d = 0;
    for (const auto& [vars, coeff] : terms) d = std::max(d, vars.size());
    return d;
}

SparsePolynomial SparsePolynomial::multiply(const SparsePolynomial& other) const {
    SparsePolynomial out;
    for (const auto& [va, ca] : terms) {
        for (const auto& [vb, cb] : other.terms) {
            std::vector<VarId> merged = va;
            merged.insert(merged.end(), vb.begin(), vb.end());
            out.add_term(std::move(merged), ca * cb);
        }
    }
    return out;
}

std::vector<std::vector<SparsePolynomial>> pin_symbolic(std::size_t rows, std::size_t cols,
                                                        const std::vector<Matrix>& kernels) {
    if (rows > 8 || cols > 4 || kernels.size() > 4) {
        throw ValueError("pin_symbolic shape budget exceeded (rows<=8, cols<=4, L<=4)");
    }
    for (const auto& w : kernels) {
        if (w.rows() != rows || w.cols() != rows) throw ShapeError("pin_symbolic kernel shape");
    }
    std::vector<std::vector<SparsePolynomial>> out(rows, std::vector<SparsePolynomial>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < cols; ++k) {
            SparsePolynomial poly;
            poly.add_term({VarId{i, k}}, 1.0);  // x_ik
            for (const auto& w : kernels) {
                SparsePolynomial factor;
                factor.add_term({}, 1.0);  // the +1
                for (std::size_t j = 0; j < rows; ++j) {
                    factor.add_term({VarId{j, k}}, w(i, j));
                }
                poly = poly.multiply(factor);
            }
            out[i][k] = std::move(poly);
        }
    }
    return out;
}

GradientSet finite_diff(const std::function<double(const ModelParams&)>& loss_fn,
                        const ModelParams& params, const ModelConfig& config, double step) {
    GradientSet g = zero_gradients(config);
    ModelParams p = params;
    const double inv2h = 0.5 / step;

    auto central = [&](double& coord) {
        const double saved = coord;
        coord = saved + step;
        const double up = loss_fn(p);
        coord = saved - step;
        const double down = loss_fn(p);
        coord = saved;
        return (up - down) * inv2h;
    };

    for (std::size_t l = 0; l < p.pin_kernels.size(); ++l) {
        for (std::size_t i = 0; i < p.pin_kernels[l].size(); ++i) {
            g.d_pin_kernels[l].data()[i] = central(p.pin_kernels[l].data()[i]);
        }
    }
    for (std::size_t i = 0; i < p.out_weights.size(); ++i) {
        g.d_out_weights.data()[i] = central(p.out_weights.data()[i]);
    }
    g.d_bias = central(p.bias);
    for (std::size_t f = 0; f < p.embeddings.size(); ++f) {
        for (std::size_t r = 0; r < p.embeddings[f].rows(); ++r) {
            std::vector<double> row(config.embedding_dim, 0.0);
            bool nonzero = false;
            for (std::size_t k = 0; k < config.embedding_dim; ++k) {
                row[k] = central(p.embeddings[f](r, k));
                if (row[k] != 0.0) nonzero = true;
            }
            if (nonzero) g.d_embeddings[{f, r}] = std::move(row);
        }
    }
    return g;
}

double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw ValueError("scores/labels length mismatch");
    double wins = 0.0;
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 1) ++pos;
        else ++neg;
    }
    if (pos == 0 || neg == 0) throw ValueError("AUC undefined: both classes must be present");
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace oracle

double max_gradient_mismatch(const GradientSet& analytic, const GradientSet& numeric) {
    double worst = 0.0;
    auto cmp = [&](double a, double b) {
        const double rel = std::abs(a - b) / std::max(1.0, std::abs(a));
        worst = std::max(worst, rel);
    };
    for (std::size_t l = 0; l < analytic.d_pin_kernels.size(); ++l) {
        for (std::size_t i = 0; i < analytic.d_pin_kernels[l].size(); ++i) {
            cmp(analytic.d_pin_kernels[l].data()[i], numeric.d_pin_kernels[l].data()[i]);
        }
    }
    for (std::size_t i = 0; i < analytic.d_out_weights.size(); ++i) {
        cmp(analytic.d_out_weights.data()[i], numeric.d_out_weights.data()[i]);
    }
    cmp(analytic.d_bias, numeric.d_bias);

    auto sweep = [&](const auto& lhs, const auto& rhs, bool lhs_is_analytic) {
        for (const auto& [key, row] : lhs) {
            auto it = rhs.find(key);
            for (std::size_t k = 0; k < row.size(); ++k) {
                const double other = it == rhs.end() ? 0.0 : it->second[k];
                if (lhs_is_analytic) cmp(row[k], other);
                else cmp(other, row[k]);
            }
        }
    };
    sweep(analytic.d_embeddings, numeric.d_embeddings, true);
    sweep(numeric.d_embeddings, analytic.d_embeddings, false);
    return worst;
}

}  // namespace xdeepint
