#pragma once

#include <cstddef>
#include <vector>

namespace xdeepint {

/// Dense row-major matrix of doubles. The only numeric carrier in the
/// library: feature maps, interaction kernels and embedding tables are
/// all plain Matrix values.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool all_finite() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

// Summation order in all kernels is leftmost-index-major; tests rely on it
// for bitwise agreement with the naive reference loops.

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);

/// matmul(w, x) with 1.0 added to every entry.
Matrix matmul_add_one(const Matrix& w, const Matrix& x);

Matrix transpose(const Matrix& a);

/// alpha*a + beta*b, entry-wise.
Matrix scale_add(const Matrix& a, double alpha, const Matrix& b, double beta);

double reduce_sum_all(const Matrix& a);

double sigmoid(double s);

/// Clamp a probability into [eps, 1-eps] before it meets a log.
double clamp_prob(double p, double eps = 1e-12);

}  // namespace xdeepint
