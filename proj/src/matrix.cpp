#include "xdeepint/matrix.hpp"

#include <cmath>
#include <type_traits>
#include <string>

#include "xdeepint/errors.hpp"

namespace xdeepint {

namespace {

std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("Matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
    }
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul shape mismatch: " + shape_str(a) + " x " + shape_str(b));
    }
    Matrix c(a.rows(), b.cols());
    const std::size_t inner = a.cols();
    const std::size_t width = b.cols();
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* pc = c.data().data();
    // Column tiles accumulated on the stack so the k loop stays in
    // registers; each output element still sums over k in ascending order,
    // keeping results bit-identical to the naive triple loop.
    constexpr std::size_t kTile = 8;
    auto tile_rows = [&](std::size_t i0, std::size_t j0, auto tile_width, auto row_count) {
        constexpr std::size_t T = tile_width();
        constexpr std::size_t R = row_count();
        double acc[R][T] = {};
        for (std::size_t k = 0; k < inner; ++k) {
            const double* brow = pb + k * width + j0;
            for (std::size_t r = 0; r < R; ++r) {
                const double aik = pa[(i0 + r) * inner + k];
                for (std::size_t j = 0; j < T; ++j) acc[r][j] += aik * brow[j];
            }
        }
        for (std::size_t r = 0; r < R; ++r) {
            double* crow = pc + (i0 + r) * width + j0;
            for (std::size_t j = 0; j < T; ++j) crow[j] = acc[r][j];
        }
    };
    auto col_sweep = [&](std::size_t i0, auto row_count) {
        std::size_t j0 = 0;
        for (; j0 + kTile <= width; j0 += kTile) {
            tile_rows(i0, j0, std::integral_constant<std::size_t, kTile>{}, row_count);
        }
        // remainder columns, one statically sized tail each
        switch (width - j0) {
            case 7: tile_rows(i0, j0, std::integral_constant<std::size_t, 7>{}, row_count); break;
            case 6: tile_rows(i0, j0, std::integral_constant<std::size_t, 6>{}, row_count); break;
            case 5: tile_rows(i0, j0, std::integral_constant<std::size_t, 5>{}, row_count); break;
            case 4: tile_rows(i0, j0, std::integral_constant<std::size_t, 4>{}, row_count); break;
            case 3: tile_rows(i0, j0, std::integral_constant<std::size_t, 3>{}, row_count); break;
            case 2: tile_rows(i0, j0, std::integral_constant<std::size_t, 2>{}, row_count); break;
            case 1: tile_rows(i0, j0, std::integral_constant<std::size_t, 1>{}, row_count); break;
            default: break;
        }
    };
    std::size_t i0 = 0;
    for (; i0 + 4 <= a.rows(); i0 += 4) {
        col_sweep(i0, std::integral_constant<std::size_t, 4>{});
    }
    for (; i0 < a.rows(); ++i0) {
        col_sweep(i0, std::integral_constant<std::size_t, 1>{});
    }
    return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("hadamard shape mismatch: " + shape_str(a) + " vs " + shape_str(b));
    }
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = a.data()[i] * b.data()[i];
    return c;
}

Matrix matmul_add_one(const Matrix& w, const Matrix& x) {
    Matrix c = matmul(w, x);
    for (double& v : c.data()) v += 1.0;
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix c(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = a(i, j);
    }
    return c;
}

Matrix scale_add(const Matrix& a, double alpha, const Matrix& b, double beta) {
    if (!a.same_shape(b)) {
        throw ShapeError("scale_add shape mismatch: " + shape_str(a) + " vs " + shape_str(b));
    }
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < c.size(); ++i) {
        c.data()[i] = alpha * a.data()[i] + beta * b.data()[i];
    }
    return c;
}

double reduce_sum_all(const Matrix& a) {
    double s = 0.0;
    for (double v : a.data()) s += v;
    return s;
}

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

double clamp_prob(double p, double eps) {
    if (p < eps) return eps;
    if (p > 1.0 - eps) return 1.0 - eps;
    return p;
}

}  // namespace xdeepint
