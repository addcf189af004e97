#pragma once

#include <cstddef>
#include <vector>

namespace agb {

/// Dense row-major matrix, just large enough for design matrices and the
/// LOO prediction matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

/// Minimum-residual solution of X beta = y via column-pivoted Householder
/// QR. Throws RankDeficient (with the offending column index) when the
/// columns are numerically collinear, and DataError when rows < cols.
std::vector<double> solve_least_squares(const Matrix& X, const std::vector<double>& y);

}  // namespace agb
