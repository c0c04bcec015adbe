#ifndef LRGCCF_MATRIX_HPP_
#define LRGCCF_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

#include "lrgccf/common.hpp"

namespace lrgccf {

// Dense row-major matrix of doubles. Rows 0..M are users, M..M+N items
// when used as an embedding table.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

inline double frobenius_sq(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return s;
}

inline bool all_finite(const Matrix& m) {
    for (double v : m.data)
        if (!std::isfinite(v)) return false;
    return true;
}

// y += alpha * x
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

}  // namespace lrgccf

#endif
