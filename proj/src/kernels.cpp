#include "gsim/kernels.hpp"

#include <cassert>

namespace gsim::kernels {

namespace {

// Shared inner loops. Both the serial and the parallel paths call these, so a
// given output element is produced by the same instruction sequence either way.
double row_dot(const double* w, const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += w[k] * x[k];
    }
    return acc;
}

double col_dot(const double* w, const double* d, std::size_t rows, std::size_t cols, std::size_t j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        acc += w[i * cols + j] * d[i];
    }
    return acc;
}

void row_accumulate(double* w, const double* x, double a, std::size_t cols) {
    for (std::size_t j = 0; j < cols; ++j) {
        w[j] += a * x[j];
    }
}

}  // namespace

namespace serial {

void matvec_bias(std::span<const double> w, std::span<const double> x, std::span<const double> b,
                 std::span<double> y, std::size_t rows, std::size_t cols) {
    assert(w.size() == rows * cols && x.size() == cols && b.size() == rows && y.size() == rows);
    for (std::size_t i = 0; i < rows; ++i) {
        y[i] = row_dot(w.data() + i * cols, x.data(), cols) + b[i];
    }
}

void matvec_transposed(std::span<const double> w, std::span<const double> d, std::span<double> y,
                       std::size_t rows, std::size_t cols) {
    assert(w.size() == rows * cols && d.size() == rows && y.size() == cols);
    for (std::size_t j = 0; j < cols; ++j) {
        y[j] = col_dot(w.data(), d.data(), rows, cols, j);
    }
}

void rank1_accumulate(std::span<double> w, std::span<const double> d, std::span<const double> x,
                      double scale, std::size_t rows, std::size_t cols) {
    assert(w.size() == rows * cols && d.size() == rows && x.size() == cols);
    for (std::size_t i = 0; i < rows; ++i) {
        row_accumulate(w.data() + i * cols, x.data(), scale * d[i], cols);
    }
}

void axpy(std::span<double> y, std::span<const double> x, double a) {
    assert(y.size() == x.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += a * x[i];
    }
}

}  // namespace serial

void matvec_bias(std::span<const double> w, std::span<const double> x, std::span<const double> b,
                 std::span<double> y, std::size_t rows, std::size_t cols) {
    if (rows * cols < kParallelCutoff) {
        serial::matvec_bias(w, x, b, y, rows, cols);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
        y[i] = row_dot(w.data() + i * cols, x.data(), cols) + b[i];
    }
}

void matvec_transposed(std::span<const double> w, std::span<const double> d, std::span<double> y,
                       std::size_t rows, std::size_t cols) {
    if (rows * cols < kParallelCutoff) {
        serial::matvec_transposed(w, d, y, rows, cols);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(cols); ++j) {
        y[j] = col_dot(w.data(), d.data(), rows, cols, j);
    }
}

void rank1_accumulate(std::span<double> w, std::span<const double> d, std::span<const double> x,
                      double scale, std::size_t rows, std::size_t cols) {
    if (rows * cols < kParallelCutoff) {
        serial::rank1_accumulate(w, d, x, scale, rows, cols);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
        row_accumulate(w.data() + i * cols, x.data(), scale * d[i], cols);
    }
}

void axpy(std::span<double> y, std::span<const double> x, double a) {
    if (y.size() < kParallelCutoff) {
        serial::axpy(y, x, a);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(y.size()); ++i) {
        y[i] += a * x[i];
    }
}

}  // namespace gsim::kernels
