#pragma once

#include <cstddef>
#include <span>

// Dense kernels behind the predictor and the SGD updates. The parallel entry
// points compute every output element with the exact same serial summation
// order as the reference in kernels::serial, so results are bitwise identical
// for any thread count (including builds without OpenMP).
namespace gsim::kernels {

// Work sizes below this run the serial path; the cutoff is size-based so
// dispatch itself is deterministic.
inline constexpr std::size_t kParallelCutoff = 8192;

namespace serial {

// y = W x + b, W row-major (rows x cols)
void matvec_bias(std::span<const double> w, std::span<const double> x, std::span<const double> b,
                 std::span<double> y, std::size_t rows, std::size_t cols);

// y = W^T d  (input gradient of an affine layer)
void matvec_transposed(std::span<const double> w, std::span<const double> d, std::span<double> y,
                       std::size_t rows, std::size_t cols);

// W += scale * d x^T  (rank-1 accumulate)
void rank1_accumulate(std::span<double> w, std::span<const double> d, std::span<const double> x,
                      double scale, std::size_t rows, std::size_t cols);

// y += a * x
void axpy(std::span<double> y, std::span<const double> x, double a);

}  // namespace serial

void matvec_bias(std::span<const double> w, std::span<const double> x, std::span<const double> b,
                 std::span<double> y, std::size_t rows, std::size_t cols);
void matvec_transposed(std::span<const double> w, std::span<const double> d, std::span<double> y,
                       std::size_t rows, std::size_t cols);
void rank1_accumulate(std::span<double> w, std::span<const double> d, std::span<const double> x,
                      double scale, std::size_t rows, std::size_t cols);
void axpy(std::span<double> y, std::span<const double> x, double a);

}  // namespace gsim::kernels
