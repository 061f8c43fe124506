#ifndef PBPPO_NN_KERNELS_HPP_
#define PBPPO_NN_KERNELS_HPP_

#include <cstddef>
#include <span>

namespace pbppo::nn {

// Batched dense-layer kernels. Every kernel has a serial reference and an
// OpenMP variant; both accumulate each output element over the same index
// order, so their results are bit-identical for any thread count.
enum class Exec { kSerial, kParallel };

// y[r, o] = b[o] + sum_i w[o, i] * x[r, i]
void affine_forward(Exec exec, std::span<const double> x, std::size_t rows,
                    std::size_t in, std::span<const double> w,
                    std::span<const double> b, std::size_t out,
                    std::span<double> y);

// Accumulates dw += dy^T x, db += column sums of dy, and (if dx is non-empty)
// dx += dy w.
void affine_backward(Exec exec, std::span<const double> x, std::size_t rows,
                     std::size_t in, std::span<const double> w, std::size_t out,
                     std::span<const double> dy, std::span<double> dx,
                     std::span<double> dw, std::span<double> db);

namespace serial {
void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                    std::span<const double> w, std::span<const double> b,
                    std::size_t out, std::span<double> y);
void affine_backward(std::span<const double> x, std::size_t rows, std::size_t in,
                     std::span<const double> w, std::size_t out,
                     std::span<const double> dy, std::span<double> dx,
                     std::span<double> dw, std::span<double> db);
}  // namespace serial

namespace parallel {
void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                    std::span<const double> w, std::span<const double> b,
                    std::size_t out, std::span<double> y);
void affine_backward(std::span<const double> x, std::size_t rows, std::size_t in,
                     std::span<const double> w, std::size_t out,
                     std::span<const double> dy, std::span<double> dx,
                     std::span<double> dw, std::span<double> db);
}  // namespace parallel

// True when the library was compiled with OpenMP.
bool parallel_kernels_available();
int max_threads();

}  // namespace pbppo::nn

#endif  // PBPPO_NN_KERNELS_HPP_
