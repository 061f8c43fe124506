#include "pbppo/nn/kernels.hpp"

#include <cstdint>

#ifdef PBPPO_HAVE_OPENMP
#include <omp.h>
#endif

namespace pbppo::nn {

namespace serial {

void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                    std::span<const double> w, std::span<const double> b,
                    std::size_t out, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.data() + r * in;
    double* yr = y.data() + r * out;
    for (std::size_t o = 0; o < out; ++o) {
      const double* wo = w.data() + o * in;
      double s = b[o];
      for (std::size_t i = 0; i < in; ++i) s += wo[i] * xr[i];
      yr[o] = s;
    }
  }
}

void affine_backward(std::span<const double> x, std::size_t rows, std::size_t in,
                     std::span<const double> w, std::size_t out,
                     std::span<const double> dy, std::span<double> dx,
                     std::span<double> dw, std::span<double> db) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.data() + r * in;
    const double* dyr = dy.data() + r * out;
    for (std::size_t o = 0; o < out; ++o) {
      const double g = dyr[o];
      double* dwo = dw.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) dwo[i] += g * xr[i];
      db[o] += g;
    }
  }
  if (dx.empty()) return;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* dyr = dy.data() + r * out;
    double* dxr = dx.data() + r * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double g = dyr[o];
      const double* wo = w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) dxr[i] += g * wo[i];
    }
  }
}

}  // namespace serial

namespace parallel {

void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                    std::span<const double> w, std::span<const double> b,
                    std::size_t out, std::span<double> y) {
  const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static) if (rows * out * in > 4096)
  for (std::int64_t r = 0; r < n; ++r) {
    const double* xr = x.data() + r * in;
    double* yr = y.data() + r * out;
    for (std::size_t o = 0; o < out; ++o) {
      const double* wo = w.data() + o * in;
      double s = b[o];
      for (std::size_t i = 0; i < in; ++i) s += wo[i] * xr[i];
      yr[o] = s;
    }
  }
}

void affine_backward(std::span<const double> x, std::size_t rows, std::size_t in,
                     std::span<const double> w, std::size_t out,
                     std::span<const double> dy, std::span<double> dx,
                     std::span<double> dw, std::span<double> db) {
  const bool big = rows * out * in > 4096;
  // Output units own disjoint rows of dw; each element still sums over the
  // batch in ascending order.
  const auto n_out = static_cast<std::int64_t>(out);
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t o = 0; o < n_out; ++o) {
    double* dwo = dw.data() + o * in;
    for (std::size_t r = 0; r < rows; ++r) {
      const double g = dy[r * out + o];
      const double* xr = x.data() + r * in;
      for (std::size_t i = 0; i < in; ++i) dwo[i] += g * xr[i];
      db[o] += g;
    }
  }
  if (dx.empty()) return;
  const auto n_rows = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static) if (big)
  for (std::int64_t r = 0; r < n_rows; ++r) {
    const double* dyr = dy.data() + r * out;
    double* dxr = dx.data() + r * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double g = dyr[o];
      const double* wo = w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) dxr[i] += g * wo[i];
    }
  }
}

}  // namespace parallel

void affine_forward(Exec exec, std::span<const double> x, std::size_t rows,
                    std::size_t in, std::span<const double> w,
                    std::span<const double> b, std::size_t out,
                    std::span<double> y) {
  if (exec == Exec::kParallel) {
    parallel::affine_forward(x, rows, in, w, b, out, y);
  } else {
    serial::affine_forward(x, rows, in, w, b, out, y);
  }
}

void affine_backward(Exec exec, std::span<const double> x, std::size_t rows,
                     std::size_t in, std::span<const double> w, std::size_t out,
                     std::span<const double> dy, std::span<double> dx,
                     std::span<double> dw, std::span<double> db) {
  if (exec == Exec::kParallel) {
    parallel::affine_backward(x, rows, in, w, out, dy, dx, dw, db);
  } else {
    serial::affine_backward(x, rows, in, w, out, dy, dx, dw, db);
  }
}

bool parallel_kernels_available() {
#ifdef PBPPO_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef PBPPO_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace pbppo::nn
