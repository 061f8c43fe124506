#ifndef PBPPO_NN_MATRIX_HPP_
#define PBPPO_NN_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace pbppo::nn {

// Row-major dense matrix; rows index batch samples throughout the library.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  static Matrix column(std::span<const double> v) {
    Matrix m(v.size(), 1);
    m.data.assign(v.begin(), v.end());
    return m;
  }
  static Matrix row(std::span<const double> v) {
    Matrix m(1, v.size());
    m.data.assign(v.begin(), v.end());
    return m;
  }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row_span(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row_span(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

}  // namespace pbppo::nn

#endif  // PBPPO_NN_MATRIX_HPP_
