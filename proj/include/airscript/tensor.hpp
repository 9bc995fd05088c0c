#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace airscript {

// Dense row-major double tensor. Just storage plus shape; the math lives in
// the free kernels below so the hot loops stay visible to the vectorizer.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
      : shape_(std::move(shape)),
        data_(std::accumulate(shape_.begin(), shape_.end(), std::size_t{1},
                              [](std::size_t a, std::size_t b) { return a * b; }),
              fill) {
    if (shape_.empty()) throw std::invalid_argument("Tensor: empty shape");
  }

  static Tensor zeros(std::initializer_list<std::size_t> shape) {
    return Tensor(std::vector<std::size_t>(shape));
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rows() const { return shape_[0]; }
  std::size_t cols() const { return shape_.size() > 1 ? shape_[1] : 1; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Eight-lane dot product with a fixed reduction order: lane l owns indices
// congruent to l mod 8. Independent lanes break the FP latency chain and
// vectorize without relaxing IEEE semantics, and the result is identical on
// every run because the order never changes.
inline double dot8(const double* __restrict a, const double* __restrict b, std::size_t n) {
  double lane[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  const std::size_t limit = n - n % 8;
  for (std::size_t i = 0; i < limit; i += 8) {
    for (std::size_t l = 0; l < 8; ++l) lane[l] += a[i + l] * b[i + l];
  }
  double tail = 0.0;
  for (std::size_t i = limit; i < n; ++i) tail += a[i] * b[i];
  return (((lane[0] + lane[1]) + (lane[2] + lane[3])) +
          ((lane[4] + lane[5]) + (lane[6] + lane[7]))) +
         tail;
}

// C(m x n) += A(m x k) * B(k x n), all row-major.
inline void matmul_accum(const double* __restrict a, const double* __restrict b,
                         double* __restrict c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// y(rows) += M(rows x cols) * x(cols)
inline void matvec_accum(const double* __restrict m, const double* __restrict x,
                         double* __restrict y, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    y[i] += dot8(m + i * cols, x, cols);
  }
}

// y(cols) += M(rows x cols)^T * x(rows)
inline void matvec_t_accum(const double* __restrict m, const double* __restrict x,
                           double* __restrict y, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    const double xv = x[i];
    for (std::size_t j = 0; j < cols; ++j) y[j] += xv * row[j];
  }
}

// M(rows x cols) += u(rows) * v(cols)^T
inline void outer_accum(double* __restrict m, const double* __restrict u,
                        const double* __restrict v, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = m + i * cols;
    const double uv = u[i];
    for (std::size_t j = 0; j < cols; ++j) row[j] += uv * v[j];
  }
}

}  // namespace airscript
