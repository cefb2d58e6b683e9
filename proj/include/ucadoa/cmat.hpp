#pragma once

#include <cassert>
#include <vector>

#include "ucadoa/types.hpp"

namespace ucadoa {

/// Small dense complex matrix, row-major. Everything in this project is
/// at most 8x8, so no attempt is made at being clever.
class CMat {
 public:
  CMat() = default;
  CMat(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<size_t>(rows) * cols) {}

  static CMat identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cplx& operator()(int i, int j) { return d_[static_cast<size_t>(i) * cols_ + j]; }
  const cplx& operator()(int i, int j) const { return d_[static_cast<size_t>(i) * cols_ + j]; }

  CMat adjoint() const {
    CMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  CMat operator*(const CMat& o) const {
    assert(cols_ == o.rows_);
    CMat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const cplx v = (*this)(i, k);
        if (v == cplx{}) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }

  CMat operator-(const CMat& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    CMat r(rows_, cols_);
    for (size_t i = 0; i < d_.size(); ++i) r.d_[i] = d_[i] - o.d_[i];
    return r;
  }

  CMat operator*(double s) const {
    CMat r = *this;
    for (auto& v : r.d_) v *= s;
    return r;
  }

  std::vector<cplx> apply(const std::vector<cplx>& x) const {
    assert(static_cast<int>(x.size()) == cols_);
    std::vector<cplx> y(rows_);
    for (int i = 0; i < rows_; ++i) {
      cplx acc{};
      for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
      y[i] = acc;
    }
    return y;
  }

  double frobenius_norm() const {
    double s = 0;
    for (const auto& v : d_) s += std::norm(v);
    return std::sqrt(s);
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<cplx> d_;
};

}  // namespace ucadoa
