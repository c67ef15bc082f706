#pragma once

// Small dense matrices over exact rings. Sizes here are tiny (dimension of a
// space of modular forms), so everything is cubic and straightforward.

#include <cstddef>
#include <string>
#include <vector>

#include "trisqrt/arith.hpp"

namespace trisqrt {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, const T& fill = T(0)) : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  T& operator()(size_t i, size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(size_t i, size_t j) const { return a_[i * cols_ + j]; }

  friend bool operator==(const Matrix& x, const Matrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    Matrix z(x.rows_, y.cols_);
    for (size_t i = 0; i < x.rows_; ++i)
      for (size_t k = 0; k < x.cols_; ++k)
        for (size_t j = 0; j < y.cols_; ++j) z(i, j) += x(i, k) * y(k, j);
    return z;
  }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<T> a_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

inline RatMatrix to_rat(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
  return r;
}

/// Fraction-free determinant (Bareiss).
inline Int determinant(IntMatrix m) {
  const size_t n = m.rows();
  require(n == m.cols(), ErrorCode::InvalidArgument, "determinant of a non-square matrix");
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      size_t swap = k + 1;
      while (swap < n && m(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      for (size_t j = 0; j < n; ++j) std::swap(m(k, j), m(swap, j));
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) {
        Int t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

/// Characteristic polynomial det(xI - A), coefficients low-to-high, via
/// Faddeev-LeVerrier.
inline std::vector<Rat> charpoly_rat(const RatMatrix& A) {
  const size_t n = A.rows();
  require(n == A.cols(), ErrorCode::InvalidArgument, "charpoly of a non-square matrix");
  std::vector<Rat> c(n + 1);
  c[n] = 1;
  RatMatrix Mk(n, n);
  for (size_t k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + c_{n-k+1} I
    RatMatrix next = A * Mk;
    for (size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    Mk = next;
    RatMatrix AM = A * Mk;
    Rat tr = 0;
    for (size_t i = 0; i < n; ++i) tr += AM(i, i);
    c[n - k] = -tr / static_cast<long>(k);
  }
  return c;
}

inline std::vector<Int> charpoly(const IntMatrix& a) {
  std::vector<Int> out;
  for (auto& x : charpoly_rat(to_rat(a))) {
    require(x.get_den() == 1, ErrorCode::InvalidArgument, "charpoly of an integer matrix is not integral");
    out.push_back(x.get_num());
  }
  return out;
}

/// Solve A x = b over a field whose elements support + - * / and == 0.
/// Returns false when A is singular.
template <class T>
bool solve_in_place(Matrix<T> a, std::vector<T> b, std::vector<T>& x) {
  const size_t n = a.rows();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && a(piv, col) == 0) ++piv;
    if (piv == n) return false;
    if (piv != col) {
      for (size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(b[piv], b[col]);
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == col || a(i, col) == 0) continue;
      T f = a(i, col) / a(col, col);
      for (size_t j = col; j < n; ++j) a(i, j) = a(i, j) - f * a(col, j);
      b[i] = b[i] - f * b[col];
    }
  }
  x.assign(n, T(0));
  for (size_t i = 0; i < n; ++i) x[i] = b[i] / a(i, i);
  return true;
}

}  // namespace trisqrt
