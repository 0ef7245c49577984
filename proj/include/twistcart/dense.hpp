#pragma once

// Small dense exact matrices for pointwise linear algebra.

#include <cstddef>
#include <vector>

#include "twistcart/error.hpp"
#include "twistcart/linalg.hpp"
#include "twistcart/rational.hpp"

namespace twistcart {

template <class F>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : r_(r), c_(c), a_(r * c, F(0)) {}
  Matrix(std::initializer_list<std::initializer_list<F>> rows) {
    r_ = rows.size();
    c_ = r_ ? rows.begin()->size() : 0;
    for (const auto& row : rows) {
      if (row.size() != c_) throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
      for (const auto& x : row) a_.push_back(x);
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = F(1);
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<F>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < m.r_; ++i) {
      if (rows[i].size() != m.c_) throw Error(ErrorKind::DimensionMismatch, "ragged matrix");
      for (std::size_t j = 0; j < m.c_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  F& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const F& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  std::vector<F> column(std::size_t j) const {
    std::vector<F> v(r_);
    for (std::size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Matrix transpose() const {
    Matrix m(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  Matrix block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
    return m;
  }

  void set_block(std::size_t i0, std::size_t j0, const Matrix& b) {
    for (std::size_t i = 0; i < b.r_; ++i)
      for (std::size_t j = 0; j < b.c_; ++j) (*this)(i0 + i, j0 + j) = b(i, j);
  }

  static Matrix blocks(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
    Matrix m(a.r_ + c.r_, a.c_ + b.c_);
    m.set_block(0, 0, a);
    m.set_block(0, a.c_, b);
    m.set_block(a.r_, 0, c);
    m.set_block(a.r_, a.c_, d);
    return m;
  }

  bool is_zero_matrix() const {
    for (const auto& x : a_)
      if (!is_zero(x)) return false;
    return true;
  }

  std::vector<F> apply(const std::vector<F>& v) const {
    if (v.size() != c_) throw Error(ErrorKind::DimensionMismatch, "matrix-vector shapes");
    std::vector<F> out(r_, F(0));
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.c_ != b.r_) throw Error(ErrorKind::DimensionMismatch, "matrix product shapes");
    Matrix m(a.r_, b.c_);
    for (std::size_t i = 0; i < a.r_; ++i)
      for (std::size_t k = 0; k < a.c_; ++k) {
        if (is_zero(a(i, k))) continue;
        for (std::size_t j = 0; j < b.c_; ++j) m(i, j) += a(i, k) * b(k, j);
      }
    return m;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) {
    if (a.r_ != b.r_ || a.c_ != b.c_) throw Error(ErrorKind::DimensionMismatch, "matrix sum shapes");
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] += b.a_[k];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    if (a.r_ != b.r_ || a.c_ != b.c_) throw Error(ErrorKind::DimensionMismatch, "matrix difference shapes");
    for (std::size_t k = 0; k < a.a_.size(); ++k) a.a_[k] -= b.a_[k];
    return a;
  }
  Matrix operator-() const {
    Matrix m = *this;
    for (auto& x : m.a_) x = -x;
    return m;
  }
  friend Matrix operator*(const F& s, Matrix a) {
    for (auto& x : a.a_) x *= s;
    return a;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  SparseMatrix<F> to_sparse() const {
    std::vector<std::vector<F>> rows(r_, std::vector<F>(c_));
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) rows[i][j] = (*this)(i, j);
    return SparseMatrix<F>::from_dense(rows);
  }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<F> a_;
};

// Gauss-Jordan inverse; returns false when singular.
template <class F>
bool try_inverse(const Matrix<F>& m, Matrix<F>& out) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "inverse of non-square matrix");
  std::size_t n = m.rows();
  Matrix<F> a = m, inv = Matrix<F>::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && is_zero(a(p, c))) ++p;
    if (p == n) return false;
    if (p != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(p, j), a(c, j));
        std::swap(inv(p, j), inv(c, j));
      }
    F s = F(1) / a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) *= s;
      inv(c, j) *= s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || is_zero(a(i, c))) continue;
      F f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  out = inv;
  return true;
}

template <class F>
Matrix<F> inverse(const Matrix<F>& m) {
  Matrix<F> out;
  if (!try_inverse(m, out)) throw Error(ErrorKind::DimensionMismatch, "singular matrix");
  return out;
}

template <class F>
F determinant(Matrix<F> a) {
  std::size_t n = a.rows();
  F det = F(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && is_zero(a(p, c))) ++p;
    if (p == n) return F(0);
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (is_zero(a(i, c))) continue;
      F f = a(i, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return det;
}

// Positive definiteness of a symmetric matrix by leading principal minors.
inline bool leading_minors_positive(const Matrix<Rational>& s) {
  for (std::size_t k = 1; k <= s.rows(); ++k)
    if (sgn(determinant(s.block(0, 0, k, k))) <= 0) return false;
  return true;
}

template <class F>
bool is_symmetric(const Matrix<F>& m) {
  return m == m.transpose();
}

template <class F>
Matrix<F> columns_to_matrix(const std::vector<std::vector<F>>& cols, std::size_t rows) {
  Matrix<F> m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j].at(i);
  return m;
}

}  // namespace twistcart
