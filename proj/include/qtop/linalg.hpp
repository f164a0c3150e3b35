#pragma once

// Dense exact linear algebra over the cyclotomic field: products, Kronecker
// products, Gaussian elimination (rank / kernel / inverse / determinant) and
// linear solving. Everything is exact; pivoting is by first nonzero entry so
// results are deterministic.

#include <cassert>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qtop/scalar.hpp"

namespace qtop {

class Matrix {
 public:
  Matrix() = default;
  Matrix(FieldPtr ctx, std::size_t rows, std::size_t cols)
      : ctx_(std::move(ctx)), rows_(rows), cols_(cols),
        data_(rows * cols, ctx_->zero()) {}

  static Matrix identity(const FieldPtr& ctx, std::size_t n) {
    Matrix m(ctx, n, n);
    for (std::size_t k = 0; k < n; ++k) m.at(k, k) = ctx->one();
    return m;
  }

  const FieldPtr& ctx() const { return ctx_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  CycScalar& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const CycScalar& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  Matrix operator+(const Matrix& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Matrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] += o.data_[k];
    return out;
  }
  Matrix operator-(const Matrix& o) const {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    Matrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] -= o.data_[k];
    return out;
  }
  Matrix operator*(const Matrix& o) const {
    assert(cols_ == o.rows_);
    Matrix out(ctx_, rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const CycScalar& a = at(i, k);
        if (a.is_zero()) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) {
          const CycScalar& b = o.at(k, j);
          if (!b.is_zero()) out.at(i, j) += a * b;
        }
      }
    return out;
  }
  Matrix scaled(const CycScalar& s) const {
    Matrix out = *this;
    for (auto& x : out.data_) x *= s;
    return out;
  }

  Matrix transpose() const {
    Matrix out(ctx_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
    return out;
  }

  /// Kronecker product, row-major: (A (x) B)[(i,k),(j,l)] = A[i,j] B[k,l].
  Matrix kron(const Matrix& o) const {
    Matrix out(ctx_, rows_ * o.rows_, cols_ * o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        const CycScalar& a = at(i, j);
        if (a.is_zero()) continue;
        for (std::size_t k = 0; k < o.rows_; ++k)
          for (std::size_t l = 0; l < o.cols_; ++l) {
            const CycScalar& b = o.at(k, l);
            if (!b.is_zero()) out.at(i * o.rows_ + k, j * o.cols_ + l) = a * b;
          }
      }
    return out;
  }

  CycScalar trace() const {
    assert(rows_ == cols_);
    CycScalar t = ctx_->zero();
    for (std::size_t k = 0; k < rows_; ++k) t += at(k, k);
    return t;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!x.is_zero()) return false;
    return true;
  }

  /// Row echelon form in place; returns pivot column indices.
  std::vector<std::size_t> echelonize() {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
      std::size_t p = row;
      while (p < rows_ && at(p, col).is_zero()) ++p;
      if (p == rows_) continue;
      if (p != row)
        for (std::size_t j = 0; j < cols_; ++j) std::swap(at(p, j), at(row, j));
      CycScalar inv = at(row, col).inverse();
      for (std::size_t j = col; j < cols_; ++j) at(row, j) *= inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == row || at(i, col).is_zero()) continue;
        CycScalar f = at(i, col);
        for (std::size_t j = col; j < cols_; ++j) at(i, j) -= f * at(row, j);
      }
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

  std::size_t rank() const {
    Matrix tmp = *this;
    return tmp.echelonize().size();
  }

  /// Basis of the right kernel, one column vector per basis element.
  std::vector<std::vector<CycScalar>> kernel() const {
    Matrix tmp = *this;
    auto pivots = tmp.echelonize();
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<std::vector<CycScalar>> basis;
    for (std::size_t free = 0; free < cols_; ++free) {
      if (is_pivot[free]) continue;
      std::vector<CycScalar> v(cols_, ctx_->zero());
      v[free] = ctx_->one();
      for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -tmp.at(k, free);
      basis.push_back(std::move(v));
    }
    return basis;
  }

  CycScalar determinant() const {
    assert(rows_ == cols_);
    Matrix tmp = *this;
    CycScalar det = ctx_->one();
    for (std::size_t col = 0; col < cols_; ++col) {
      std::size_t p = col;
      while (p < rows_ && tmp.at(p, col).is_zero()) ++p;
      if (p == rows_) return ctx_->zero();
      if (p != col) {
        for (std::size_t j = 0; j < cols_; ++j) std::swap(tmp.at(p, j), tmp.at(col, j));
        det = -det;
      }
      det *= tmp.at(col, col);
      CycScalar inv = tmp.at(col, col).inverse();
      for (std::size_t i = col + 1; i < rows_; ++i) {
        if (tmp.at(i, col).is_zero()) continue;
        CycScalar f = tmp.at(i, col) * inv;
        for (std::size_t j = col; j < cols_; ++j) tmp.at(i, j) -= f * tmp.at(col, j);
      }
    }
    return det;
  }

  Matrix inverse() const {
    assert(rows_ == cols_);
    Matrix aug(ctx_, rows_, 2 * cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
      aug.at(i, cols_ + i) = ctx_->one();
    }
    auto pivots = aug.echelonize();
    if (pivots.size() != rows_) throw std::domain_error("Matrix::inverse: singular");
    Matrix out(ctx_, rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out.at(i, j) = aug.at(i, cols_ + j);
    return out;
  }

 private:
  FieldPtr ctx_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<CycScalar> data_;
};

/// Signature (p - n) of a symmetric integer matrix by exact symmetric
/// reduction over the rationals, handling zero-diagonal hyperbolic pairs.
inline int integer_signature(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  int sig = 0;
  std::vector<bool> done(n, false);
  for (;;) {
    // prefer a nonzero diagonal pivot
    std::size_t piv = n;
    for (std::size_t k = 0; k < n; ++k)
      if (!done[k] && m[k][k] != 0) { piv = k; break; }
    if (piv < n) {
      sig += m[piv][piv] > 0 ? 1 : -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (done[i] || i == piv || m[i][piv] == 0) continue;
        Rational f = m[i][piv] / m[piv][piv];
        for (std::size_t j = 0; j < n; ++j) m[i][j] -= f * m[piv][j];
        for (std::size_t j = 0; j < n; ++j) m[j][i] -= f * m[j][piv];
      }
      done[piv] = true;
      continue;
    }
    // all remaining diagonal entries vanish: find an off-diagonal pair
    std::size_t a = n, b = n;
    for (std::size_t i = 0; i < n && a == n; ++i) {
      if (done[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j)
        if (!done[j] && m[i][j] != 0) { a = i; b = j; break; }
    }
    if (a == n) break;  // remaining block is zero
    // x_a += x_b turns the hyperbolic pair into a +/- pair of diagonal pivots
    for (std::size_t j = 0; j < n; ++j) m[a][j] += m[b][j];
    for (std::size_t j = 0; j < n; ++j) m[j][a] += m[j][b];
    // contributes one positive and one negative eigenvalue; eliminate both
    // by falling through to diagonal pivoting on the updated matrix.
  }
  return sig;
}

}  // namespace qtop
