#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypcert/polycore/field.hpp"

namespace hypcert {

template <class T>
using Matrix = std::vector<std::vector<T>>;

/// Determinant by Gaussian elimination. On the ball track a pivot must
/// exclude zero; if a column has no such entry but is not exactly zero the
/// result is unknown (nullopt).
template <CoefficientField F>
std::optional<F> determinant(Matrix<F> m) {
  const std::size_t n = m.size();
  F det(1L);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    if constexpr (FieldInfo<F>::exact) {
      for (std::size_t r = col; r < n; ++r) {
        if (!is_zero(m[r][col])) {
          pivot = r;
          break;
        }
      }
      if (pivot == n) return F(0L);
    } else {
      double best = 0.0;
      bool all_zero = true;
      for (std::size_t r = col; r < n; ++r) {
        if (!is_zero(m[r][col])) all_zero = false;
        if (!m[r][col].excludes_zero()) continue;
        double lo = m[r][col].mag_lower_d();
        if (pivot == n || lo > best) {
          pivot = r;
          best = lo;
        }
      }
      if (all_zero) return F(0L);
      if (pivot == n) return std::nullopt;
    }
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det = det * m[col][col];
    F inv = field_inverse(m[col][col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (is_zero(m[r][col])) continue;
      F factor = m[r][col] * inv;
      for (std::size_t c = col + 1; c < n; ++c) {
        if (is_zero(m[col][c])) continue;
        m[r][c] = m[r][c] - factor * m[col][c];
      }
      m[r][col] = F(0L);
    }
  }
  return det;
}

/// Determinant over a commutative ring (series, jet differentials) by
/// cofactor expansion memoized on column subsets; fine for n up to ~12.
template <class R>
R ring_determinant(const Matrix<R>& m, const R& zero) {
  const std::size_t n = m.size();
  if (n == 0) throw Error("determinant of an empty matrix");
  if (n > 20) throw Error("ring_determinant limited to 20x20");
  // minor(mask) = det of rows [n - popcount(mask), n) against the columns in mask
  std::unordered_map<std::uint32_t, R> memo;
  auto popcount = [](std::uint32_t x) { return static_cast<std::size_t>(__builtin_popcount(x)); };
  std::function<R(std::uint32_t)> minor = [&](std::uint32_t mask) -> R {
    std::size_t k = popcount(mask);
    if (k == 1) {
      for (std::size_t c = 0; c < n; ++c)
        if (mask & (1U << c)) return m[n - 1][c];
    }
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    std::size_t row = n - k;
    R acc = zero;
    int sign = 1;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(mask & (1U << c))) continue;
      R term = m[row][c] * minor(mask & ~(1U << c));
      acc = sign > 0 ? acc + term : acc - term;
      sign = -sign;
    }
    memo.emplace(mask, acc);
    return acc;
  };
  return minor((1U << n) - 1U);
}

/// Reduced row echelon form over an exact field; returns pivot columns.
template <CoefficientField F>
  requires FieldInfo<F>::exact
std::vector<std::size_t> rref_in_place(Matrix<F>& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && is_zero(m[p][c])) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    F inv = field_inverse(m[r][c]);
    for (std::size_t j = c; j < cols; ++j) m[r][j] = m[r][j] * inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || is_zero(m[i][c])) continue;
      F f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <CoefficientField F>
  requires FieldInfo<F>::exact
std::size_t rank(Matrix<F> m) {
  return rref_in_place(m).size();
}

/// Basis of the right kernel {v : m v = 0}; `cols` is needed when m has no rows.
template <CoefficientField F>
  requires FieldInfo<F>::exact
Matrix<F> kernel_basis(Matrix<F> m, std::size_t cols) {
  if (!m.empty() && m[0].size() != cols) throw Error("kernel_basis: column count mismatch");
  auto pivots = rref_in_place(m);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  Matrix<F> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<F> v(cols, F(0L));
    v[free] = F(1L);
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

template <CoefficientField F>
Matrix<F> matmul(const Matrix<F>& a, const Matrix<F>& b) {
  if (a.empty()) return {};
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  if (a[0].size() != k) throw Error("matmul: inner dimension mismatch");
  Matrix<F> out(n, std::vector<F>(m, F(0L)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t t = 0; t < k; ++t) out[i][j] = out[i][j] + a[i][t] * b[t][j];
  return out;
}

template <class F>
Matrix<F> transpose(const Matrix<F>& a) {
  if (a.empty()) return {};
  Matrix<F> t(a[0].size(), std::vector<F>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

}  // namespace hypcert
