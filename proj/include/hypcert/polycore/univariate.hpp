#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypcert/polycore/linalg.hpp"
#include "hypcert/polycore/polynomial.hpp"

namespace hypcert {

enum class Certainty { Yes, No, Unknown };

inline const char* to_text(Certainty c) {
  switch (c) {
    case Certainty::Yes: return "yes";
    case Certainty::No: return "no";
    case Certainty::Unknown: return "unknown";
  }
  return "unknown";
}

namespace dense {

template <class F>
void trim(std::vector<F>& a) {
  while (!a.empty() && is_zero(a.back())) a.pop_back();
}

template <class F>
int degree(const std::vector<F>& a) {
  return static_cast<int>(a.size()) - 1;
}

/// Quotient and remainder over an exact field.
template <class F>
std::pair<std::vector<F>, std::vector<F>> divmod(std::vector<F> a, std::vector<F> b) {
  trim(a);
  trim(b);
  if (b.empty()) throw Error("polynomial division by zero");
  if (a.size() < b.size()) return {{}, a};
  std::vector<F> q(a.size() - b.size() + 1, F(0L));
  F inv = field_inverse(b.back());
  while (a.size() >= b.size()) {
    std::size_t shift = a.size() - b.size();
    F f = a.back() * inv;
    q[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = a[shift + i] - f * b[i];
    a.pop_back();
    trim(a);
  }
  trim(q);
  return {q, a};
}

template <class F>
std::vector<F> monic(std::vector<F> a) {
  trim(a);
  if (a.empty()) return a;
  F inv = field_inverse(a.back());
  for (auto& c : a) c = c * inv;
  return a;
}

template <class F>
std::vector<F> gcd(std::vector<F> a, std::vector<F> b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

template <class F>
std::vector<F> derivative(const std::vector<F>& a) {
  std::vector<F> d;
  for (std::size_t i = 1; i < a.size(); ++i) d.push_back(F(static_cast<long>(i)) * a[i]);
  trim(d);
  return d;
}

template <class F>
std::vector<F> mul(const std::vector<F>& a, const std::vector<F>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<F> out(a.size() + b.size() - 1, F(0L));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
  trim(out);
  return out;
}

/// Sylvester matrix of a (degree m) and b (degree n), size (m+n)x(m+n).
template <class F>
Matrix<F> sylvester(const std::vector<F>& a, const std::vector<F>& b) {
  const int m = degree(a), n = degree(b);
  if (m < 0 || n < 0) throw Error("sylvester matrix of a zero polynomial");
  const int size = m + n;
  Matrix<F> s(size, std::vector<F>(size, F(0L)));
  for (int r = 0; r < n; ++r)
    for (int i = 0; i <= m; ++i) s[r][r + i] = a[m - i];
  for (int r = 0; r < m; ++r)
    for (int i = 0; i <= n; ++i) s[n + r][r + i] = b[n - i];
  return s;
}

}  // namespace dense

namespace detail {

template <class F>
std::pair<std::string, std::vector<F>> univariate_dense(const Polynomial<F>& p, const char* what) {
  auto support = p.support_vars();
  if (support.size() > 1) throw Error(std::string(what) + ": multivariate input " + p.to_string());
  std::string var = support.empty() ? (p.vars().empty() ? std::string("x") : p.vars()[0]) : support[0];
  auto d = p.is_zero() ? std::vector<F>{} : p.dense(var);
  dense::trim(d);
  return {var, d};
}

}  // namespace detail

/// Monic gcd of two univariate polynomials over an exact field.
template <CoefficientField F>
  requires FieldInfo<F>::exact
Polynomial<F> univariate_gcd(const Polynomial<F>& a, const Polynomial<F>& b) {
  auto [va, da] = detail::univariate_dense(a, "univariate_gcd");
  auto [vb, db] = detail::univariate_dense(b, "univariate_gcd");
  if (!a.support_vars().empty() && !b.support_vars().empty() && va != vb)
    throw Error("univariate_gcd: inputs in different variables " + va + ", " + vb);
  std::string var = a.support_vars().empty() ? vb : va;
  return Polynomial<F>::from_dense(var, dense::gcd(da, db));
}

/// Resultant via the Sylvester determinant. Exact fields always return a
/// value; on the ball track nullopt means elimination could not find a
/// pivot excluding zero.
template <CoefficientField F>
std::optional<F> resultant(const Polynomial<F>& a, const Polynomial<F>& b) {
  auto [va, da] = detail::univariate_dense(a, "resultant");
  auto [vb, db] = detail::univariate_dense(b, "resultant");
  if (da.empty() || db.empty()) return F(0L);
  if (da.size() == 1 && db.size() == 1) return F(1L);
  return determinant(dense::sylvester(da, db));
}

/// Squarefreeness of a univariate polynomial of degree >= 1.
/// Exact fields: Yes iff gcd(p, p') is constant, otherwise No.
/// Balls: Yes iff the resultant ball of (p, p') excludes 0, otherwise
/// Unknown; the ball track never answers No.
template <CoefficientField F>
Certainty is_squarefree_certified(const Polynomial<F>& p) {
  auto [var, d] = detail::univariate_dense(p, "is_squarefree_certified");
  if (dense::degree(d) < 1) throw Error("is_squarefree_certified needs degree >= 1");
  if constexpr (FieldInfo<F>::exact) {
    return dense::degree(dense::gcd(d, dense::derivative(d))) == 0 ? Certainty::Yes : Certainty::No;
  } else {
    if (dense::degree(d) == 1) return d.back().excludes_zero() ? Certainty::Yes : Certainty::Unknown;
    auto res = determinant(dense::sylvester(d, dense::derivative(d)));
    if (res && res->excludes_zero()) return Certainty::Yes;
    return Certainty::Unknown;
  }
}

/// Yun's squarefree decomposition over an exact field: p = c * prod f_i^i,
/// returned as (f_i, i) with f_i monic, squarefree, pairwise coprime.
template <CoefficientField F>
  requires FieldInfo<F>::exact
std::vector<std::pair<std::vector<F>, int>> squarefree_decomposition(std::vector<F> p) {
  dense::trim(p);
  std::vector<std::pair<std::vector<F>, int>> out;
  if (dense::degree(p) < 1) return out;
  auto dp = dense::derivative(p);
  auto a = dense::gcd(p, dp);
  auto b = dense::divmod(p, a).first;
  auto c = dense::divmod(dp, a).first;
  auto db = dense::derivative(b);
  // d = c - b'
  std::vector<F> d(std::max(c.size(), db.size()), F(0L));
  for (std::size_t i = 0; i < c.size(); ++i) d[i] = d[i] + c[i];
  for (std::size_t i = 0; i < db.size(); ++i) d[i] = d[i] - db[i];
  dense::trim(d);
  int i = 1;
  while (dense::degree(b) >= 1) {
    auto f = dense::gcd(b, d);
    if (dense::degree(f) >= 1) out.emplace_back(f, i);
    b = dense::divmod(b, f).first;
    c = dense::divmod(d, f).first;
    db = dense::derivative(b);
    d.assign(std::max(c.size(), db.size()), F(0L));
    for (std::size_t k = 0; k < c.size(); ++k) d[k] = d[k] + c[k];
    for (std::size_t k = 0; k < db.size(); ++k) d[k] = d[k] - db[k];
    dense::trim(d);
    ++i;
  }
  return out;
}

}  // namespace hypcert
