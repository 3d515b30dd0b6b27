#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "hypcert/polycore/polynomial.hpp"

namespace hypcert {

/// Power series c_0 + c_1 t + ... + c_K t^K, known to be correct through
/// order K. Binary operations keep the smaller order of their operands;
/// differentiation lowers it by one.
template <CoefficientField F>
class TruncatedSeries {
 public:
  TruncatedSeries() = default;
  TruncatedSeries(std::string var, int order) : var_(std::move(var)), order_(order), c_(order + 1, F(0L)) {
    if (order < 0) throw Error("series truncation order must be nonnegative");
  }
  TruncatedSeries(std::string var, int order, std::vector<F> coeffs) : TruncatedSeries(std::move(var), order) {
    for (std::size_t i = 0; i < coeffs.size() && static_cast<int>(i) <= order; ++i) c_[i] = coeffs[i];
  }

  static TruncatedSeries constant(const F& c, std::string var, int order) {
    TruncatedSeries s(std::move(var), order);
    s.c_[0] = c;
    return s;
  }
  /// The series of the variable itself.
  static TruncatedSeries identity(std::string var, int order) {
    TruncatedSeries s(std::move(var), order);
    if (order >= 1) s.c_[1] = F(1L);
    return s;
  }
  static TruncatedSeries from_polynomial(const Polynomial<F>& p, std::string var, int order) {
    std::string pv = p.univariate_var();
    if (!pv.empty() && pv != var) throw Error("polynomial variable " + pv + " does not match series variable " + var);
    TruncatedSeries s(var, order);
    auto d = pv.empty() ? std::vector<F>{p.constant_term()} : p.dense(pv);
    for (std::size_t i = 0; i < d.size() && static_cast<int>(i) <= order; ++i) s.c_[i] = d[i];
    return s;
  }

  const std::string& var() const { return var_; }
  int order() const { return order_; }
  const std::vector<F>& coeffs() const { return c_; }
  const F& operator[](int i) const { return c_.at(i); }
  F& operator[](int i) { return c_.at(i); }

  /// Index of the first nonzero coefficient, or -1 if zero through order.
  int valuation() const {
    for (int i = 0; i <= order_; ++i)
      if (!is_zero(c_[i])) return i;
    return -1;
  }
  bool is_zero_through_order() const { return valuation() < 0; }

  TruncatedSeries truncated(int order) const {
    if (order > order_) throw Error("cannot raise truncation order of a series");
    return TruncatedSeries(var_, order, c_);
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    int k = std::min(a.order_, b.order_);
    TruncatedSeries out(a.var_, k);
    for (int i = 0; i <= k; ++i) out.c_[i] = a.c_[i] + b.c_[i];
    return out;
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a) {
    TruncatedSeries out(a.var_, a.order_);
    for (int i = 0; i <= a.order_; ++i) out.c_[i] = -a.c_[i];
    return out;
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return a + (-b); }
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    int k = std::min(a.order_, b.order_);
    TruncatedSeries out(a.var_, k);
    for (int i = 0; i <= k; ++i) {
      if (is_zero(a.c_[i])) continue;
      for (int j = 0; i + j <= k; ++j) {
        if (is_zero(b.c_[j])) continue;
        out.c_[i + j] = out.c_[i + j] + a.c_[i] * b.c_[j];
      }
    }
    return out;
  }
  friend TruncatedSeries operator*(const F& s, const TruncatedSeries& a) {
    TruncatedSeries out(a.var_, a.order_);
    for (int i = 0; i <= a.order_; ++i) out.c_[i] = s * a.c_[i];
    return out;
  }
  TruncatedSeries& operator+=(const TruncatedSeries& o) { return *this = *this + o; }
  TruncatedSeries& operator-=(const TruncatedSeries& o) { return *this = *this - o; }
  TruncatedSeries& operator*=(const TruncatedSeries& o) { return *this = *this * o; }

  TruncatedSeries pow(unsigned e) const {
    TruncatedSeries result = constant(F(1L), var_, order_), base = *this;
    while (e > 0) {
      if (e & 1U) result *= base;
      e >>= 1U;
      if (e > 0) base *= base;
    }
    return result;
  }

  /// d/dt; the result is correct through order K-1.
  TruncatedSeries derivative() const {
    if (order_ == 0) throw Error("derivative of an order-0 series has no valid coefficients");
    TruncatedSeries out(var_, order_ - 1);
    for (int i = 1; i <= order_; ++i) out.c_[i - 1] = F(static_cast<long>(i)) * c_[i];
    return out;
  }

  TruncatedSeries derivative(int times) const {
    TruncatedSeries out = *this;
    for (int i = 0; i < times; ++i) out = out.derivative();
    return out;
  }

  /// 1/s; needs a certainly-nonzero constant term.
  TruncatedSeries reciprocal() const {
    if (!certainly_nonzero(c_[0]))
      throw Error("reciprocal of a series with zero constant term (pole; factor it out first)");
    TruncatedSeries out(var_, order_);
    F inv0 = field_inverse(c_[0]);
    out.c_[0] = inv0;
    for (int n = 1; n <= order_; ++n) {
      F acc(0L);
      for (int k = 1; k <= n; ++k) {
        if (is_zero(c_[k])) continue;
        acc = acc + c_[k] * out.c_[n - k];
      }
      out.c_[n] = -(inv0 * acc);
    }
    return out;
  }

  /// s(t(x)); needs t(0) = 0. Result order is min(K_s, K_t).
  TruncatedSeries compose(const TruncatedSeries& t) const {
    if (!is_zero(t.c_[0])) throw Error("composition needs an inner series with zero constant term");
    int k = std::min(order_, t.order_);
    TruncatedSeries inner = t.truncated(k);
    TruncatedSeries out = constant(c_[std::min(order_, k)], t.var_, k);
    for (int i = std::min(order_, k) - 1; i >= 0; --i) out = out * inner + constant(c_[i], t.var_, k);
    return out;
  }

  template <class T, class Convert>
  T evaluate(const T& x, Convert&& convert) const {
    T acc = convert(c_[order_]);
    for (int i = order_ - 1; i >= 0; --i) acc = acc * x + convert(c_[i]);
    return acc;
  }

  Polynomial<F> to_polynomial() const {
    return Polynomial<F>::from_dense(var_, c_);
  }

  std::string to_string() const {
    std::string s = to_polynomial().to_string();
    return s + " + O(" + var_ + "^" + std::to_string(order_ + 1) + ")";
  }

 private:
  std::string var_ = "t";
  int order_ = 0;
  std::vector<F> c_ = std::vector<F>(1, F(0L));
};

/// Series of exp(a*t).
template <CoefficientField F>
TruncatedSeries<F> exp_series(const F& a, const std::string& var, int order) {
  TruncatedSeries<F> s(var, order);
  F term(1L);
  for (int i = 0; i <= order; ++i) {
    s[i] = term;
    term = term * a * field_inverse(F(static_cast<long>(i + 1)));
  }
  return s;
}

/// Series of sin(t).
template <CoefficientField F>
TruncatedSeries<F> sin_series(const std::string& var, int order) {
  TruncatedSeries<F> s(var, order);
  F term(1L);
  for (int i = 1; i <= order; ++i) {
    term = term * field_inverse(F(static_cast<long>(i)));
    if (i % 2 == 1) s[i] = (i % 4 == 1) ? term : F(-term);
  }
  return s;
}

using RationalSeries = TruncatedSeries<Rational>;

}  // namespace hypcert
