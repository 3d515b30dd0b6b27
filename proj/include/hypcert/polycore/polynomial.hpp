#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hypcert/polycore/field.hpp"

namespace hypcert {

using Exponents = std::vector<int>;

/// Variable names sort by alphabetic prefix, then numeric suffix, so that
/// x2 < x10 and the declared order x0, x1, ... is preserved.
inline bool var_name_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    std::size_t i = s.size();
    while (i > 0 && s[i - 1] >= '0' && s[i - 1] <= '9') --i;
    long idx = i < s.size() ? std::stol(s.substr(i)) : -1;
    return std::pair<std::string, long>(s.substr(0, i), idx);
  };
  auto pa = split(a), pb = split(b);
  if (pa != pb) return pa < pb;
  return a < b;
}

inline int exponent_sum(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

/// Graded lexicographic order, largest first.
struct GrlexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const {
    int da = exponent_sum(a), db = exponent_sum(b);
    if (da != db) return da > db;
    return a > b;
  }
};

template <CoefficientField F>
class Polynomial {
 public:
  using Field = F;
  using Terms = std::map<Exponents, F, GrlexGreater>;

  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars) : vars_(normalize_vars(std::move(vars))) {}

  static Polynomial constant(const F& c, std::vector<std::string> vars = {}) {
    Polynomial p(std::move(vars));
    p.add_term(Exponents(p.vars_.size(), 0), c);
    return p;
  }
  static Polynomial variable(const std::string& name) {
    Polynomial p({name});
    p.add_term({1}, F(1L));
    return p;
  }
  /// Dense univariate constructor, coefficient i multiplies name^i.
  static Polynomial from_dense(const std::string& name, const std::vector<F>& coeffs) {
    Polynomial p({name});
    for (std::size_t i = 0; i < coeffs.size(); ++i) p.add_term({static_cast<int>(i)}, coeffs[i]);
    return p;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && exponent_sum(terms_.begin()->first) == 0);
  }
  F constant_term() const {
    auto it = terms_.find(Exponents(vars_.size(), 0));
    return it == terms_.end() ? F(0L) : it->second;
  }

  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, exponent_sum(e));
    return d;
  }

  int var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
  }

  int degree_in(const std::string& name) const {
    int i = var_index(name);
    if (i < 0) return terms_.empty() ? -1 : 0;
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
    return d;
  }

  /// Variables that actually occur with positive exponent.
  std::vector<std::string> support_vars() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      for (const auto& [e, c] : terms_) {
        if (e[i] > 0) {
          out.push_back(vars_[i]);
          break;
        }
      }
    }
    return out;
  }

  void add_term(const Exponents& e, const F& c) {
    if (e.size() != vars_.size()) throw Error("exponent vector length does not match variable list");
    if (hypcert::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second = it->second + c;
      if (hypcert::is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Re-embed into a larger variable list (must contain all current vars).
  Polynomial with_vars(const std::vector<std::string>& target) const {
    Polynomial out(target);
    std::vector<int> pos(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      pos[i] = out.var_index(vars_[i]);
      if (pos[i] < 0) throw Error("variable '" + vars_[i] + "' missing from target list");
    }
    for (const auto& [e, c] : terms_) {
      Exponents f(out.vars_.size(), 0);
      for (std::size_t i = 0; i < e.size(); ++i) f[pos[i]] = e[i];
      out.terms_.emplace(std::move(f), c);
    }
    return out;
  }

  /// Drop variables that do not occur.
  Polynomial compact() const { return with_vars_subset(support_vars()); }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    auto vars = merged_vars(a, b);
    Polynomial out = a.with_vars(vars);
    Polynomial bb = b.with_vars(vars);
    for (const auto& [e, c] : bb.terms_) out.add_term(e, c);
    return out;
  }
  friend Polynomial operator-(const Polynomial& a) {
    Polynomial out(a.vars_);
    for (const auto& [e, c] : a.terms_) out.terms_.emplace(e, -c);
    return out;
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    auto vars = merged_vars(a, b);
    Polynomial aa = a.with_vars(vars), bb = b.with_vars(vars);
    Polynomial out(vars);
    Exponents e(vars.size());
    for (const auto& [ea, ca] : aa.terms_) {
      for (const auto& [eb, cb] : bb.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }
  friend Polynomial operator*(const F& s, const Polynomial& a) {
    Polynomial out(a.vars_);
    if (hypcert::is_zero(s)) return out;
    for (const auto& [e, c] : a.terms_) out.add_term(e, s * c);
    return out;
  }
  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  Polynomial pow(unsigned e) const {
    Polynomial result = constant(F(1L), vars_), base = *this;
    while (e > 0) {
      if (e & 1U) result *= base;
      e >>= 1U;
      if (e > 0) base *= base;
    }
    return result;
  }

  Polynomial derivative(const std::string& name) const {
    Polynomial out(vars_);
    int i = var_index(name);
    if (i < 0) return out;
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exponents f = e;
      f[i] -= 1;
      out.add_term(f, F(static_cast<long>(e[i])) * c);
    }
    return out;
  }

  /// Replace each named variable by a polynomial; other variables stay.
  Polynomial substitute(const std::map<std::string, Polynomial>& subst) const {
    std::vector<std::string> keep;
    for (const auto& v : vars_)
      if (!subst.count(v)) keep.push_back(v);
    Polynomial out(keep);
    std::map<std::pair<int, int>, Polynomial> power_cache;
    auto power = [&](int var, int k) -> const Polynomial& {
      auto key = std::make_pair(var, k);
      auto it = power_cache.find(key);
      if (it != power_cache.end()) return it->second;
      return power_cache.emplace(key, subst.at(vars_[var]).pow(static_cast<unsigned>(k))).first->second;
    };
    for (const auto& [e, c] : terms_) {
      Exponents ke;
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (!subst.count(vars_[i])) ke.push_back(e[i]);
      Polynomial term(keep);
      term.add_term(ke, c);
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (e[i] > 0 && subst.count(vars_[i])) term *= power(static_cast<int>(i), e[i]);
      }
      out += term;
    }
    return out;
  }

  /// Coefficient of name^k, as a polynomial in the remaining variables.
  Polynomial coefficient_of(const std::string& name, int k) const {
    int i = var_index(name);
    std::vector<std::string> rest;
    for (const auto& v : vars_)
      if (v != name) rest.push_back(v);
    Polynomial out(rest);
    for (const auto& [e, c] : terms_) {
      int ei = i < 0 ? 0 : e[i];
      if (ei != k) continue;
      Exponents f;
      for (std::size_t j = 0; j < e.size(); ++j)
        if (static_cast<int>(j) != i) f.push_back(e[j]);
      out.add_term(f, c);
    }
    return out;
  }

  bool is_univariate_in(const std::string& name) const {
    for (const auto& v : support_vars())
      if (v != name) return false;
    return true;
  }

  /// The single variable a univariate polynomial lives in ("" for constants).
  std::string univariate_var() const {
    auto s = support_vars();
    if (s.size() > 1) throw Error("polynomial is multivariate: " + to_string());
    return s.empty() ? std::string() : s[0];
  }

  /// Dense coefficients in `name`; requires univariate.
  std::vector<F> dense(const std::string& name) const {
    if (!is_univariate_in(name)) throw Error("polynomial is not univariate in " + name);
    int d = degree_in(name);
    std::vector<F> out(d < 0 ? 0 : d + 1, F(0L));
    int i = var_index(name);
    for (const auto& [e, c] : terms_) out[i < 0 ? 0 : e[i]] = c;
    return out;
  }

  template <class G, class Fn>
  Polynomial<G> map_coefficients(Fn&& fn) const {
    Polynomial<G> out(vars_);
    for (const auto& [e, c] : terms_) out.add_term(e, fn(c));
    return out;
  }

  /// Evaluate with values for every variable (by name) in any ring T that
  /// accepts `convert(F)`.
  template <class T, class Convert>
  T evaluate(const std::map<std::string, T>& values, Convert&& convert) const {
    std::vector<const T*> vals(vars_.size(), nullptr);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      auto it = values.find(vars_[i]);
      if (it != values.end()) vals[i] = &it->second;
    }
    T sum = T(0);
    for (const auto& [e, c] : terms_) {
      T term = convert(c);
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!vals[i]) throw Error("no value for variable '" + vars_[i] + "'");
        for (int k = 0; k < e[i]; ++k) term = term * *vals[i];
      }
      sum = sum + term;
    }
    return sum;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b)
    requires FieldInfo<F>::exact
  {
    auto vars = merged_vars(a, b);
    return a.with_vars(vars).terms_ == b.with_vars(vars).terms_;
  }

  std::string to_string() const;

 private:
  static std::vector<std::string> normalize_vars(std::vector<std::string> v) {
    std::sort(v.begin(), v.end(), var_name_less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }
  static std::vector<std::string> merged_vars(const Polynomial& a, const Polynomial& b) {
    if (a.vars_ == b.vars_) return a.vars_;
    std::vector<std::string> v = a.vars_;
    v.insert(v.end(), b.vars_.begin(), b.vars_.end());
    return normalize_vars(std::move(v));
  }
  Polynomial with_vars_subset(const std::vector<std::string>& target) const {
    Polynomial out(target);
    std::vector<int> pos;
    for (const auto& v : out.vars_) pos.push_back(var_index(v));
    for (const auto& [e, c] : terms_) {
      Exponents f;
      for (int p : pos) f.push_back(e[p]);
      out.terms_.emplace(std::move(f), c);
    }
    return out;
  }

  std::vector<std::string> vars_;
  Terms terms_;
};

using RationalPoly = Polynomial<Rational>;
using BallPoly = Polynomial<ComplexBall>;
using GaussianPoly = Polynomial<GaussianRational>;

namespace detail {

inline bool coefficient_is_negative(const Rational& q) { return sgn(q) < 0; }
inline bool coefficient_is_negative(const GaussianRational& z) { return sgn(z.im) == 0 && sgn(z.re) < 0; }
inline bool coefficient_is_negative(const ComplexBall&) { return false; }

template <class F>
bool coefficient_is_one(const F& c) {
  if constexpr (FieldInfo<F>::exact) {
    return is_zero(c - F(1L));
  } else {
    return false;
  }
}

}  // namespace detail

/// Canonical text: terms in graded-lex order (largest first), e.g.
/// "x0^3 + 2/3*x1*x2^2". Parsing this text gives back the same polynomial.
template <CoefficientField F>
std::string Polynomial<F>::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c0] : terms_) {
    F c = c0;
    bool neg = detail::coefficient_is_negative(c);
    if (neg) c = -c;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += vars_[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    if (mono.empty()) {
      out += to_text(c);
    } else if (detail::coefficient_is_one(c)) {
      out += mono;
    } else {
      out += to_text(c) + "*" + mono;
    }
  }
  return out;
}

enum class PolyOp { Add, Sub, Mul };

/// Runtime-tagged polynomial for text and CLI boundaries, where the
/// coefficient field is only known after parsing.
using AnyPolynomial = std::variant<RationalPoly, BallPoly>;

inline AnyPolynomial poly_arith(const AnyPolynomial& a, const AnyPolynomial& b, PolyOp op) {
  if (a.index() != b.index()) {
    auto name = [](const AnyPolynomial& p) {
      return p.index() == 0 ? std::string(FieldInfo<Rational>::name) : std::string(FieldInfo<ComplexBall>::name);
    };
    throw Error("coefficient-field mismatch: " + name(a) + " vs " + name(b));
  }
  return std::visit(
      [&](const auto& x) -> AnyPolynomial {
        using P = std::decay_t<decltype(x)>;
        const auto& y = std::get<P>(b);
        switch (op) {
          case PolyOp::Add: return x + y;
          case PolyOp::Sub: return x - y;
          case PolyOp::Mul: return x * y;
        }
        return x;
      },
      a);
}

}  // namespace hypcert
