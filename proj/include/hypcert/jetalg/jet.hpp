#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypcert/polycore/linalg.hpp"
#include "hypcert/polycore/polynomial.hpp"
#include "hypcert/polycore/series.hpp"
#include "hypcert/polycore/text.hpp"

namespace hypcert {

/// The jet variable d^order z_coord (order >= 1). Coordinates themselves
/// (order 0) live in the coefficient polynomials.
struct JetVar {
  int coord = 0;
  int order = 1;
  auto operator<=>(const JetVar&) const = default;
};

/// Product of powers of jet variables. Weight is sum(order * exponent).
class JetMonomial {
 public:
  JetMonomial() = default;
  explicit JetMonomial(std::map<JetVar, int> exps) : exps_(std::move(exps)) {
    std::erase_if(exps_, [](const auto& kv) { return kv.second == 0; });
    for (const auto& [v, e] : exps_)
      if (e < 0 || v.order < 1) throw Error("invalid jet monomial exponent");
  }
  static JetMonomial single(JetVar v, int e = 1) { return JetMonomial({{v, e}}); }

  const std::map<JetVar, int>& exponents() const { return exps_; }
  bool empty() const { return exps_.empty(); }

  int weight() const {
    int w = 0;
    for (const auto& [v, e] : exps_) w += v.order * e;
    return w;
  }
  int order() const {
    int k = 0;
    for (const auto& [v, e] : exps_) k = std::max(k, v.order);
    return k;
  }
  int degree() const {
    int d = 0;
    for (const auto& [v, e] : exps_) d += e;
    return d;
  }

  friend JetMonomial operator*(const JetMonomial& a, const JetMonomial& b) {
    std::map<JetVar, int> m = a.exps_;
    for (const auto& [v, e] : b.exps_) m[v] += e;
    return JetMonomial(std::move(m));
  }

  JetMonomial remapped(const std::vector<int>& coord_map) const {
    std::map<JetVar, int> m;
    for (const auto& [v, e] : exps_) m[JetVar{coord_map.at(v.coord), v.order}] += e;
    return JetMonomial(std::move(m));
  }

  auto operator<=>(const JetMonomial&) const = default;

 private:
  std::map<JetVar, int> exps_;
};

/// Formal jet differential sum_mu coef_mu(z) * mu with polynomial
/// coefficients in the coordinates z_1..z_n (named). Products are symmetric.
template <CoefficientField F>
class JetDifferential {
 public:
  using Poly = Polynomial<F>;

  JetDifferential() = default;
  explicit JetDifferential(std::vector<std::string> coords) : coords_(sorted(std::move(coords))) {}

  static JetDifferential constant(const F& c, std::vector<std::string> coords = {}) {
    JetDifferential j(std::move(coords));
    j.add_term(JetMonomial(), Poly::constant(c));
    return j;
  }
  static JetDifferential from_polynomial(const Poly& p, std::vector<std::string> coords) {
    JetDifferential j(std::move(coords));
    j.add_term(JetMonomial(), p);
    return j;
  }
  static JetDifferential coordinate(const std::string& name) { return from_polynomial(Poly::variable(name), {name}); }
  /// d^order of the named coordinate.
  static JetDifferential jet(const std::string& name, int order) {
    JetDifferential j({name});
    j.add_term(JetMonomial::single(JetVar{0, order}), Poly::constant(F(1L)));
    return j;
  }

  const std::vector<std::string>& coords() const { return coords_; }
  std::size_t dimension() const { return coords_.size(); }
  const std::map<JetMonomial, Poly>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Largest jet order present (0 for a pure function).
  int order() const {
    int k = 0;
    for (const auto& [m, c] : terms_) k = std::max(k, m.order());
    return k;
  }
  /// Common weight of all terms, if homogeneous (the zero differential is
  /// homogeneous of every weight; reported as 0).
  std::optional<int> homogeneous_weight() const {
    if (terms_.empty()) return 0;
    int w = terms_.begin()->first.weight();
    for (const auto& [m, c] : terms_)
      if (m.weight() != w) return std::nullopt;
    return w;
  }

  void add_term(const JetMonomial& m, const Poly& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  /// Same differential over a larger coordinate list.
  JetDifferential aligned(const std::vector<std::string>& target) const {
    JetDifferential out(target);
    std::vector<int> map(coords_.size());
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      auto it = std::find(out.coords_.begin(), out.coords_.end(), coords_[i]);
      if (it == out.coords_.end()) throw Error("coordinate " + coords_[i] + " missing from target list");
      map[i] = static_cast<int>(it - out.coords_.begin());
    }
    for (const auto& [m, c] : terms_) out.add_term(m.remapped(map), c);
    return out;
  }

  friend JetDifferential operator+(const JetDifferential& a, const JetDifferential& b) {
    auto coords = merged(a, b);
    JetDifferential out = a.aligned(coords);
    for (const auto& [m, c] : b.aligned(coords).terms_) out.add_term(m, c);
    return out;
  }
  friend JetDifferential operator-(const JetDifferential& a) {
    JetDifferential out(a.coords_);
    for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, -c);
    return out;
  }
  friend JetDifferential operator-(const JetDifferential& a, const JetDifferential& b) { return a + (-b); }
  friend JetDifferential operator*(const JetDifferential& a, const JetDifferential& b) {
    auto coords = merged(a, b);
    JetDifferential aa = a.aligned(coords), bb = b.aligned(coords);
    JetDifferential out(coords);
    for (const auto& [ma, ca] : aa.terms_)
      for (const auto& [mb, cb] : bb.terms_) out.add_term(ma * mb, ca * cb);
    return out;
  }
  JetDifferential& operator+=(const JetDifferential& o) { return *this = *this + o; }
  JetDifferential& operator*=(const JetDifferential& o) { return *this = *this * o; }

  /// Total derivative: d(d^l z_j) = d^(l+1) z_j, Leibniz on products, chain
  /// rule on coefficients. Raises every weight by exactly one.
  JetDifferential total_derivative() const {
    JetDifferential out(coords_);
    for (const auto& [m, c] : terms_) {
      for (std::size_t j = 0; j < coords_.size(); ++j) {
        Poly dc = c.derivative(coords_[j]);
        if (!dc.is_zero()) out.add_term(m * JetMonomial::single(JetVar{static_cast<int>(j), 1}), dc);
      }
      for (const auto& [v, e] : m.exponents()) {
        std::map<JetVar, int> rest = m.exponents();
        rest[v] -= 1;
        rest[JetVar{v.coord, v.order + 1}] += 1;
        out.add_term(JetMonomial(std::move(rest)), F(static_cast<long>(e)) * c);
      }
    }
    return out;
  }

  JetDifferential total_derivative(int times) const {
    JetDifferential out = *this;
    for (int i = 0; i < times; ++i) out = out.total_derivative();
    return out;
  }

  std::string to_string() const;

 private:
  static std::vector<std::string> sorted(std::vector<std::string> v) {
    std::sort(v.begin(), v.end(), var_name_less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }
  static std::vector<std::string> merged(const JetDifferential& a, const JetDifferential& b) {
    if (a.coords_ == b.coords_) return a.coords_;
    std::vector<std::string> v = a.coords_;
    v.insert(v.end(), b.coords_.begin(), b.coords_.end());
    return sorted(std::move(v));
  }

  std::vector<std::string> coords_;
  std::map<JetMonomial, Poly> terms_;
};

/// Canonical text: terms by decreasing weight, e.g.
/// "z1*(d z1)*(d2 z1) + (d z2)^3".
template <CoefficientField F>
std::string JetDifferential<F>::to_string() const {
  if (terms_.empty()) return "0";
  std::vector<const std::pair<const JetMonomial, Poly>*> order;
  for (const auto& t : terms_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->first.weight() > b->first.weight(); });
  std::string out;
  bool first = true;
  for (const auto* t : order) {
    std::string jets;
    for (const auto& [v, e] : t->first.exponents()) {
      if (!jets.empty()) jets += "*";
      jets += "(" + (v.order == 1 ? std::string("d") : "d" + std::to_string(v.order)) + " " + coords_[v.coord] + ")";
      if (e > 1) jets += "^" + std::to_string(e);
    }
    for (const auto& [e, c] : t->second.terms()) {
      Poly single(t->second.vars());
      single.add_term(e, c);
      std::string coef = single.to_string();
      bool neg = !coef.empty() && coef[0] == '-';
      if (neg) coef.erase(0, 1);
      if (first) {
        if (neg) out += "-";
      } else {
        out += neg ? " - " : " + ";
      }
      first = false;
      if (jets.empty()) {
        out += coef;
      } else if (coef == "1") {
        out += jets;
      } else {
        out += coef + "*" + jets;
      }
    }
  }
  return out;
}

/// Parse the jet grammar: polynomial text plus atoms "d z1", "d2 z1", ...
/// Jet targets and identifiers of the form z or z<k> are coordinates.
template <CoefficientField F>
JetDifferential<F> parse_jet(std::string_view text, mpfr_prec_t prec = ComplexBall::kDefaultPrec) {
  using J = JetDifferential<F>;
  using P = Polynomial<F>;
  ParseHooks<J> hooks;
  hooks.number = [prec](const Rational& q) { return J::constant(LiteralConverter<F>::number(q, prec)); };
  hooks.complex_literal = [prec](const std::string& re, const std::string& im) {
    return J::constant(LiteralConverter<F>::complex(re, im, prec));
  };
  hooks.identifier = [](const std::string& name) {
    bool coord = name[0] == 'z' && name.find_first_not_of("0123456789", 1) == std::string::npos;
    return coord ? J::coordinate(name) : J::from_polynomial(P::variable(name), {});
  };
  hooks.jet = [](int order, const std::string& name) { return J::jet(name, order); };
  return parse_expression<J>(text, hooks);
}

/// Truncated power-series curve germ into affine space, one series per named
/// coordinate, all in the same variable and to the same order.
template <CoefficientField F>
struct CurveGerm {
  std::vector<std::string> coords;
  std::vector<TruncatedSeries<F>> components;

  CurveGerm(std::vector<std::string> names, std::vector<TruncatedSeries<F>> series)
      : coords(std::move(names)), components(std::move(series)) {
    if (coords.size() != components.size()) throw Error("curve germ: coordinate/component count mismatch");
    if (components.empty()) throw Error("curve germ needs at least one component");
    for (const auto& c : components)
      if (c.var() != components[0].var() || c.order() != components[0].order())
        throw Error("curve germ components must share variable and truncation order");
  }
  /// Polynomial components truncated at `order`.
  static CurveGerm from_polynomials(std::vector<std::string> names, const std::vector<Polynomial<F>>& polys,
                                    const std::string& var, int order) {
    std::vector<TruncatedSeries<F>> s;
    for (const auto& p : polys) s.push_back(TruncatedSeries<F>::from_polynomial(p, var, order));
    return CurveGerm(std::move(names), std::move(s));
  }

  const std::string& var() const { return components[0].var(); }
  int order() const { return components[0].order(); }
  std::size_t index_of(const std::string& name) const {
    auto it = std::find(coords.begin(), coords.end(), name);
    if (it == coords.end()) throw Error("curve germ has no coordinate " + name);
    return static_cast<std::size_t>(it - coords.begin());
  }
};

/// Coefficient polynomial evaluated along the germ.
template <CoefficientField F>
TruncatedSeries<F> evaluate_along(const Polynomial<F>& p, const CurveGerm<F>& f, int order) {
  TruncatedSeries<F> sum(f.var(), order);
  std::vector<const TruncatedSeries<F>*> comp(p.vars().size(), nullptr);
  for (std::size_t i = 0; i < p.vars().size(); ++i) {
    auto it = std::find(f.coords.begin(), f.coords.end(), p.vars()[i]);
    if (it != f.coords.end()) comp[i] = &f.components[it - f.coords.begin()];
  }
  for (const auto& [e, c] : p.terms()) {
    TruncatedSeries<F> term = TruncatedSeries<F>::constant(c, f.var(), order);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!comp[i]) throw Error("coefficient variable '" + p.vars()[i] + "' is not a germ coordinate");
      term = term * comp[i]->truncated(order).pow(static_cast<unsigned>(e[i]));
    }
    sum = sum + term;
  }
  return sum;
}

/// f*omega = tau(zeta) (d zeta)^m: substitute d^l z_j -> f_j^(l) and return
/// tau, correct through order K - order(omega).
template <CoefficientField F>
TruncatedSeries<F> pullback(const JetDifferential<F>& omega, const CurveGerm<F>& f) {
  if (!omega.homogeneous_weight()) throw Error("pullback needs a jet differential of homogeneous weight");
  const int k = omega.order();
  const int out_order = f.order() - k;
  if (out_order < 0)
    throw Error("curve germ truncation " + std::to_string(f.order()) + " too small for jet order " + std::to_string(k));
  std::vector<std::size_t> idx;
  for (const auto& name : omega.coords()) idx.push_back(f.index_of(name));
  std::map<std::pair<std::size_t, int>, TruncatedSeries<F>> deriv;
  auto derivative_of = [&](std::size_t j, int l) -> const TruncatedSeries<F>& {
    auto key = std::make_pair(j, l);
    auto it = deriv.find(key);
    if (it == deriv.end()) it = deriv.emplace(key, f.components[j].derivative(l).truncated(out_order)).first;
    return it->second;
  };
  TruncatedSeries<F> tau(f.var(), out_order);
  for (const auto& [m, c] : omega.terms()) {
    TruncatedSeries<F> term = evaluate_along(c, f, out_order);
    for (const auto& [v, e] : m.exponents())
      term = term * derivative_of(idx[v.coord], v.order).pow(static_cast<unsigned>(e));
    tau = tau + term;
  }
  return tau;
}

/// W(u_1..u_s) = det[u_j^(i-1)], correct through order K - (s-1).
template <CoefficientField F>
TruncatedSeries<F> wronskian(const std::vector<TruncatedSeries<F>>& u) {
  if (u.empty()) throw Error("wronskian of an empty entry list");
  const int s = static_cast<int>(u.size());
  int order = u[0].order();
  for (const auto& x : u) {
    if (x.var() != u[0].var()) throw Error("wronskian entries in different variables");
    order = std::min(order, x.order());
  }
  order -= s - 1;
  if (order < 0) throw Error("wronskian: truncation too small for " + std::to_string(s) + " entries");
  Matrix<TruncatedSeries<F>> m(s, std::vector<TruncatedSeries<F>>(s));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) m[i][j] = u[j].derivative(i).truncated(order);
  return ring_determinant(m, TruncatedSeries<F>(u[0].var(), order));
}

/// Wronskian of polynomial functions of the germ.
template <CoefficientField F>
TruncatedSeries<F> wronskian(const std::vector<Polynomial<F>>& u, const CurveGerm<F>& f) {
  std::vector<TruncatedSeries<F>> s;
  for (const auto& p : u) s.push_back(evaluate_along(p, f, f.order()));
  return wronskian(s);
}

/// Symbolic Wronskian det[d^(i-1) u_j] in the jet ring.
template <CoefficientField F>
JetDifferential<F> jet_wronskian(const std::vector<JetDifferential<F>>& u) {
  if (u.empty()) throw Error("wronskian of an empty entry list");
  const std::size_t s = u.size();
  Matrix<JetDifferential<F>> m(s, std::vector<JetDifferential<F>>(s));
  for (std::size_t j = 0; j < s; ++j) {
    JetDifferential<F> d = u[j];
    for (std::size_t i = 0; i < s; ++i) {
      m[i][j] = d;
      if (i + 1 < s) d = d.total_derivative();
    }
  }
  return ring_determinant(m, JetDifferential<F>());
}

}  // namespace hypcert
