#pragma once

#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <json.hpp>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hypcert/grassmann/grassmann.hpp"
#include "hypcert/polycore/text.hpp"
#include "hypcert/polycore/univariate.hpp"

namespace hypcert {

enum class Verdict { Certified, Rejected, Unknown };

inline const char* to_text(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "Hyperbolic-Certified";
    case Verdict::Rejected: return "Rejected";
    case Verdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

/// Outcome of a certificate check. Rejected carries a witness; Unknown
/// only arises from ball indeterminacy at the maximum precision.
struct CertificateVerdict {
  Verdict verdict = Verdict::Certified;
  std::string failing_condition;  // empty when certified
  std::string witness;
  int pattern = -1;  // substitution pattern 1..3, or the coefficient index for the corollary
  long branch = -1;
  mpfr_prec_t precision = 0;
  long cases_checked = 0;
};

inline nlohmann::json to_json(const CertificateVerdict& v) {
  nlohmann::json j{{"verdict", to_text(v.verdict)}, {"precision", v.precision}, {"cases_checked", v.cases_checked}};
  if (v.verdict != Verdict::Certified) {
    j["failing_condition"] = v.failing_condition;
    j["witness"] = v.witness;
    j["pattern"] = v.pattern;
    j["branch"] = v.branch;
  }
  return j;
}

struct PrecisionLadder {
  mpfr_prec_t start = ComplexBall::kDefaultPrec;
  mpfr_prec_t max = 4096;
};

// ---------------------------------------------------------------- power-sum construction

inline bool theorem3_identity(long n) {
  long N = 4 * n - 3;
  return 1 + N * (N - 2) == 16 * (n - 1) * (n - 1);
}

struct Theorem3Instance {
  int n = 2;
  int N = 5;
  int p = 16;
  std::uint64_t seed = 0;
  Matrix<Rational> forms;  // N rows of length n+1
  long subsets_checked = 0;
  bool subsets_exhaustive = true;
  int draws = 1;
  ThresholdScan scan;

  std::vector<std::string> vars() const {
    std::vector<std::string> v;
    for (int i = 0; i <= n; ++i) v.push_back("x" + std::to_string(i));
    return v;
  }
  RationalPoly form(int j) const {
    RationalPoly h(vars());
    for (int i = 0; i <= n; ++i) {
      Exponents e(n + 1, 0);
      e[i] = 1;
      h.add_term(e, forms[j][i]);
    }
    return h;
  }
  /// sum_j (H_j)^p in polynomial text without expansion.
  std::string power_sum_text() const {
    std::string out;
    for (int j = 0; j < N; ++j) {
      if (j) out += " + ";
      out += "(" + form(j).to_string() + ")^" + std::to_string(p);
    }
    return out;
  }
  RationalPoly expanded() const;
};

namespace detail {

/// (sum a_i x_i)^p by the multinomial theorem.
inline void add_linear_power(RationalPoly& out, const std::vector<Rational>& a, int p) {
  const std::size_t m = a.size();
  std::vector<Integer> fact(p + 1);
  fact[0] = 1;
  for (int i = 1; i <= p; ++i) fact[i] = fact[i - 1] * i;
  std::vector<std::vector<Rational>> powers(m, std::vector<Rational>(p + 1));
  for (std::size_t i = 0; i < m; ++i) {
    powers[i][0] = 1;
    for (int e = 1; e <= p; ++e) powers[i][e] = powers[i][e - 1] * a[i];
  }
  Exponents e(m, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == m) {
      e[i] = left;
      if (left > 0 && a[i] == 0) return;
      Integer denom = 1;
      Rational c = 1;
      for (std::size_t t = 0; t < m; ++t) {
        denom *= fact[e[t]];
        c *= powers[t][e[t]];
      }
      out.add_term(e, c * Rational(Integer(fact[p] / denom)));
      return;
    }
    for (int k = (a[i] == 0 ? 0 : left); k >= 0; --k) {
      e[i] = k;
      rec(i + 1, left - k);
    }
  };
  rec(0, p);
}

}  // namespace detail

inline RationalPoly Theorem3Instance::expanded() const {
  if (n > 3) throw Error("expanded power-sum polynomial only for n <= 3 (degree " + std::to_string(p) + ")");
  RationalPoly out(vars());
  for (int j = 0; j < N; ++j) detail::add_linear_power(out, forms[j], p);
  return out;
}

/// Seeded generic forms for the power-sum hypersurface with N = 4n-3 and
/// p = 16(n-1)^2, plus the threshold-scan count certificate.
inline Theorem3Instance construct_theorem3(int n, std::uint64_t seed, int height = 10, long max_subsets = 2000,
                                           int retry_budget = 50) {
  if (n < 2) throw Error("construct_theorem3 needs n >= 2");
  if (!theorem3_identity(n)) throw Error("degree identity 1 + N(N-2) = 16(n-1)^2 fails");
  Theorem3Instance inst;
  inst.n = n;
  inst.N = 4 * n - 3;
  inst.p = 16 * (n - 1) * (n - 1);
  inst.seed = seed;
  const int m = n + 1;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-height, height);

  // number of (n+1)-subsets, capped
  auto binom = [](long a, long b) {
    long r = 1;
    for (long i = 1; i <= b; ++i) {
      r = r * (a - b + i) / i;
      if (r > (1L << 40)) return 1L << 40;
    }
    return r;
  };
  long total_subsets = binom(inst.N, m);

  for (int draw = 1; draw <= retry_budget; ++draw) {
    inst.draws = draw;
    inst.forms.assign(inst.N, std::vector<Rational>(m));
    for (auto& row : inst.forms)
      for (auto& c : row) c = coef(rng);
    bool ok = true;
    for (int i = 0; i < inst.N && ok; ++i)
      for (int j = i + 1; j < inst.N && ok; ++j) ok = rank(Matrix<Rational>{inst.forms[i], inst.forms[j]}) == 2;
    if (!ok) continue;
    std::vector<int> idx(m);
    auto check_subset = [&](const std::vector<int>& s) {
      Matrix<Rational> sub;
      for (int j : s) sub.push_back(inst.forms[j]);
      return rank(sub) == static_cast<std::size_t>(m);
    };
    inst.subsets_checked = 0;
    if (total_subsets <= max_subsets) {
      inst.subsets_exhaustive = true;
      std::iota(idx.begin(), idx.end(), 0);
      while (ok) {
        ok = check_subset(idx);
        ++inst.subsets_checked;
        int i = m - 1;
        while (i >= 0 && idx[i] == inst.N - m + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
      }
    } else {
      inst.subsets_exhaustive = false;
      std::vector<int> all(inst.N);
      std::iota(all.begin(), all.end(), 0);
      for (long t = 0; t < max_subsets && ok; ++t) {
        std::shuffle(all.begin(), all.end(), rng);
        std::vector<int> s(all.begin(), all.begin() + m);
        ok = check_subset(s);
        ++inst.subsets_checked;
      }
    }
    if (!ok) continue;
    inst.scan = prop4_threshold_scan(m, inst.N);
    return inst;
  }
  throw Error("no generic draw of forms within the retry budget");
}

inline nlohmann::json to_json(const Theorem3Instance& t) {
  nlohmann::json forms = nlohmann::json::array();
  for (const auto& row : t.forms) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) r.push_back(to_text(c));
    forms.push_back(r);
  }
  return {{"n", t.n},
          {"N", t.N},
          {"p", t.p},
          {"identity_holds", theorem3_identity(t.n)},
          {"seed", t.seed},
          {"draws", t.draws},
          {"forms", forms},
          {"pairwise_non_proportional", true},
          {"spanning_subsets_checked", t.subsets_checked},
          {"spanning_subsets_exhaustive", t.subsets_exhaustive},
          {"threshold_scan",
           {{"m", t.scan.m},
            {"N", t.scan.N},
            {"threshold", t.scan.threshold},
            {"uniformly_empty", t.scan.uniformly_empty},
            {"cases", t.scan.entries.size()}}},
          {"power_sum", t.power_sum_text()}};
}

// ------------------------------------------------- completing the square

/// (B^2 - 4AC)/(4A) for h = A y^2 + B y + C. nullopt when A is a ball
/// containing zero; exact zero A is rejected.
template <CoefficientField F>
std::optional<Polynomial<F>> complete_square_residual(const F& A, const Polynomial<F>& B, const Polynomial<F>& C) {
  if (is_zero(A)) throw Error("complete_square_residual: leading coefficient A is zero");
  if (!certainly_nonzero(A)) return std::nullopt;
  F four_a = F(4L) * A;
  F inv = field_inverse(four_a);
  return inv * (B * B - Polynomial<F>::constant(four_a) * C);
}

// ---------------------------------------------------------------- quadric-perturbed Fermat certificate

namespace detail {

inline GaussianRational gpow(GaussianRational z, unsigned long e) {
  GaussianRational r(1);
  while (e > 0) {
    if (e & 1UL) r = r * z;
    e >>= 1UL;
    if (e > 0) z = z * z;
  }
  return r;
}

/// zeta_k = exp(i pi (2k+1)/n) when it is -1 or +-i.
inline std::optional<GaussianRational> exact_root_of_minus_one(long k, long n) {
  long num = ((2 * k + 1) % (2 * n) + 2 * n) % (2 * n);
  if (num == n) return GaussianRational(-1);
  if (2 * num == n) return GaussianRational(0, 1);
  if (2 * num == 3 * n) return GaussianRational(0, -1);
  return std::nullopt;
}

/// Replace zeta^e by (-1)^(e/n) zeta^(e mod n).
inline GaussianPoly reduce_zeta(const GaussianPoly& p, int n) {
  int zi = p.var_index("zeta");
  if (zi < 0) return p;
  GaussianPoly out(p.vars());
  for (const auto& [e, c] : p.terms()) {
    Exponents f = e;
    int q = e[zi] / n;
    f[zi] = e[zi] % n;
    out.add_term(f, q % 2 ? -c : c);
  }
  return out.compact();
}

inline GaussianPoly specialize_zeta(const GaussianPoly& p, const GaussianRational& z) {
  return p.substitute({{"zeta", GaussianPoly::constant(z)}});
}

inline BallPoly specialize_zeta(const GaussianPoly& p, const ComplexBall& z, mpfr_prec_t prec) {
  int zi = p.var_index("zeta");
  std::vector<std::string> rest;
  for (const auto& v : p.vars())
    if (v != "zeta") rest.push_back(v);
  BallPoly out(rest);
  for (const auto& [e, c] : p.terms()) {
    Exponents f;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (static_cast<int>(i) != zi) f.push_back(e[i]);
    ComplexBall coef(c, prec);
    if (zi >= 0 && e[zi] > 0) coef = coef * z.pow(static_cast<unsigned long>(e[zi]));
    out.add_term(f, coef);
  }
  return out;
}

inline GaussianPoly minus_eta_power(int n) {
  return GaussianPoly::constant(GaussianRational(-1)) * GaussianPoly::variable("eta").pow(n);
}

inline bool zeta_free(const GaussianPoly& p) { return p.degree_in("zeta") <= 0; }

}  // namespace detail

/// Degree-n surface x0^n + x1^n + x2^n + x3^(n-2) g = 0 with g quadratic.
struct Theorem4Instance {
  int n = 11;
  GaussianPoly g;

  void validate() const {
    if (n < 11) throw Error("the quadric certificate needs n >= 11, got " + std::to_string(n));
    for (const auto& v : g.support_vars())
      if (v != "x0" && v != "x1" && v != "x2" && v != "x3") throw Error("g uses variable " + v + " outside x0..x3");
    for (const auto& [e, c] : g.terms())
      if (exponent_sum(e) != 2) throw Error("g is not a homogeneous quadratic: " + g.to_string());
    GaussianPoly x3sq = g.coefficient_of("x0", 0).coefficient_of("x1", 0).coefficient_of("x2", 0);
    if (!(x3sq.constant_term() == GaussianRational(0)) && x3sq.degree_in("x3") != 2)
      throw Error("g(0,0,0,x3) must be x3^2");
    GaussianRational lead = x3sq.coefficient_of("x3", 2).constant_term();
    if (!(lead == GaussianRational(1))) throw Error("g(0,0,0,x3) must be x3^2, found coefficient " + to_text(lead));
  }

  /// h(xi, eta) with zeta standing for the chosen root of -1.
  GaussianPoly h(int pattern) const {
    auto X = [](const char* v) { return GaussianPoly::variable(v); };
    GaussianPoly zxi = X("zeta") * X("xi");
    GaussianPoly one = GaussianPoly::constant(GaussianRational(1));
    std::map<std::string, GaussianPoly> s;
    switch (pattern) {
      case 1: s = {{"x0", zxi}, {"x1", X("xi")}, {"x2", X("eta")}, {"x3", one}}; break;
      case 2: s = {{"x0", X("eta")}, {"x1", zxi}, {"x2", X("xi")}, {"x3", one}}; break;
      case 3: s = {{"x0", X("eta")}, {"x1", X("xi")}, {"x2", zxi}, {"x3", one}}; break;
      default: throw Error("pattern must be 1, 2 or 3");
    }
    GaussianPoly full = g.with_vars({"x0", "x1", "x2", "x3"});
    return full.substitute(s);
  }
};

inline Theorem4Instance make_theorem4(int n, const std::string& g_text) {
  Theorem4Instance inst{n, parse_polynomial<GaussianRational>(g_text)};
  inst.validate();
  return inst;
}

/// Certify: for each pattern and each root zeta of zeta^n = -1, the xi^2
/// coefficient A of h is a nonzero constant and
/// P(eta) = -eta^n + (B^2 - 4AC)/(4A) has n distinct roots.
inline CertificateVerdict check_theorem4(const Theorem4Instance& inst, PrecisionLadder ladder = {}) {
  inst.validate();
  const int n = inst.n;
  CertificateVerdict out;
  out.precision = ladder.start;
  std::optional<CertificateVerdict> unknown;
  GaussianPoly zeta_n_plus_1 = GaussianPoly::variable("zeta").pow(n) + GaussianPoly::constant(GaussianRational(1));

  auto reject = [&](const char* cond, int pattern, long branch, std::string witness) {
    CertificateVerdict v;
    v.verdict = Verdict::Rejected;
    v.failing_condition = cond;
    v.pattern = pattern;
    v.branch = branch;
    v.witness = std::move(witness);
    v.precision = out.precision;
    v.cases_checked = out.cases_checked;
    return v;
  };

  for (int pattern = 1; pattern <= 3; ++pattern) {
    GaussianPoly h = inst.h(pattern);
    GaussianPoly A = detail::reduce_zeta(h.coefficient_of("xi", 2), n);
    GaussianPoly B = detail::reduce_zeta(h.coefficient_of("xi", 1), n);
    GaussianPoly C = detail::reduce_zeta(h.coefficient_of("xi", 0), n);
    if (A.degree_in("eta") > 0) return reject("hessian_not_constant", pattern, 0, "d2h/dxi2 = " + (GaussianRational(2) * A).to_string());
    if (A.is_zero()) return reject("zero_hessian", pattern, 0, "d2h/dxi2 = 0 for every root");

    // A(zeta) vanishes at some root of -1 iff gcd(A, zeta^n + 1) is nontrivial
    GaussianPoly common = A.support_vars().empty() ? GaussianPoly::constant(GaussianRational(1)) : univariate_gcd(A, zeta_n_plus_1);
    if (common.total_degree() >= 1) {
      long branch = -1;
      for (long k = 0; k < n && branch < 0; ++k) {
        ComplexBall z = ComplexBall::root_of_minus_one(k, n, ladder.max);
        ComplexBall val = detail::specialize_zeta(common.with_vars({"zeta"}), z, ladder.max).constant_term();
        if (val.contains_zero()) branch = k;
      }
      return reject("zero_hessian", pattern, branch,
                    "A(zeta) = " + A.to_string() + " shares the factor " + common.to_string() + " with zeta^" + std::to_string(n) + " + 1");
    }

    // zeta-free P: one exact check covers every branch
    std::optional<GaussianPoly> sym;
    if (B.is_zero()) {
      sym = detail::minus_eta_power(n) - C;
    } else if (detail::zeta_free(A)) {
      sym = detail::reduce_zeta(detail::minus_eta_power(n) + *complete_square_residual(A.constant_term(), B, C), n);
    }
    if (sym && detail::zeta_free(*sym)) {
      GaussianPoly P = sym->compact();
      out.cases_checked += n;
      if (is_squarefree_certified(P) == Certainty::No) {
        GaussianPoly d = univariate_gcd(P, P.derivative("eta"));
        return reject("repeated_root", pattern, 0, "P(eta) = " + P.to_string() + " has repeated factor " + d.to_string());
      }
      continue;
    }

    for (long k = 0; k < n; ++k) {
      ++out.cases_checked;
      if (auto z = detail::exact_root_of_minus_one(k, n)) {
        GaussianRational a = detail::specialize_zeta(A, *z).constant_term();
        GaussianPoly P = detail::minus_eta_power(n) +
                         *complete_square_residual(a, detail::specialize_zeta(B, *z), detail::specialize_zeta(C, *z));
        P = P.compact();
        if (is_squarefree_certified(P) == Certainty::No)
          return reject("repeated_root", pattern, k,
                        "P(eta) = " + P.to_string() + " has repeated factor " + univariate_gcd(P, P.derivative("eta")).to_string());
        continue;
      }
      bool done = false;
      for (mpfr_prec_t prec = ladder.start; prec <= ladder.max && !done; prec *= 2) {
        out.precision = std::max(out.precision, prec);
        ComplexBall z = ComplexBall::root_of_minus_one(k, n, prec);
        ComplexBall a = detail::specialize_zeta(A.with_vars({"zeta"}), z, prec).constant_term();
        auto res = complete_square_residual(a, detail::specialize_zeta(B, z, prec), detail::specialize_zeta(C, z, prec));
        if (!res) continue;
        BallPoly P = BallPoly::constant(ComplexBall(-1L)) * BallPoly::variable("eta").pow(n) + *res;
        done = is_squarefree_certified(P) == Certainty::Yes;
      }
      if (!done && !unknown) {
        unknown = CertificateVerdict{Verdict::Unknown, "precision_exhausted",
                                     "squarefreeness of P(eta) undecided at " + std::to_string(ladder.max) + " bits",
                                     pattern, k, ladder.max, 0};
      }
    }
  }
  if (unknown) {
    unknown->cases_checked = out.cases_checked;
    return *unknown;
  }
  return out;
}

// ---------------------------------------------------------------- Corollary

namespace detail {

/// Exact test: does 1 + a w^2 + w^n vanish for some w with w^(n-2) = -2a/n?
/// At such w, w^n = w^2 (-2a/n) so the value is 1 + a w^2 (n-2)/n.
inline bool corollary_branch_fails_exactly(int n, const GaussianRational& a) {
  if (is_zero(a)) return false;
  GaussianRational x = GaussianRational(Rational(-2, 1)) * a / GaussianRational(n);
  GaussianRational u = GaussianRational(-n) / (a * GaussianRational(n - 2));  // forced w^2
  if (n % 2 == 0) return gpow(u, (n - 2) / 2) == x;
  GaussianRational w = x / gpow(u, (n - 3) / 2);  // w^(n-2) = u^((n-3)/2) w
  return w * w == u;
}

/// Enclosures of all m-th roots of x (pairwise disjoint), or nullopt when
/// they cannot be separated at this precision.
inline std::optional<std::vector<ComplexBall>> root_enclosures(const ComplexBall& x, long m, mpfr_prec_t prec) {
  if (x.is_exact_zero()) return std::vector<ComplexBall>(1, ComplexBall(Rational(0), prec));
  if (x.contains_zero()) return std::nullopt;
  const mpfr_prec_t wp = prec + 32;
  detail::Mpfr mod(wp), arg(wp), r(wp), theta(wp), two_pi(wp), re(wp), im(wp), zero(64);
  mpfr_hypot(mod.get(), x.re(), x.im(), MPFR_RNDN);
  mpfr_atan2(arg.get(), x.im(), x.re(), MPFR_RNDN);
  mpfr_rootn_ui(r.get(), mod.get(), static_cast<unsigned long>(m), MPFR_RNDN);
  mpfr_const_pi(two_pi.get(), MPFR_RNDN);
  mpfr_mul_ui(two_pi.get(), two_pi.get(), 2, MPFR_RNDN);
  std::vector<ComplexBall> out;
  for (long k = 0; k < m; ++k) {
    mpfr_mul_si(theta.get(), two_pi.get(), k, MPFR_RNDN);
    mpfr_add(theta.get(), theta.get(), arg.get(), MPFR_RNDN);
    mpfr_div_si(theta.get(), theta.get(), m, MPFR_RNDN);
    mpfr_sin_cos(im.get(), re.get(), theta.get(), MPFR_RNDN);
    mpfr_mul(re.get(), re.get(), r.get(), MPFR_RNDN);
    mpfr_mul(im.get(), im.get(), r.get(), MPFR_RNDN);
    ComplexBall w = ComplexBall::from_center(re.get(), im.get(), zero.get(), prec);
    if (!w.is_exact()) w = ComplexBall::from_center(w.re(), w.im(), zero.get(), prec);
    // some root of q(w) = w^m - x lies within m |q(w)| / |q'(w)|
    ComplexBall q = w.pow(static_cast<unsigned long>(m)) - x;
    ComplexBall dq = ComplexBall(m) * w.pow(static_cast<unsigned long>(m - 1));
    if (dq.contains_zero()) return std::nullopt;
    detail::Mpfr rad(64);
    mpfr_div(rad.get(), q.mag_upper().get(), dq.mag_lower().get(), MPFR_RNDU);
    mpfr_mul_si(rad.get(), rad.get(), m, MPFR_RNDU);
    out.push_back(ComplexBall::from_center(w.re(), w.im(), rad.get(), prec));
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      ComplexBall d = ComplexBall::from_center(out[i].re(), out[i].im(), zero.get(), prec) -
                      ComplexBall::from_center(out[j].re(), out[j].im(), zero.get(), prec);
      detail::Mpfr need(64);
      mpfr_add(need.get(), out[i].radius(), out[j].radius(), MPFR_RNDU);
      if (mpfr_cmp(d.mag_lower().get(), need.get()) <= 0) return std::nullopt;
    }
  return out;
}

}  // namespace detail

/// Corollary conditions for g = x3^2 + a0 x0^2 + a1 x1^2 + a2 x2^2:
/// a_i^n != (-1)^(n+1) a_j^n for i < j, and 1 + a_j w^2 + w^n != 0 for every
/// w with w^(n-2) = -2 a_j / n. Exact inputs decide ties exactly.
inline CertificateVerdict check_corollary(int n, const std::array<GaussianRational, 3>& a, PrecisionLadder ladder = {}) {
  if (n < 11) throw Error("the corollary needs n >= 11, got " + std::to_string(n));
  CertificateVerdict out;
  out.precision = ladder.start;
  const GaussianRational sign = (n + 1) % 2 == 0 ? GaussianRational(1) : GaussianRational(-1);
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  for (auto [i, j] : pairs) {
    ++out.cases_checked;
    GaussianRational lhs = detail::gpow(a[i], n), rhs = sign * detail::gpow(a[j], n);
    if (lhs == rhs) {
      out.verdict = Verdict::Rejected;
      out.failing_condition = "power_condition";
      out.pattern = i;
      out.branch = j;
      out.witness = "a" + std::to_string(i) + "^" + std::to_string(n) + " = (-1)^" + std::to_string(n + 1) + " a" +
                    std::to_string(j) + "^" + std::to_string(n) + " = " + to_text(lhs);
      return out;
    }
  }
  for (int j = 0; j < 3; ++j) {
    const bool fails = detail::corollary_branch_fails_exactly(n, a[j]);
    bool settled = false;
    for (mpfr_prec_t prec = ladder.start; prec <= ladder.max && !settled; prec *= 2) {
      out.precision = std::max(out.precision, prec);
      ComplexBall aj(a[j], prec);
      ComplexBall x = ComplexBall(-2L) * aj / ComplexBall(static_cast<long>(n));
      auto roots = detail::root_enclosures(x, n - 2, prec);
      if (!roots) continue;
      long bad = -1;
      for (std::size_t k = 0; k < roots->size(); ++k) {
        const ComplexBall& w = (*roots)[k];
        ComplexBall val = ComplexBall(1L) + aj * w * w + w.pow(static_cast<unsigned long>(n));
        if (val.contains_zero()) {
          bad = static_cast<long>(k);
          if (fails) break;
        }
      }
      if (bad < 0) {
        out.cases_checked += static_cast<long>(roots->size());
        settled = true;
      } else if (fails) {
        out.verdict = Verdict::Rejected;
        out.failing_condition = "branch_condition";
        out.pattern = j;
        out.branch = bad;
        out.witness = "1 + a" + std::to_string(j) + " w^2 + w^" + std::to_string(n) + " = 0 at w = " + (*roots)[bad].center_text() +
                      ", a double root of -eta^" + std::to_string(n) + " - a" + std::to_string(j) + " eta^2 - 1";
        return out;
      }
    }
    if (!settled) {
      out.verdict = Verdict::Unknown;
      out.failing_condition = "precision_exhausted";
      out.pattern = j;
      out.witness = "branch values undecided at " + std::to_string(ladder.max) + " bits";
      return out;
    }
  }
  return out;
}

}  // namespace hypcert
