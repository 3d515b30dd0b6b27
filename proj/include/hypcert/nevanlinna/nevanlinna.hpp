#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <json.hpp>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hypcert/polycore/text.hpp"
#include "hypcert/polycore/univariate.hpp"

namespace hypcert {

using cplx = std::complex<double>;

inline double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

// ------------------------------------------------------------ quadrature

struct CircleAverage {
  double value = 0;
  double error = 0;  // |trapezoid(2 nodes) - trapezoid(nodes)|
  int nodes = 0;
  std::vector<double> nudged_angles;
};

namespace detail {

inline double sample_with_nudge(const std::function<double(cplx)>& f, double r, double theta, double nudge,
                                std::vector<double>& nudged, std::vector<double>& failed) {
  cplx z = std::polar(r, theta);
  double v = f(z);
  if (std::isfinite(v)) return v;
  nudged.push_back(theta);
  for (double s : {1.0 + nudge, 1.0 - nudge}) {
    v = f(std::polar(r * s, theta));
    if (std::isfinite(v)) return v;
  }
  failed.push_back(theta);
  return 0.0;
}

}  // namespace detail

/// Trapezoidal average of `integrand` over |z| = r. Non-finite samples are
/// moved radially by nudge*r; if that fails the call throws with the angles.
inline CircleAverage circle_average(const std::function<double(cplx)>& integrand, double r, int nodes = 512,
                                    double nudge = 1e-9) {
  if (!(r > 0)) throw Error("circle_average needs r > 0");
  if (nodes < 4) throw Error("circle_average needs at least 4 nodes");
  CircleAverage out;
  out.nodes = nodes;
  std::vector<double> failed;
  double even = 0, odd = 0;
  const double step = M_PI / nodes;
  for (int k = 0; k < 2 * nodes; ++k) {
    double v = detail::sample_with_nudge(integrand, r, k * step, nudge, out.nudged_angles, failed);
    (k % 2 == 0 ? even : odd) += v;
  }
  if (!failed.empty()) {
    std::ostringstream msg;
    msg << "non-finite integrand on |z| = " << r << " at angles";
    for (double t : failed) msg << ' ' << t;
    throw Error(msg.str());
  }
  out.value = even / nodes;
  double fine = (even + odd) / (2.0 * nodes);
  out.error = std::abs(fine - out.value);
  return out;
}

/// Least-squares slope of ys against xs.
inline double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw Error("fit_slope needs two or more points");
  double n = static_cast<double>(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double den = n * sxx - sx * sx;
  if (den == 0) throw Error("fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

/// count radii geometrically spaced from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0) || !(hi > lo) || count < 2) throw Error("log_grid needs 0 < lo < hi and count >= 2");
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  g.back() = hi;
  return g;
}

/// "log:K" (from 1 to rmax) or a comma-separated list of radii.
inline std::vector<double> parse_grid(const std::string& spec, double rmax = 1000.0) {
  std::vector<double> g;
  if (spec.rfind("log:", 0) == 0) {
    int count = std::stoi(spec.substr(4));
    return log_grid(1.0, rmax, count);
  }
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double r = std::stod(tok, &used);
    if (used != tok.size() && detail::strip(tok.substr(used)).size()) throw Error("malformed grid entry '" + tok + "'");
    g.push_back(r);
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0)) throw Error("grid radii must be positive");
    if (i && !(g[i] > g[i - 1])) throw Error("grid radii must be increasing");
  }
  if (g.empty()) throw Error("empty grid");
  return g;
}

// ------------------------------------------------------ rational functions

using GaussDense = std::vector<GaussianRational>;

inline cplx to_cplx(const GaussianRational& z) { return {z.re.get_d(), z.im.get_d()}; }

inline cplx horner(const GaussDense& p, cplx z) {
  cplx acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + to_cplx(*it);
  return acc;
}

struct CertifiedRoot {
  cplx center;
  double radius = 0;  // a root lies within this distance of center
  int multiplicity = 1;
};

namespace detail {

inline std::vector<cplx> aberth(const std::vector<cplx>& p) {
  const int d = static_cast<int>(p.size()) - 1;
  std::vector<cplx> z(d);
  if (d == 0) return z;
  double bound = 0;
  for (int i = 0; i < d; ++i) bound = std::max(bound, std::abs(p[i] / p[d]));
  double rad = 1 + bound;
  // start inside the Cauchy disc on a rotated circle
  double r0 = std::pow(std::abs(p[0] / p[d]), 1.0 / d);
  if (!(r0 > 0) || !std::isfinite(r0)) r0 = 1;
  r0 = std::min(r0, rad);
  for (int k = 0; k < d; ++k) z[k] = std::polar(r0, 2 * M_PI * k / d + 0.4);
  auto eval = [&](cplx x, cplx& dv) {
    cplx v = p[d];
    dv = 0;
    for (int i = d - 1; i >= 0; --i) {
      dv = dv * x + v;
      v = v * x + p[i];
    }
    return v;
  };
  for (int it = 0; it < 500; ++it) {
    double move = 0;
    for (int k = 0; k < d; ++k) {
      cplx dv;
      cplx v = eval(z[k], dv);
      if (v == cplx(0)) continue;
      cplx ratio = v / dv;
      cplx s = 0;
      for (int j = 0; j < d; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      cplx w = ratio / (1.0 - ratio * s);
      z[k] -= w;
      move = std::max(move, std::abs(w) / std::max(1.0, std::abs(z[k])));
    }
    if (move < 1e-15) break;
  }
  return z;
}

}  // namespace detail

/// Roots of a squarefree polynomial with ball-certified disjoint enclosures.
/// certified is false when the enclosures could not be separated.
inline std::vector<CertifiedRoot> certified_roots(const GaussDense& p_in, bool& certified, mpfr_prec_t prec = 128) {
  GaussDense p = p_in;
  dense::trim(p);
  std::vector<CertifiedRoot> out;
  certified = true;
  if (dense::degree(p) < 1) return out;
  std::vector<cplx> pc;
  for (const auto& c : p) pc.push_back(to_cplx(c));
  auto approx = detail::aberth(pc);
  GaussDense dp = dense::derivative(p);
  const long d = dense::degree(p);
  for (cplx z : approx) {
    detail::Mpfr re(64), im(64), zero(64);
    mpfr_set_d(re.get(), z.real(), MPFR_RNDN);
    mpfr_set_d(im.get(), z.imag(), MPFR_RNDN);
    ComplexBall zb = ComplexBall::from_center(re.get(), im.get(), zero.get(), prec);
    ComplexBall v(ComplexBall::Prec{prec}), dv(ComplexBall::Prec{prec});
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * zb + ComplexBall(*it, prec);
    for (auto it = dp.rbegin(); it != dp.rend(); ++it) dv = dv * zb + ComplexBall(*it, prec);
    double rad;
    if (dv.contains_zero()) {
      certified = false;
      rad = std::numeric_limits<double>::infinity();
    } else {
      rad = d * v.mag_upper_d() / dv.mag_lower_d() * (1 + 1e-12);
    }
    out.push_back({z, rad, 1});
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (std::abs(out[i].center - out[j].center) * (1 - 1e-12) <= out[i].radius + out[j].radius) certified = false;
  return out;
}

/// Reduced quotient num/den of univariate Gaussian-rational polynomials,
/// den monic.
struct RationalFunction {
  std::string var = "z";
  GaussDense num, den;

  static RationalFunction make(GaussDense n, GaussDense d, std::string var = "z") {
    dense::trim(n);
    dense::trim(d);
    if (d.empty()) throw Error("rational function with zero denominator");
    if (!n.empty()) {
      auto g = dense::gcd(n, d);
      if (dense::degree(g) >= 1) {
        n = dense::divmod(n, g).first;
        d = dense::divmod(d, g).first;
      }
    }
    GaussianRational lead = d.back();
    for (auto& c : n) c = c / lead;
    for (auto& c : d) c = c / lead;
    return {std::move(var), std::move(n), std::move(d)};
  }

  /// "<num>/<den>" split at the last top-level '/' followed by '('; a bare
  /// polynomial has denominator 1.
  static RationalFunction parse(const std::string& text) {
    std::string s = detail::strip(text);
    if (s.rfind("rational:", 0) == 0) s = s.substr(9);
    int depth = 0;
    std::size_t split = std::string::npos;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (s[i] == '/' && depth == 0) {
        std::size_t k = i + 1;
        while (k < s.size() && s[k] == ' ') ++k;
        if (k < s.size() && s[k] == '(') split = i;
      }
    }
    GaussianPoly n = parse_polynomial<GaussianRational>(split == std::string::npos ? s : s.substr(0, split));
    GaussianPoly d = split == std::string::npos ? GaussianPoly::constant(GaussianRational(1))
                                                : parse_polynomial<GaussianRational>(s.substr(split + 1));
    auto sn = n.support_vars(), sd = d.support_vars();
    std::vector<std::string> all = sn;
    all.insert(all.end(), sd.begin(), sd.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (all.size() > 1) throw Error("rational function must be univariate, found " + std::to_string(all.size()) + " variables");
    std::string v = all.empty() ? "z" : all[0];
    auto dense_of = [&](const GaussianPoly& p) {
      if (p.is_zero()) return GaussDense{};
      return p.support_vars().empty() ? GaussDense{p.constant_term()} : p.dense(v);
    };
    return make(dense_of(n), dense_of(d), v);
  }

  int degree() const { return std::max(dense::degree(num), dense::degree(den)); }

  cplx operator()(cplx z) const { return horner(num, z) / horner(den, z); }

  /// 1/(F - a)
  RationalFunction reciprocal_shift(const GaussianRational& a) const {
    GaussDense n = num;
    n.resize(std::max(n.size(), den.size()), GaussianRational(0));
    for (std::size_t i = 0; i < den.size(); ++i) n[i] = n[i] - a * den[i];
    return make(den, n, var);
  }

  /// F'/F
  RationalFunction log_derivative() const {
    if (num.empty()) throw Error("log derivative of the zero function");
    GaussDense dn = dense::derivative(num), dd = dense::derivative(den);
    GaussDense top(std::max(dn.size() + den.size(), num.size() + dd.size()), GaussianRational(0));
    for (std::size_t i = 0; i < dn.size(); ++i)
      for (std::size_t j = 0; j < den.size(); ++j) top[i + j] = top[i + j] + dn[i] * den[j];
    for (std::size_t i = 0; i < num.size(); ++i)
      for (std::size_t j = 0; j < dd.size(); ++j) top[i + j] = top[i + j] - num[i] * dd[j];
    GaussDense bot(num.size() + den.size() - 1, GaussianRational(0));
    for (std::size_t i = 0; i < num.size(); ++i)
      for (std::size_t j = 0; j < den.size(); ++j) bot[i + j] = bot[i + j] + num[i] * den[j];
    return make(top, bot, var);
  }

  std::string to_string() const {
    auto text = [&](const GaussDense& p) { return p.empty() ? std::string("0") : GaussianPoly::from_dense(var, p).to_string(); };
    return "(" + text(num) + ")/(" + text(den) + ")";
  }
};

/// Poles of F = num/den with multiplicities; the origin is split off exactly.
inline std::vector<CertifiedRoot> rational_poles(const RationalFunction& F, bool& certified) {
  certified = true;
  std::vector<CertifiedRoot> out;
  GaussDense d = F.den;
  int origin = 0;
  while (!d.empty() && is_zero(d.front())) {
    d.erase(d.begin());
    ++origin;
  }
  if (origin > 0) out.push_back({cplx(0), 0.0, origin});
  for (auto& [factor, mult] : squarefree_decomposition(d)) {
    bool ok = true;
    for (auto r : certified_roots(factor, ok)) {
      r.multiplicity = mult;
      out.push_back(r);
    }
    certified = certified && ok;
  }
  return out;
}

// ------------------------------------------------- meromorphic samples

struct MeromorphicSample {
  enum class Kind { Rational, Plugin };
  Kind kind = Kind::Plugin;
  std::string name;
  std::function<cplx(cplx)> evaluator;
  std::vector<CertifiedRoot> poles;
  double r_max = std::numeric_limits<double>::infinity();
  bool poles_certified = false;
  std::optional<RationalFunction> rational;

  static MeromorphicSample from_rational(const RationalFunction& F) {
    MeromorphicSample s;
    s.kind = Kind::Rational;
    s.name = "rational:" + F.to_string();
    s.rational = F;
    std::vector<cplx> n, d;
    for (const auto& c : F.num) n.push_back(to_cplx(c));
    for (const auto& c : F.den) d.push_back(to_cplx(c));
    s.evaluator = [n, d](cplx z) {
      cplx a = 0, b = 0;
      for (auto it = n.rbegin(); it != n.rend(); ++it) a = a * z + *it;
      for (auto it = d.rbegin(); it != d.rend(); ++it) b = b * z + *it;
      return a / b;
    };
    s.poles = rational_poles(F, s.poles_certified);
    return s;
  }
  static MeromorphicSample from_text(const std::string& text) { return from_rational(RationalFunction::parse(text)); }
  static MeromorphicSample plugin(std::string name, std::function<cplx(cplx)> f, std::vector<CertifiedRoot> poles,
                                  double r_max) {
    MeromorphicSample s;
    s.name = std::move(name);
    s.evaluator = std::move(f);
    s.poles = std::move(poles);
    s.r_max = r_max;
    return s;
  }
};

/// N(r) = sum over poles 0 < |z| <= r of m log(r/|z|) plus m_0 log r for a
/// pole at the origin; `ell` caps each multiplicity.
inline double counting_function(const MeromorphicSample& F, double r, std::optional<int> ell = std::nullopt) {
  if (!(r > 0)) throw Error("counting_function needs r > 0");
  if (r > F.r_max) throw Error("radius beyond the pole list validity R_max");
  double N = 0;
  for (const auto& p : F.poles) {
    int m = ell ? std::min(p.multiplicity, *ell) : p.multiplicity;
    double a = std::abs(p.center);
    if (a == 0) {
      N += m * std::log(r);
    } else if (a <= r) {
      N += m * std::log(r / a);
    }
  }
  return N;
}

struct ProfileEntry {
  double r = 0;
  double a_term = 0;
  double n_term = 0;
  double T = 0;
  std::optional<double> n_truncated;
  double quad_error = 0;
};

struct NevanlinnaProfile {
  std::string function;
  int nodes = 512;
  std::optional<int> truncation;
  std::vector<ProfileEntry> entries;
  double max_quad_error = 0;
  bool n_nondecreasing = true;
  std::optional<int> degree;
  std::optional<double> degree_slope;  // slope of T against log r over the upper half of the grid
  bool poles_certified = false;
};

inline double proximity(const MeromorphicSample& F, double r, int nodes, double* error = nullptr) {
  auto avg = circle_average([&](cplx z) { return log_plus(std::abs(F.evaluator(z))); }, r, nodes);
  if (error) *error = avg.error;
  return avg.value;
}

inline NevanlinnaProfile characteristic(const MeromorphicSample& F, const std::vector<double>& grid, int nodes = 512,
                                        std::optional<int> ell = std::nullopt) {
  NevanlinnaProfile prof;
  prof.function = F.name;
  prof.nodes = nodes;
  prof.truncation = ell;
  prof.poles_certified = F.poles_certified;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0) || (i && !(grid[i] > grid[i - 1]))) throw Error("grid must be increasing and positive");
    if (grid[i] > F.r_max) throw Error("grid radius beyond R_max");
  }
  for (double r : grid) {
    ProfileEntry e;
    e.r = r;
    e.a_term = proximity(F, r, nodes, &e.quad_error);
    e.n_term = counting_function(F, r);
    if (ell) e.n_truncated = counting_function(F, r, ell);
    e.T = e.a_term + e.n_term;
    if (!prof.entries.empty() && e.n_term < prof.entries.back().n_term) prof.n_nondecreasing = false;
    prof.max_quad_error = std::max(prof.max_quad_error, e.quad_error);
    prof.entries.push_back(e);
  }
  if (F.rational && grid.size() >= 4) {
    prof.degree = F.rational->degree();
    std::vector<double> xs, ys;
    for (std::size_t i = grid.size() / 2; i < grid.size(); ++i) {
      xs.push_back(std::log(prof.entries[i].r));
      ys.push_back(prof.entries[i].T);
    }
    prof.degree_slope = fit_slope(xs, ys);
  }
  return prof;
}

inline nlohmann::json to_json(const ProfileEntry& e) {
  nlohmann::json j{{"r", e.r}, {"A_term", e.a_term}, {"N_term", e.n_term}, {"T", e.T}, {"quad_error", e.quad_error}};
  if (e.n_truncated) j["N_truncated"] = *e.n_truncated;
  return j;
}

inline nlohmann::json to_json(const NevanlinnaProfile& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : p.entries) rows.push_back(to_json(e));
  nlohmann::json j{{"function", p.function},
                   {"nodes", p.nodes},
                   {"entries", rows},
                   {"max_quad_error", p.max_quad_error},
                   {"n_nondecreasing", p.n_nondecreasing},
                   {"poles_certified", p.poles_certified}};
  if (p.degree) j["degree"] = *p.degree;
  if (p.degree_slope) j["degree_slope"] = *p.degree_slope;
  if (p.truncation) j["truncation"] = *p.truncation;
  return j;
}

/// T(r, 1/(F-a)) - T(r, F) over the grid and its slope against log r.
struct FirstMainTheoremReport {
  GaussianRational a;
  std::vector<double> radii, differences;
  double sup_abs_difference = 0;
  double slope = 0;
};

inline FirstMainTheoremReport first_main_theorem_check(const RationalFunction& F, const GaussianRational& a,
                                                       const std::vector<double>& grid, int nodes = 512) {
  auto pF = characteristic(MeromorphicSample::from_rational(F), grid, nodes);
  auto pG = characteristic(MeromorphicSample::from_rational(F.reciprocal_shift(a)), grid, nodes);
  FirstMainTheoremReport rep;
  rep.a = a;
  std::vector<double> logs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double d = pG.entries[i].T - pF.entries[i].T;
    rep.radii.push_back(grid[i]);
    rep.differences.push_back(d);
    logs.push_back(std::log(grid[i]));
    rep.sup_abs_difference = std::max(rep.sup_abs_difference, std::abs(d));
  }
  rep.slope = fit_slope(logs, rep.differences);
  return rep;
}

// ------------------------------------------------------ elliptic model

/// theta(z|tau) = sum_n exp(pi i n^2 tau + 2 pi i n z) on C/(Z + tau Z), with
/// one divisor point p; theta_D(z) = theta(z - p + (1+tau)/2).
struct EllipticModel {
  cplx tau{0, 1};
  cplx point;  // divisor point, defaults to (1+tau)/2
  double tol = 1e-17;

  explicit EllipticModel(cplx t = {0, 1}, std::optional<cplx> p = std::nullopt) : tau(t) {
    if (!(tau.imag() > 0)) throw Error("EllipticModel needs Im tau > 0");
    point = p ? *p : (1.0 + tau) / 2.0;
  }

  /// Terms beyond this distance from the dominant index are below tol.
  int truncation() const { return static_cast<int>(std::ceil(std::sqrt(-std::log(tol) / (M_PI * tau.imag())))) + 1; }

  cplx theta(cplx z) const {
    const double t = tau.imag();
    long center = std::lround(-z.imag() / t);
    int K = truncation();
    cplx s = 0;
    for (long n = center - K; n <= center + K; ++n) {
      double nn = static_cast<double>(n);
      s += std::exp(cplx(0, M_PI) * (nn * nn * tau + 2.0 * nn * z));
    }
    return s;
  }

  /// theta(z + b tau) = exp(-pi i b^2 tau - 2 pi i b z) theta(z)
  cplx tau_factor_exponent(cplx z, double b = 1) const { return cplx(0, -M_PI) * (b * b * tau + 2.0 * b * z); }

  /// log|theta(z)| via reduction to the fundamental parallelogram.
  double log_abs_theta(cplx z) const {
    double b = std::round(z.imag() / tau.imag());
    cplx z1 = z - b * tau;
    double a = std::round(z1.real());
    cplx z0 = z1 - a;
    return tau_factor_exponent(z0, b).real() + std::log(std::abs(theta(z0)));
  }

  double phi(cplx z) const { return 2 * M_PI * z.imag() * z.imag() / tau.imag(); }

  cplx shift() const { return (1.0 + tau) / 2.0 - point; }

  /// log(|theta_D| e^{-phi_D/2}), a function on C/Lambda
  double log_norm(cplx z) const {
    cplx w = z + shift();
    return log_abs_theta(w) - phi(w) / 2;
  }

  /// sup of log_norm estimated on a grid over the fundamental domain.
  double log_sup(int grid = 96) const {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) best = std::max(best, log_norm(static_cast<double>(i) / grid + static_cast<double>(j) / grid * tau));
    return best;
  }
};

struct TransformationResidual {
  double shift_one = 0;
  double shift_tau = 0;
};

inline TransformationResidual transformation_residual(const EllipticModel& M, cplx z) {
  TransformationResidual r;
  cplx t0 = M.theta(z), t1 = M.theta(z + 1.0), tt = M.theta(z + M.tau);
  cplx pred = std::exp(M.tau_factor_exponent(z)) * t0;
  double scale1 = std::max(std::abs(t1), std::abs(t0));
  r.shift_one = std::abs(t1 - t0) / scale1;
  r.shift_tau = std::abs(tt - pred) / std::max(std::abs(tt), std::abs(pred));
  return r;
}

struct DefectEntry {
  double r = 0;
  double m = 0;
  double T = 0;
  double ratio = 0;
  double quad_error = 0;  // propagated into the ratio
  double ratio_4x = 0;
  std::size_t nudges = 0;
};

struct DefectReport {
  cplx tau, c;
  int nodes = 512;
  double log_sup = 0;
  std::vector<DefectEntry> entries;
  bool monotone_nonincreasing = true;
  std::optional<double> growth_exponent;
  double max_4x_deviation = 0;
};

/// m(r)/T(r) along zeta -> c zeta with m(r) = A_r(log sup - log_norm) >= 0
/// and T(r) = A_r(phi_D)/2.
inline DefectReport defect_estimate(const EllipticModel& M, cplx c, const std::vector<double>& grid, int nodes = 512) {
  if (c == cplx(0)) throw Error("defect_estimate needs c != 0");
  DefectReport rep;
  rep.tau = M.tau;
  rep.c = c;
  rep.nodes = nodes;
  rep.log_sup = M.log_sup();
  auto one = [&](double r, int n, DefectEntry& e) {
    auto m = circle_average([&](cplx z) { return rep.log_sup - M.log_norm(c * z); }, r, n);
    auto T = circle_average([&](cplx z) { return M.phi(c * z + M.shift()) / 2; }, r, n);
    e.m = m.value;
    e.T = T.value;
    e.nudges = m.nudged_angles.size();
    if (!(e.T > 0)) throw Error("T(r) vanishes at r = " + std::to_string(r));
    e.ratio = e.m / e.T;
    e.quad_error = (m.error + std::abs(e.ratio) * T.error) / e.T;
  };
  for (double r : grid) {
    DefectEntry e, fine;
    e.r = r;
    one(r, nodes, e);
    one(r, 4 * nodes, fine);
    e.ratio_4x = fine.ratio;
    rep.max_4x_deviation = std::max(rep.max_4x_deviation, std::abs(fine.ratio - e.ratio));
    if (!rep.entries.empty()) {
      const auto& prev = rep.entries.back();
      if (e.ratio > prev.ratio + e.quad_error + prev.quad_error) rep.monotone_nonincreasing = false;
    }
    rep.entries.push_back(e);
  }
  std::vector<double> xs, ys;
  for (const auto& e : rep.entries)
    if (e.r >= 10) {
      xs.push_back(std::log(e.r));
      ys.push_back(std::log(e.T));
    }
  if (xs.size() >= 2) rep.growth_exponent = fit_slope(xs, ys);
  return rep;
}

inline nlohmann::json to_json(const DefectEntry& e) {
  return {{"r", e.r}, {"m", e.m}, {"T", e.T}, {"ratio", e.ratio}, {"quad_error", e.quad_error}, {"ratio_4x", e.ratio_4x}, {"nudges", e.nudges}};
}

inline nlohmann::json to_json(const DefectReport& d) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : d.entries) rows.push_back(to_json(e));
  nlohmann::json j{{"tau", {d.tau.real(), d.tau.imag()}},
                   {"c", {d.c.real(), d.c.imag()}},
                   {"nodes", d.nodes},
                   {"log_sup", d.log_sup},
                   {"entries", rows},
                   {"monotone_nonincreasing", d.monotone_nonincreasing},
                   {"max_4x_deviation", d.max_4x_deviation}};
  if (d.growth_exponent) j["growth_exponent"] = *d.growth_exponent;
  return j;
}

// --------------------------------------------------- curvature identity

struct CurvatureReport {
  double max_residual = 0;  // max |L - R| / max |R|
  double max_rhs = 0;
  int points = 0;
};

/// Compares (1/4) Laplacian of log(1 + |w|^2), by 5-point differences, with
/// |w'|^2/(1 + |w|^2)^2 on a grid over |zeta| <= radius.
inline CurvatureReport curvature_identity_check(const std::function<cplx(cplx)>& w, const std::function<cplx(cplx)>& dw,
                                                double h = 1e-3, int grid = 21, double radius = 0.9) {
  if (!(h > 0)) throw Error("curvature check needs h > 0");
  auto f = [&](cplx z) { return std::log1p(std::norm(w(z))); };
  CurvatureReport rep;
  double max_diff = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      cplx z(-radius + 2 * radius * i / (grid - 1), -radius + 2 * radius * j / (grid - 1));
      if (std::abs(z) > radius) continue;
      double lap = f(z + h) + f(z - h) + f(z + cplx(0, h)) + f(z - cplx(0, h)) - 4 * f(z);
      double left = lap / (4 * h * h);
      double right = std::norm(dw(z)) / std::pow(1 + std::norm(w(z)), 2);
      max_diff = std::max(max_diff, std::abs(left - right));
      rep.max_rhs = std::max(rep.max_rhs, std::abs(right));
      ++rep.points;
    }
  rep.max_residual = rep.max_rhs > 0 ? max_diff / rep.max_rhs : max_diff;
  return rep;
}

// ------------------------------------------------------- calculus lemma

/// I_r(g) = int_0^r (d rho / rho) int_{|zeta| < rho} g = 2 pi int_0^r t log(r/t) A_t(g) dt
inline double disc_integral(const std::function<double(cplx)>& g, double r, int nodes = 512) {
  auto integrand = [&](double t) {
    if (t <= 0) return 0.0;
    return 2 * M_PI * t * std::log(r / t) * circle_average(g, t, nodes).value;
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, r, 12, 1e-12);
}

struct CalculusEntry {
  double r = 0;
  double lhs = 0;       // A_r(log g)
  double integral = 0;  // I_r(g)
  double rhs_base = 0;  // log r + log I_r(g)
  std::optional<double> ratio;
};

struct CalculusLemmaReport {
  std::vector<CalculusEntry> entries;
  double empirical_constant = 0;
  double reference_constant = 2;
  std::vector<double> violating_radii;
};

inline CalculusLemmaReport calculus_lemma_probe(const std::function<double(cplx)>& g, const std::vector<double>& grid,
                                                double reference_constant = 2, int nodes = 512) {
  CalculusLemmaReport rep;
  rep.reference_constant = reference_constant;
  auto logg = [&](cplx z) {
    double v = g(z);
    if (!(v > 0)) return std::numeric_limits<double>::quiet_NaN();
    return std::log(v);
  };
  for (double r : grid) {
    CalculusEntry e;
    e.r = r;
    e.lhs = circle_average(logg, r, nodes).value;
    e.integral = disc_integral(g, r, nodes);
    e.rhs_base = std::log(r) + std::log(e.integral);
    if (e.rhs_base > 0) {
      e.ratio = e.lhs / e.rhs_base;
      rep.empirical_constant = std::max(rep.empirical_constant, *e.ratio);
    }
    if (e.lhs > reference_constant * e.rhs_base + 1e-12 && e.lhs > 0) rep.violating_radii.push_back(r);
    rep.entries.push_back(e);
  }
  return rep;
}

inline nlohmann::json to_json(const CalculusLemmaReport& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : c.entries) {
    nlohmann::json j{{"r", e.r}, {"lhs", e.lhs}, {"I_r", e.integral}, {"rhs_base", e.rhs_base}};
    if (e.ratio) j["ratio"] = *e.ratio;
    rows.push_back(j);
  }
  return {{"entries", rows},
          {"empirical_constant", c.empirical_constant},
          {"reference_constant", c.reference_constant},
          {"violating_radii", c.violating_radii}};
}

}  // namespace hypcert
