#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cstdlib>
#include <string>
#include <utility>

#include "hypcert/polycore/rational.hpp"

namespace hypcert {

namespace detail {

/// RAII holder for one mpfr_t.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Mpfr(const Mpfr& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Mpfr(Mpfr&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Mpfr& operator=(Mpfr o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Mpfr() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

 private:
  mpfr_t v_;
};

inline std::string mpfr_to_text(mpfr_srcptr x) {
  if (mpfr_zero_p(x)) return "0";
  mpfr_exp_t e = 0;
  char* raw = mpfr_get_str(nullptr, &e, 10, 0, x, MPFR_RNDN);
  std::string digits(raw);
  mpfr_free_str(raw);
  std::string sign;
  if (!digits.empty() && digits[0] == '-') {
    sign = "-";
    digits.erase(0, 1);
  }
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  std::string out = sign + digits.substr(0, 1);
  if (digits.size() > 1) out += "." + digits.substr(1);
  long exp10 = static_cast<long>(e) - 1;
  if (exp10 != 0) out += "e" + std::to_string(exp10);
  return out;
}

}  // namespace detail

/// Complex midpoint-radius ball. The center components carry `prec` bits;
/// the radius is an upward-rounded bound such that every operation's result
/// contains the exact result for any members of the operand balls.
class ComplexBall {
 public:
  static constexpr mpfr_prec_t kRadiusPrec = 64;
  static constexpr mpfr_prec_t kDefaultPrec = 256;

  /// Tag selecting the precision of an exact-zero ball.
  struct Prec {
    mpfr_prec_t bits;
  };

  ComplexBall() : ComplexBall(Prec{kDefaultPrec}) {}
  explicit ComplexBall(Prec p) : re_(p.bits), im_(p.bits), rad_(kRadiusPrec) {}

  // Exact for every long (64-bit center).
  ComplexBall(long v) : ComplexBall(Prec{64}) {  // NOLINT
    mpfr_set_si(re_.get(), v, MPFR_RNDN);
  }

  ComplexBall(const Rational& re, const Rational& im, mpfr_prec_t prec) : ComplexBall(Prec{prec}) {
    add_error(re_, mpfr_set_q(re_.get(), re.get_mpq_t(), MPFR_RNDN));
    add_error(im_, mpfr_set_q(im_.get(), im.get_mpq_t(), MPFR_RNDN));
  }
  ComplexBall(const Rational& re, mpfr_prec_t prec) : ComplexBall(re, Rational(0), prec) {}
  ComplexBall(const GaussianRational& z, mpfr_prec_t prec) : ComplexBall(z.re, z.im, prec) {}

  /// Ball around a decimal center, e.g. from the text form "(1.5,-2e-3)".
  static ComplexBall from_decimal(const std::string& re, const std::string& im, mpfr_prec_t prec) {
    ComplexBall b(Prec{prec});
    b.set_decimal(b.re_, re);
    b.set_decimal(b.im_, im);
    return b;
  }

  /// Ball around (re, im) rounded to `prec` bits, with at least radius `rad`.
  static ComplexBall from_center(mpfr_srcptr re, mpfr_srcptr im, mpfr_srcptr rad, mpfr_prec_t prec) {
    ComplexBall b(Prec{prec});
    b.add_error(b.re_, mpfr_set(b.re_.get(), re, MPFR_RNDN));
    b.add_error(b.im_, mpfr_set(b.im_.get(), im, MPFR_RNDN));
    mpfr_add(b.rad_.get(), b.rad_.get(), rad, MPFR_RNDU);
    return b;
  }

  /// zeta = exp(i*pi*(2k+1)/n), a root of zeta^n = -1. Exact where the root is
  /// -1 or +-i.
  static ComplexBall root_of_minus_one(long k, long n, mpfr_prec_t prec) {
    if (n <= 0) throw Error("root_of_minus_one needs n > 0");
    ComplexBall z(Prec{prec});
    long num = ((2 * k + 1) % (2 * n) + 2 * n) % (2 * n);  // angle = pi*num/n, num in [0,2n)
    if (num * 2 == 2 * n) {                                // angle pi
      mpfr_set_si(z.re_.get(), -1, MPFR_RNDN);
      return z;
    }
    if (num * 2 == n) {  // pi/2
      mpfr_set_si(z.im_.get(), 1, MPFR_RNDN);
      return z;
    }
    if (num * 2 == 3 * n) {  // 3pi/2
      mpfr_set_si(z.im_.get(), -1, MPFR_RNDN);
      return z;
    }
    detail::Mpfr theta(prec + 16);
    mpfr_const_pi(theta.get(), MPFR_RNDN);
    mpfr_mul_si(theta.get(), theta.get(), num, MPFR_RNDN);
    mpfr_div_si(theta.get(), theta.get(), n, MPFR_RNDN);
    mpfr_sin_cos(z.im_.get(), z.re_.get(), theta.get(), MPFR_RNDN);
    // |theta error| <= 2pi * 3 * 2^-(prec+16), plus one rounding per component.
    mpfr_set_ui_2exp(z.rad_.get(), 1, 4 - prec, MPFR_RNDU);
    return z;
  }

  mpfr_prec_t prec() const { return re_.prec(); }
  mpfr_srcptr re() const { return re_.get(); }
  mpfr_srcptr im() const { return im_.get(); }
  mpfr_srcptr radius() const { return rad_.get(); }

  /// Same center, new precision (rounding error folded into the radius).
  ComplexBall with_prec(mpfr_prec_t prec) const {
    ComplexBall b(Prec{prec});
    b.add_error(b.re_, mpfr_set(b.re_.get(), re_.get(), MPFR_RNDN));
    b.add_error(b.im_, mpfr_set(b.im_.get(), im_.get(), MPFR_RNDN));
    mpfr_add(b.rad_.get(), b.rad_.get(), rad_.get(), MPFR_RNDU);
    return b;
  }

  /// Enlarge the radius by `r` (upward).
  void inflate(mpfr_srcptr r) { mpfr_add(rad_.get(), rad_.get(), r, MPFR_RNDU); }

  bool is_exact_zero() const {
    return mpfr_zero_p(re_.get()) && mpfr_zero_p(im_.get()) && mpfr_zero_p(rad_.get());
  }
  bool is_exact() const { return mpfr_zero_p(rad_.get()); }

  /// Upper bound on |z| over the ball.
  detail::Mpfr mag_upper() const {
    detail::Mpfr m(kRadiusPrec);
    mpfr_hypot(m.get(), re_.get(), im_.get(), MPFR_RNDU);
    mpfr_add(m.get(), m.get(), rad_.get(), MPFR_RNDU);
    return m;
  }
  /// Lower bound on |z| over the ball (zero if the ball meets 0).
  detail::Mpfr mag_lower() const {
    detail::Mpfr m(kRadiusPrec);
    mpfr_hypot(m.get(), re_.get(), im_.get(), MPFR_RNDD);
    mpfr_sub(m.get(), m.get(), rad_.get(), MPFR_RNDD);
    if (mpfr_sgn(m.get()) < 0) mpfr_set_zero(m.get(), 1);
    return m;
  }
  double mag_lower_d() const { return mpfr_get_d(mag_lower().get(), MPFR_RNDD); }
  double mag_upper_d() const { return mpfr_get_d(mag_upper().get(), MPFR_RNDU); }

  bool excludes_zero() const { return mpfr_sgn(mag_lower().get()) > 0; }
  bool contains_zero() const { return !excludes_zero(); }

  /// Exact containment test for a Gaussian rational point.
  bool contains(const GaussianRational& z) const {
    Rational cr, ci, r;
    mpfr_get_q(cr.get_mpq_t(), re_.get());
    mpfr_get_q(ci.get_mpq_t(), im_.get());
    mpfr_get_q(r.get_mpq_t(), rad_.get());
    Rational dr = cr - z.re, di = ci - z.im;
    return dr * dr + di * di <= r * r;
  }

  ComplexBall operator-() const {
    ComplexBall b(*this);
    mpfr_neg(b.re_.get(), b.re_.get(), MPFR_RNDN);
    mpfr_neg(b.im_.get(), b.im_.get(), MPFR_RNDN);
    return b;
  }

  friend ComplexBall operator+(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall c(Prec{std::max(a.prec(), b.prec())});
    c.add_error(c.re_, mpfr_add(c.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN));
    c.add_error(c.im_, mpfr_add(c.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN));
    mpfr_add(c.rad_.get(), c.rad_.get(), a.rad_.get(), MPFR_RNDU);
    mpfr_add(c.rad_.get(), c.rad_.get(), b.rad_.get(), MPFR_RNDU);
    return c;
  }
  friend ComplexBall operator-(const ComplexBall& a, const ComplexBall& b) { return a + (-b); }

  friend ComplexBall operator*(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall c(Prec{std::max(a.prec(), b.prec())});
    c.add_error(c.re_, mpfr_fmms(c.re_.get(), a.re_.get(), b.re_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN));
    c.add_error(c.im_, mpfr_fmma(c.im_.get(), a.re_.get(), b.im_.get(), a.im_.get(), b.re_.get(), MPFR_RNDN));
    // |a||rb| + |b||ra| + ra*rb, using center magnitudes.
    detail::Mpfr ma(kRadiusPrec), mb(kRadiusPrec), t(kRadiusPrec);
    mpfr_hypot(ma.get(), a.re_.get(), a.im_.get(), MPFR_RNDU);
    mpfr_hypot(mb.get(), b.re_.get(), b.im_.get(), MPFR_RNDU);
    mpfr_mul(t.get(), ma.get(), b.rad_.get(), MPFR_RNDU);
    mpfr_add(c.rad_.get(), c.rad_.get(), t.get(), MPFR_RNDU);
    mpfr_mul(t.get(), mb.get(), a.rad_.get(), MPFR_RNDU);
    mpfr_add(c.rad_.get(), c.rad_.get(), t.get(), MPFR_RNDU);
    mpfr_mul(t.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
    mpfr_add(c.rad_.get(), c.rad_.get(), t.get(), MPFR_RNDU);
    return c;
  }

  /// Reciprocal with a `p`-bit center (default: own precision); throws if
  /// the ball meets zero.
  ComplexBall inverse(mpfr_prec_t p = 0) const {
    detail::Mpfr lo(kRadiusPrec);
    mpfr_hypot(lo.get(), re_.get(), im_.get(), MPFR_RNDD);
    if (mpfr_cmp(lo.get(), rad_.get()) <= 0) throw Error("reciprocal of a ball containing zero");
    if (p == 0) p = prec();
    ComplexBall c(Prec{p});
    detail::Mpfr d(p + 32);
    int t0 = mpfr_fmma(d.get(), re_.get(), re_.get(), im_.get(), im_.get(), MPFR_RNDN);
    int t1 = mpfr_div(c.re_.get(), re_.get(), d.get(), MPFR_RNDN);
    int t2 = mpfr_div(c.im_.get(), im_.get(), d.get(), MPFR_RNDN);
    mpfr_neg(c.im_.get(), c.im_.get(), MPFR_RNDN);
    if (t0 != 0 || t1 != 0 || t2 != 0) {
      // relative center error <= 2^(2-p)
      detail::Mpfr e(kRadiusPrec);
      mpfr_hypot(e.get(), c.re_.get(), c.im_.get(), MPFR_RNDU);
      mpfr_mul_2si(e.get(), e.get(), 2 - p, MPFR_RNDU);
      mpfr_add(c.rad_.get(), c.rad_.get(), e.get(), MPFR_RNDU);
    }
    if (!mpfr_zero_p(rad_.get())) {
      // |1/z - 1/z0| <= r / (|z0| (|z0| - r))
      detail::Mpfr gap(kRadiusPrec), e(kRadiusPrec);
      mpfr_sub(gap.get(), lo.get(), rad_.get(), MPFR_RNDD);
      mpfr_mul(gap.get(), gap.get(), lo.get(), MPFR_RNDD);
      mpfr_div(e.get(), rad_.get(), gap.get(), MPFR_RNDU);
      mpfr_add(c.rad_.get(), c.rad_.get(), e.get(), MPFR_RNDU);
    }
    return c;
  }
  friend ComplexBall operator/(const ComplexBall& a, const ComplexBall& b) { return a * b.inverse(std::max(a.prec(), b.prec())); }

  ComplexBall& operator+=(const ComplexBall& o) { return *this = *this + o; }
  ComplexBall& operator-=(const ComplexBall& o) { return *this = *this - o; }
  ComplexBall& operator*=(const ComplexBall& o) { return *this = *this * o; }

  ComplexBall pow(unsigned long e) const {
    ComplexBall result(1L), base(*this);
    while (e > 0) {
      if (e & 1UL) result *= base;
      e >>= 1UL;
      if (e > 0) base *= base;
    }
    return result;
  }

  std::string center_text() const {
    return "(" + detail::mpfr_to_text(re_.get()) + "," + detail::mpfr_to_text(im_.get()) + ")";
  }
  std::string radius_text() const { return detail::mpfr_to_text(rad_.get()); }

 private:
  /// Account for one round-to-nearest result: add one ulp of x if inexact.
  void add_error(const detail::Mpfr& x, int ternary) {
    if (ternary == 0) return;
    detail::Mpfr ulp(kRadiusPrec);
    if (mpfr_zero_p(x.get())) {
      mpfr_set_ui_2exp(ulp.get(), 1, mpfr_get_emin(), MPFR_RNDU);
    } else {
      mpfr_set_ui_2exp(ulp.get(), 1, mpfr_get_exp(x.get()) - x.prec(), MPFR_RNDU);
    }
    mpfr_add(rad_.get(), rad_.get(), ulp.get(), MPFR_RNDU);
  }

  void set_decimal(detail::Mpfr& dst, const std::string& text) {
    char* end = nullptr;
    int t = mpfr_strtofr(dst.get(), text.c_str(), &end, 10, MPFR_RNDN);
    if (text.empty() || end == nullptr || *end != '\0')
      throw Error("malformed ball center '" + text + "'");
    add_error(dst, t);
  }

  detail::Mpfr re_;
  detail::Mpfr im_;
  detail::Mpfr rad_;
};

inline bool is_zero(const ComplexBall& b) { return b.is_exact_zero(); }
inline std::string to_text(const ComplexBall& b) { return b.center_text(); }

}  // namespace hypcert
