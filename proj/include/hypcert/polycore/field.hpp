#pragma once

#include <concepts>
#include <string>
#include <string_view>

#include "hypcert/polycore/ball.hpp"
#include "hypcert/polycore/rational.hpp"

namespace hypcert {

/// What the polynomial and series templates need from a coefficient type.
template <class F>
concept CoefficientField = requires(const F& a, const F& b, long n) {
  F(n);
  { a + b } -> std::convertible_to<F>;
  { a - b } -> std::convertible_to<F>;
  { a * b } -> std::convertible_to<F>;
  { -a } -> std::convertible_to<F>;
  { is_zero(a) } -> std::same_as<bool>;
  { to_text(a) } -> std::convertible_to<std::string>;
};

template <class F>
struct FieldInfo;

template <>
struct FieldInfo<Rational> {
  static constexpr std::string_view name = "rational";
  static constexpr bool exact = true;
  static Rational inverse(const Rational& a) {
    if (is_zero(a)) throw Error("division by zero rational");
    return 1 / a;
  }
};

template <>
struct FieldInfo<GaussianRational> {
  static constexpr std::string_view name = "gaussian-rational";
  static constexpr bool exact = true;
  static GaussianRational inverse(const GaussianRational& a) { return GaussianRational(1) / a; }
};

template <>
struct FieldInfo<ComplexBall> {
  static constexpr std::string_view name = "ball";
  static constexpr bool exact = false;
  static ComplexBall inverse(const ComplexBall& a) { return a.inverse(); }
};

template <class F>
F field_inverse(const F& a) {
  return FieldInfo<F>::inverse(a);
}

/// Nonzero in the sense needed to divide by it: exact nonzero, or a ball
/// that excludes zero.
inline bool certainly_nonzero(const Rational& a) { return !is_zero(a); }
inline bool certainly_nonzero(const GaussianRational& a) { return !is_zero(a); }
inline bool certainly_nonzero(const ComplexBall& a) { return a.excludes_zero(); }

inline GaussianRational to_gaussian(const Rational& q) { return GaussianRational(q); }

}  // namespace hypcert
