#pragma once

#include <cctype>
#include <functional>
#include <regex>
#include <string>
#include <string_view>

#include "hypcert/polycore/polynomial.hpp"

namespace hypcert {

/// Callbacks that turn grammar atoms into ring elements. `jet` may be left
/// empty, in which case jet atoms such as "d2 z1" are rejected.
template <class R>
struct ParseHooks {
  std::function<R(const Rational&)> number;
  std::function<R(const std::string& re, const std::string& im)> complex_literal;
  std::function<R(const std::string&)> identifier;
  std::function<R(int order, const std::string&)> jet;
};

namespace detail {

inline bool is_number_text(const std::string& s) {
  static const std::regex re(R"(^\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?\s*$)");
  return std::regex_match(s, re);
}

inline std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\n\r"), e = s.find_last_not_of(" \t\n\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

/// Recursive-descent parser for
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor (['*'] factor)*      juxtaposition multiplies
///   factor := atom ['^' integer]
///   atom   := number ['/' number] | ident | 'd'[k] ident | '(' expr ')' | '(' re ',' im ')'
template <class R>
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const ParseHooks<R>& hooks) : s_(text), hooks_(hooks) {}

  R parse() {
    R value = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return value;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("parse error at column " + std::to_string(pos_ + 1) + " in \"" + std::string(s_) + "\": " + what);
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool at_atom_start() {
    skip_ws();
    if (pos_ >= s_.size()) return false;
    char c = s_[pos_];
    return c == '(' || c == '.' || std::isalnum(static_cast<unsigned char>(c));
  }

  R expr() {
    skip_ws();
    bool neg = false;
    if (peek('+') || peek('-')) {
      neg = s_[pos_] == '-';
      ++pos_;
    }
    R value = term();
    if (neg) value = -value;
    while (peek('+') || peek('-')) {
      bool minus = s_[pos_] == '-';
      ++pos_;
      R t = term();
      value = minus ? value - t : value + t;
    }
    return value;
  }

  R term() {
    R value = factor();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        value = value * factor();
      } else if (at_atom_start()) {
        value = value * factor();
      } else {
        return value;
      }
    }
  }

  R factor() {
    R base = atom();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a nonnegative integer exponent");
      unsigned long e = std::stoul(std::string(s_.substr(start, pos_ - start)));
      R result = hooks_.number(Rational(1));
      R b = base;
      while (e > 0) {
        if (e & 1UL) result = result * b;
        e >>= 1UL;
        if (e > 0) b = b * b;
      }
      return result;
    }
    return base;
  }

  std::string identifier_at(std::size_t& p) const {
    std::size_t start = p;
    if (p < s_.size() && std::isalpha(static_cast<unsigned char>(s_[p]))) {
      ++p;
      while (p < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p])) || s_[p] == '_')) ++p;
    }
    return std::string(s_.substr(start, p - start));
  }

  R atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      std::size_t close = s_.find(')', pos_);
      std::size_t comma = s_.find(',', pos_);
      std::size_t nested = s_.find('(', pos_ + 1);
      if (close != std::string_view::npos && comma != std::string_view::npos && comma < close &&
          (nested == std::string_view::npos || nested > close)) {
        std::string re = strip(std::string(s_.substr(pos_ + 1, comma - pos_ - 1)));
        std::string im = strip(std::string(s_.substr(comma + 1, close - comma - 1)));
        if (!is_number_text(re) || !is_number_text(im)) fail("malformed complex literal");
        pos_ = close + 1;
        return hooks_.complex_literal(re, im);
      }
      ++pos_;
      R inner = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      std::string num(s_.substr(start, pos_ - start));
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        skip_ws();
        std::size_t dstart = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (dstart == pos_) fail("expected a denominator after '/'");
        num += "/" + std::string(s_.substr(dstart, pos_ - dstart));
      }
      return hooks_.number(parse_rational(num));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t p = pos_;
      std::string name = identifier_at(p);
      // jet atom: "d" or "d<k>" followed by whitespace and an identifier
      if (name[0] == 'd' && name.find_first_not_of("0123456789", 1) == std::string::npos) {
        std::size_t q = p;
        while (q < s_.size() && std::isspace(static_cast<unsigned char>(s_[q]))) ++q;
        if (q > p) {
          std::string target = identifier_at(q);
          if (!target.empty()) {
            if (!hooks_.jet) fail("jet variable '" + name + " " + target + "' not allowed in a polynomial");
            int order = name.size() == 1 ? 1 : std::stoi(name.substr(1));
            if (order < 1) fail("jet order must be >= 1");
            pos_ = q;
            return hooks_.jet(order, target);
          }
        }
      }
      pos_ = p;
      return hooks_.identifier(name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  const ParseHooks<R>& hooks_;
};

}  // namespace detail

template <class R>
R parse_expression(std::string_view text, const ParseHooks<R>& hooks) {
  return detail::ExpressionParser<R>(text, hooks).parse();
}

/// Coefficient conversions from literal text into each field.
template <class F>
struct LiteralConverter;

template <>
struct LiteralConverter<Rational> {
  static Rational number(const Rational& q, mpfr_prec_t) { return q; }
  static Rational complex(const std::string& re, const std::string& im, mpfr_prec_t) {
    Rational i = parse_rational(im);
    if (!is_zero(i)) throw Error("coefficient-field mismatch: complex literal (" + re + "," + im + ") in a rational polynomial");
    return parse_rational(re);
  }
};

template <>
struct LiteralConverter<GaussianRational> {
  static GaussianRational number(const Rational& q, mpfr_prec_t) { return GaussianRational(q); }
  static GaussianRational complex(const std::string& re, const std::string& im, mpfr_prec_t) {
    return {parse_rational(re), parse_rational(im)};
  }
};

template <>
struct LiteralConverter<ComplexBall> {
  static ComplexBall number(const Rational& q, mpfr_prec_t prec) { return ComplexBall(q, prec); }
  static ComplexBall complex(const std::string& re, const std::string& im, mpfr_prec_t prec) {
    if (re.find('/') != std::string::npos || im.find('/') != std::string::npos)
      return ComplexBall(parse_rational(re), parse_rational(im), prec);
    return ComplexBall::from_decimal(re, im, prec);
  }
};

template <CoefficientField F>
Polynomial<F> parse_polynomial(std::string_view text, mpfr_prec_t prec = ComplexBall::kDefaultPrec) {
  using P = Polynomial<F>;
  ParseHooks<P> hooks;
  hooks.number = [prec](const Rational& q) { return P::constant(LiteralConverter<F>::number(q, prec)); };
  hooks.complex_literal = [prec](const std::string& re, const std::string& im) {
    return P::constant(LiteralConverter<F>::complex(re, im, prec));
  };
  hooks.identifier = [](const std::string& name) { return P::variable(name); };
  return parse_expression<P>(text, hooks);
}

/// Parses into the rational field unless a complex literal with nonzero
/// imaginary part or decimal ball center forces the ball field.
inline AnyPolynomial parse_any_polynomial(std::string_view text, mpfr_prec_t prec = ComplexBall::kDefaultPrec) {
  try {
    return parse_polynomial<Rational>(text, prec);
  } catch (const Error& e) {
    if (std::string(e.what()).find("coefficient-field mismatch") == std::string::npos) throw;
  }
  return parse_polynomial<ComplexBall>(text, prec);
}

}  // namespace hypcert
