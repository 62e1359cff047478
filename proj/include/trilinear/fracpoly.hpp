#pragma once

#include "trilinear/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trilinear {

/// Coordinate systems in which the phase derivative is inspected:
/// (x, y), (x, x+y) and (y, x+y).
enum class Frame { XY, X_XPY, Y_XPY };

inline const char *frame_name(Frame f) {
  switch (f) {
    case Frame::XY: return "xy";
    case Frame::X_XPY: return "x,x+y";
    case Frame::Y_XPY: return "y,x+y";
  }
  return "?";
}

struct Monomial {
  Rational coeff;
  Exponent ex;
  Exponent ey;
};

/// Finite sum of c * x^ex * y^ey with rational c != 0 and rational ex, ey >= 0.
/// Terms are kept merged and zero-free after every mutation.
class FracPoly {
 public:
  using Key = std::pair<Exponent, Exponent>;
  using Terms = std::map<Key, Rational>;

  FracPoly() = default;

  static FracPoly constant(const Rational &c) { return monomial(c, 0, 0); }

  static FracPoly monomial(const Rational &c, Exponent ex, Exponent ey) {
    FracPoly p;
    p.add_term(c, ex, ey);
    return p;
  }

  static FracPoly x(Exponent e = 1) { return monomial(1, e, 0); }
  static FracPoly y(Exponent e = 1) { return monomial(1, 0, e); }

  void add_term(const Rational &c, Exponent ex, Exponent ey) {
    if (ex < Exponent(0) || ey < Exponent(0)) throw std::domain_error("negative exponent in polynomial term");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(Key{ex, ey}, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const Terms &terms() const { return terms_; }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  Rational coeff(Exponent ex, Exponent ey) const {
    auto it = terms_.find(Key{ex, ey});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  std::vector<Monomial> monomials() const {
    std::vector<Monomial> out;
    out.reserve(terms_.size());
    for (const auto &[k, c] : terms_) out.push_back({c, k.first, k.second});
    return out;
  }

  bool has_integer_exponents() const {
    for (const auto &[k, c] : terms_)
      if (!is_integer(k.first) || !is_integer(k.second)) return false;
    return true;
  }

  bool has_integer_y_exponents() const {
    for (const auto &[k, c] : terms_)
      if (!is_integer(k.second)) return false;
    return true;
  }

  /// Least common denominator of all exponents (1 for ordinary polynomials).
  std::int64_t common_denominator() const {
    std::int64_t d = 1;
    for (const auto &[k, c] : terms_) d = lcm64(lcm64(d, k.first.denominator()), k.second.denominator());
    return d;
  }

  FracPoly &operator+=(const FracPoly &o) {
    for (const auto &[k, c] : o.terms_) add_term(c, k.first, k.second);
    return *this;
  }
  FracPoly &operator-=(const FracPoly &o) {
    for (const auto &[k, c] : o.terms_) add_term(-c, k.first, k.second);
    return *this;
  }
  FracPoly &operator*=(const Rational &s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto &[k, c] : terms_) c *= s;
    return *this;
  }

  friend FracPoly operator+(FracPoly a, const FracPoly &b) { return a += b; }
  friend FracPoly operator-(FracPoly a, const FracPoly &b) { return a -= b; }
  friend FracPoly operator*(FracPoly a, const Rational &s) { return a *= s; }
  friend FracPoly operator*(const Rational &s, FracPoly a) { return a *= s; }
  friend FracPoly operator-(FracPoly a) { return a *= Rational(-1); }

  friend FracPoly operator*(const FracPoly &a, const FracPoly &b) {
    FracPoly out;
    for (const auto &[ka, ca] : a.terms_)
      for (const auto &[kb, cb] : b.terms_) out.add_term(ca * cb, ka.first + kb.first, ka.second + kb.second);
    return out;
  }

  FracPoly pow(unsigned k) const {
    FracPoly result = constant(1), base = *this;
    while (k) {
      if (k & 1u) result = result * base;
      k >>= 1u;
      if (k) base = base * base;
    }
    return result;
  }

  friend bool operator==(const FracPoly &a, const FracPoly &b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const FracPoly &a, const FracPoly &b) { return !(a == b); }

 private:
  Terms terms_;
};

// ---------------------------------------------------------------------------
// Parsing and formatting

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string &msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

namespace detail {

class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : s_(text) {}

  FracPoly parse() {
    skip_ws();
    if (at_end()) throw ParseError("empty expression", pos_);
    FracPoly p = expr();
    skip_ws();
    if (!at_end()) throw ParseError(std::string("unexpected character '") + s_[pos_] + "'", pos_);
    return p;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int depth_ = 0;

  bool at_end() const { return pos_ >= s_.size(); }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return at_end() ? '\0' : s_[pos_];
  }

  FracPoly expr() {
    FracPoly acc = signed_term();
    for (;;) {
      char c = peek();
      if (c != '+' && c != '-') break;
      ++pos_;
      FracPoly t = signed_term();
      if (c == '+')
        acc += t;
      else
        acc -= t;
    }
    return acc;
  }

  FracPoly signed_term() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      return -term();
    }
    if (c == '+') {
      ++pos_;
      return term();
    }
    return term();
  }

  FracPoly term() {
    FracPoly acc = factor();
    while (peek() == '*') {
      ++pos_;
      acc = acc * factor();
    }
    return acc;
  }

  BigInt integer() {
    skip_ws();
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected integer", start);
    return BigInt(std::string(s_.substr(start, pos_ - start)));
  }

  Rational fraction() {
    std::size_t start = pos_;
    BigInt num = integer();
    if (peek() == '/') {
      ++pos_;
      std::size_t dpos = pos_;
      BigInt den = integer();
      if (den == 0) throw ParseError("zero denominator", dpos);
      return Rational(num, den);
    }
    (void)start;
    return Rational(num);
  }

  Exponent exponent() {
    std::size_t start = (skip_ws(), pos_);
    if (peek() == '-') throw ParseError("negative exponent", start);
    Rational e = fraction();
    try {
      return to_exponent(e);
    } catch (const std::overflow_error &) {
      throw ParseError("exponent too large", start);
    }
  }

  FracPoly factor() {
    char c = peek();
    std::size_t start = pos_;
    if (std::isdigit(static_cast<unsigned char>(c))) return FracPoly::constant(fraction());
    if (c == 'x' || c == 'y') {
      ++pos_;
      Exponent e = 1;
      if (peek() == '^') {
        ++pos_;
        e = exponent();
      }
      return c == 'x' ? FracPoly::x(e) : FracPoly::y(e);
    }
    if (c == '(') {
      if (++depth_ > 64) throw ParseError("nesting too deep", start);
      ++pos_;
      FracPoly inner = expr();
      if (peek() != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
      --depth_;
      if (peek() == '^') {
        ++pos_;
        std::size_t epos = (skip_ws(), pos_);
        Exponent e = exponent();
        if (!is_integer(e)) throw ParseError("group exponent must be an integer", epos);
        if (e.numerator() > 256) throw ParseError("group exponent too large", epos);
        return inner.pow(static_cast<unsigned>(e.numerator()));
      }
      return inner;
    }
    if (at_end()) throw ParseError("unexpected end of input", pos_);
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }
};

inline std::string exponent_text(const Exponent &e) {
  if (is_integer(e)) return std::to_string(e.numerator());
  return std::to_string(e.numerator()) + "/" + std::to_string(e.denominator());
}

}  // namespace detail

/// Grammar: expr := term (('+'|'-') term)*; term := factor ('*' factor)*;
/// factor := coeff | var ('^' exponent)? | '(' expr ')' ('^' integer)?
inline FracPoly parse_poly(std::string_view text) { return detail::PolyParser(text).parse(); }

/// Canonical text form; parse_poly(format_poly(p)) == p.
inline std::string format_poly(const FracPoly &p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto &[k, c] = *it;
    Rational mag = abs(c);
    bool neg = c < 0;
    if (first)
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    first = false;
    std::vector<std::string> factors;
    bool unit = (mag == 1);
    if (!unit || (k.first == Exponent(0) && k.second == Exponent(0))) {
      if (denominator(mag) == 1)
        factors.push_back(numerator(mag).str());
      else
        factors.push_back(numerator(mag).str() + "/" + denominator(mag).str());
    }
    if (k.first != Exponent(0)) factors.push_back(k.first == Exponent(1) ? "x" : "x^" + detail::exponent_text(k.first));
    if (k.second != Exponent(0)) factors.push_back(k.second == Exponent(1) ? "y" : "y^" + detail::exponent_text(k.second));
    for (std::size_t i = 0; i < factors.size(); ++i) out += (i ? "*" : "") + factors[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calculus and substitutions

/// k-th partial derivative in x. Throws std::domain_error when a nonzero term
/// would acquire a negative exponent.
inline FracPoly derivative_x(const FracPoly &p, unsigned k = 1) {
  FracPoly out;
  for (const auto &[key, c] : p) {
    Rational coeff = c;
    Exponent e = key.first;
    bool vanished = false;
    for (unsigned i = 0; i < k; ++i) {
      if (e == Exponent(0)) {
        vanished = true;
        break;
      }
      coeff *= to_rational(e);
      e -= 1;
    }
    if (vanished) continue;
    if (e < Exponent(0)) throw std::domain_error("derivative produces a negative exponent");
    out.add_term(coeff, e, key.second);
  }
  return out;
}

inline FracPoly derivative_y(const FracPoly &p, unsigned k = 1) {
  FracPoly out;
  for (const auto &[key, c] : p) {
    Rational coeff = c;
    Exponent e = key.second;
    bool vanished = false;
    for (unsigned i = 0; i < k; ++i) {
      if (e == Exponent(0)) {
        vanished = true;
        break;
      }
      coeff *= to_rational(e);
      e -= 1;
    }
    if (vanished) continue;
    if (e < Exponent(0)) throw std::domain_error("derivative produces a negative exponent");
    out.add_term(coeff, key.first, e);
  }
  return out;
}

/// D = d/dx d/dy (d/dx - d/dy). Only defined for integer exponents.
inline FracPoly apply_D(const FracPoly &s) {
  if (!s.has_integer_exponents()) throw std::invalid_argument("apply_D requires integer exponents");
  FracPoly sxy = derivative_y(derivative_x(s));
  return derivative_x(sxy) - derivative_y(sxy);
}

namespace detail {

/// Row n of Pascal's triangle.
inline std::vector<BigInt> binomial_row(std::int64_t n) {
  std::vector<BigInt> row(static_cast<std::size_t>(n) + 1);
  row[0] = 1;
  for (std::int64_t k = 1; k <= n; ++k) row[k] = row[k - 1] * (n - k + 1) / k;
  return row;
}

}  // namespace detail

/// P(x, x^m (r + y)), expanded. The y-exponents must be integers unless r == 0.
inline FracPoly substitute_branch(const FracPoly &p, const Rational &r, const Exponent &m) {
  if (m <= Exponent(0)) throw std::invalid_argument("substitute_branch requires m > 0");
  FracPoly out;
  for (const auto &[key, c] : p) {
    const auto &[ex, ey] = key;
    Exponent shifted = ex + m * ey;
    if (r == 0) {
      out.add_term(c, shifted, ey);
      continue;
    }
    if (!is_integer(ey)) throw std::invalid_argument("substitute_branch: fractional y-exponent with r != 0");
    std::int64_t q = ey.numerator();
    auto row = detail::binomial_row(q);
    // (r + y)^q = sum_k C(q,k) r^(q-k) y^k
    Rational rpow = 1;
    std::vector<Rational> rpows(static_cast<std::size_t>(q) + 1);
    for (std::int64_t j = 0; j <= q; ++j) {
      rpows[j] = rpow;
      rpow *= r;
    }
    for (std::int64_t k = 0; k <= q; ++k) out.add_term(c * Rational(row[k]) * rpows[q - k], shifted, k);
  }
  return out;
}

namespace detail {

/// Expands c * u^a * (v - u)^b  (a, b nonneg integers) into out.
inline void add_shifted_power(FracPoly &out, const Rational &c, std::int64_t a, std::int64_t b) {
  auto row = binomial_row(b);
  for (std::int64_t k = 0; k <= b; ++k) {
    Rational coeff = c * Rational(row[k]);
    if ((b - k) % 2) coeff = -coeff;
    out.add_term(coeff, a + (b - k), k);  // C(b,k) v^k (-u)^(b-k)
  }
}

/// Expands c * u^a * (u + v)^b into out (a, b nonneg integers).
inline void add_sum_power(FracPoly &out, const Rational &c, std::int64_t a, std::int64_t b) {
  auto row = binomial_row(b);
  for (std::int64_t k = 0; k <= b; ++k) out.add_term(c * Rational(row[k]), a + (b - k), k);
}

}  // namespace detail

/// Rewrites P in the coordinates of the frame: X_XPY gives Q(u,v) = P(u, v-u),
/// Y_XPY gives Q(u,v) = P(v-u, u).
inline FracPoly reframe(const FracPoly &p, Frame f) {
  if (f == Frame::XY) return p;
  if (!p.has_integer_exponents()) throw std::invalid_argument("reframe requires integer exponents");
  FracPoly out;
  for (const auto &[key, c] : p) {
    std::int64_t a = key.first.numerator(), b = key.second.numerator();
    if (f == Frame::X_XPY)
      detail::add_shifted_power(out, c, a, b);  // u^a (v-u)^b
    else
      detail::add_shifted_power(out, c, b, a);  // (v-u)^a u^b
  }
  return out;
}

/// Inverse of reframe: recovers P(x,y) from Q = reframe(P, f).
inline FracPoly unframe(const FracPoly &q, Frame f) {
  if (f == Frame::XY) return q;
  if (!q.has_integer_exponents()) throw std::invalid_argument("unframe requires integer exponents");
  FracPoly out;
  for (const auto &[key, c] : q) {
    std::int64_t a = key.first.numerator(), b = key.second.numerator();
    if (f == Frame::X_XPY) {
      detail::add_sum_power(out, c, a, b);  // x^a (x+y)^b
    } else {
      // y^a (x+y)^b
      auto row = detail::binomial_row(b);
      for (std::int64_t k = 0; k <= b; ++k) out.add_term(c * Rational(row[k]), b - k, a + k);
    }
  }
  return out;
}

inline FracPoly swap_xy(const FracPoly &p) {
  FracPoly out;
  for (const auto &[key, c] : p) out.add_term(c, key.second, key.first);
  return out;
}

/// P(-x, y); requires integer x-exponents.
inline FracPoly reflect_x(const FracPoly &p) {
  FracPoly out;
  for (const auto &[key, c] : p) {
    if (!is_integer(key.first)) throw std::invalid_argument("reflect_x requires integer x-exponents");
    out.add_term(key.first.numerator() % 2 ? -c : c, key.first, key.second);
  }
  return out;
}

struct LowestPart {
  Exponent degree;
  FracPoly part;
};

/// Lowest total-degree homogeneous part.
inline LowestPart lowest_part(const FracPoly &p) {
  if (p.is_zero()) throw std::invalid_argument("lowest_part of the zero polynomial");
  Exponent best = p.begin()->first.first + p.begin()->first.second;
  for (const auto &[key, c] : p) best = std::min(best, key.first + key.second);
  FracPoly h;
  for (const auto &[key, c] : p)
    if (key.first + key.second == best) h.add_term(c, key.first, key.second);
  return {best, h};
}

inline bool is_homogeneous(const FracPoly &p) {
  if (p.is_zero()) return true;
  Exponent d = p.begin()->first.first + p.begin()->first.second;
  for (const auto &[key, c] : p)
    if (key.first + key.second != d) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Floating evaluation

namespace detail {

inline long double int_pow(long double b, std::int64_t e) {
  long double r = 1.0L;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

inline long double real_pow(long double b, const Exponent &e) {
  if (is_integer(e)) {
    std::int64_t n = e.numerator();
    return n >= 0 ? int_pow(b, n) : 1.0L / int_pow(b, -n);
  }
  if (b < 0) throw std::domain_error("fractional power of a negative number");
  return std::pow(b, to_ld(e));
}

/// Falling factorial e (e-1) ... (e-k+1), and whether the term vanishes identically.
inline std::pair<long double, bool> falling(const Exponent &e, int k) {
  long double f = 1.0L;
  Exponent cur = e;
  for (int i = 0; i < k; ++i) {
    if (cur == Exponent(0)) return {0.0L, true};
    f *= to_ld(cur);
    cur -= 1;
  }
  return {f, false};
}

}  // namespace detail

/// Numeric snapshot of a FracPoly for repeated evaluation in hot loops.
/// Coefficients and exponents are converted once to long double.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const FracPoly &p) {
    terms_.reserve(p.size());
    for (const auto &[key, c] : p) terms_.push_back({to_ld(c), key.first, key.second});
  }

  bool empty() const { return terms_.empty(); }

  long double operator()(long double x, long double y) const {
    long double s = 0.0L;
    for (const auto &t : terms_) s += t.c * detail::real_pow(x, t.ex) * detail::real_pow(y, t.ey);
    return s;
  }

  /// Sum of |term| at (x, y); the natural scale for rounding-error bounds.
  long double magnitude(long double x, long double y) const {
    long double s = 0.0L;
    for (const auto &t : terms_) s += std::fabs(t.c * detail::real_pow(x, t.ex) * detail::real_pow(y, t.ey));
    return s;
  }

  /// d^a/dx^a d^b/dy^b evaluated termwise. Negative fractional powers are
  /// allowed here (x > 0), so this works for iterated coordinates.
  long double derivative(int a, int b, long double x, long double y) const {
    long double s = 0.0L;
    for (const auto &t : terms_) {
      auto [fx, zx] = detail::falling(t.ex, a);
      if (zx) continue;
      auto [fy, zy] = detail::falling(t.ey, b);
      if (zy) continue;
      s += t.c * fx * fy * detail::real_pow(x, t.ex - a) * detail::real_pow(y, t.ey - b);
    }
    return s;
  }

 private:
  struct Term {
    long double c;
    Exponent ex, ey;
  };
  std::vector<Term> terms_;
};

/// Evaluates P at (x, y) in extended precision. Throws std::domain_error for
/// x < 0 when some x-exponent is fractional (likewise for y).
inline long double eval(const FracPoly &p, long double x, long double y) { return CompiledPoly(p)(x, y); }

}  // namespace trilinear
