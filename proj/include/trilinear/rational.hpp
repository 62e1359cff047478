#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace trilinear {

/// Arbitrary-precision rational used for every coefficient.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exponents stay small, so a machine-word rational is enough for them.
using Exponent = boost::rational<std::int64_t>;

inline Rational make_rational(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

inline Rational to_rational(const Exponent &e) { return make_rational(e.numerator(), e.denominator()); }

inline bool is_integer(const Exponent &e) { return e.denominator() == 1; }
inline bool is_integer(const Rational &r) { return denominator(r) == 1; }

inline long double to_ld(const Exponent &e) {
  return static_cast<long double>(e.numerator()) / static_cast<long double>(e.denominator());
}

inline long double to_ld(const Rational &r) {
  // cpp_rational converts through its own long double path; fine for evaluation.
  return r.convert_to<long double>();
}

/// "a/b" form used by every serialized exact value (integers become "a/1").
inline std::string fraction_string(const Rational &r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline std::string fraction_string(const Exponent &e) {
  return std::to_string(e.numerator()) + "/" + std::to_string(e.denominator());
}

/// Parses "a/b" or "a" into an exact rational; throws std::invalid_argument.
inline Rational parse_rational(const std::string &text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rational(num, den);
  } catch (const std::runtime_error &) {
    throw std::invalid_argument("not a rational: '" + text + "'");
  }
}

inline Exponent to_exponent(const Rational &r) {
  BigInt n = numerator(r), d = denominator(r);
  if (abs(n) > BigInt(std::numeric_limits<std::int64_t>::max()) ||
      d > BigInt(std::numeric_limits<std::int64_t>::max()))
    throw std::overflow_error("exponent out of machine range");
  return Exponent(n.convert_to<std::int64_t>(), d.convert_to<std::int64_t>());
}

inline std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace trilinear
