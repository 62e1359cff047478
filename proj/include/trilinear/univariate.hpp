#pragma once

#include "trilinear/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace trilinear {

/// Dense univariate polynomial over Q; c[i] multiplies t^i. Always trimmed.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

  static UPoly monomial(const Rational &a, std::size_t deg) {
    std::vector<Rational> c(deg + 1);
    c[deg] = a;
    return UPoly(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  /// Degree; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Rational> &coeffs() const { return c_; }
  const Rational &operator[](std::size_t i) const { return c_[i]; }
  Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }

  /// Multiplicity of t = 0.
  unsigned order_at_zero() const {
    unsigned k = 0;
    while (k < c_.size() && c_[k] == 0) ++k;
    return k;
  }

  UPoly shift_down(unsigned k) const {
    if (k >= c_.size()) return {};
    return UPoly(std::vector<Rational>(c_.begin() + k, c_.end()));
  }

  Rational operator()(const Rational &t) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  int sign_at(const Rational &t) const {
    Rational v = (*this)(t);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
  }

  UPoly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long long>(i);
    return UPoly(std::move(d));
  }

  UPoly monic() const {
    if (is_zero()) return {};
    UPoly r = *this;
    Rational l = lead();
    for (auto &x : r.c_) x /= l;
    return r;
  }

  friend UPoly operator*(const UPoly &a, const UPoly &b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(c));
  }

  friend UPoly operator-(const UPoly &a, const UPoly &b) {
    std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return UPoly(std::move(c));
  }

  friend bool operator==(const UPoly &a, const UPoly &b) { return a.c_ == b.c_; }

  /// Euclidean division: a = q*b + r with deg r < deg b.
  friend std::pair<UPoly, UPoly> divmod(const UPoly &a, const UPoly &b) {
    if (b.is_zero()) throw std::domain_error("division by zero polynomial");
    if (a.degree() < b.degree()) return {UPoly(), a};
    std::vector<Rational> r = a.c_, q(a.c_.size() - b.c_.size() + 1);
    const Rational &lb = b.c_.back();
    for (int i = a.degree() - b.degree(); i >= 0; --i) {
      Rational f = r[i + b.degree()] / lb;
      q[i] = f;
      if (f == 0) continue;
      for (int j = 0; j <= b.degree(); ++j) r[i + j] -= f * b.c_[j];
    }
    r.resize(b.c_.size() - 1);
    return {UPoly(std::move(q)), UPoly(std::move(r))};
  }

 private:
  std::vector<Rational> c_;
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
};

/// Monic gcd (zero only if both inputs are zero).
inline UPoly gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    UPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Exact quotient; throws if b does not divide a.
inline UPoly exact_div(const UPoly &a, const UPoly &b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw std::domain_error("inexact polynomial division");
  return q;
}

/// Yun's algorithm: f = lead * prod_i g_i^i with g_i monic, squarefree and
/// pairwise coprime. Returns (g_i, i) for non-constant g_i.
inline std::vector<std::pair<UPoly, unsigned>> squarefree_decomposition(const UPoly &f) {
  std::vector<std::pair<UPoly, unsigned>> out;
  if (f.degree() <= 0) return out;
  UPoly fp = f.derivative();
  UPoly a = gcd(f, fp);
  UPoly b = exact_div(f, a);
  UPoly c = exact_div(fp, a);
  UPoly d = c - b.derivative();
  unsigned i = 1;
  while (b.degree() > 0) {
    UPoly g = gcd(b, d);
    if (g.degree() > 0) out.emplace_back(g.monic(), i);
    b = exact_div(b, g);
    c = exact_div(d, g);
    d = c - b.derivative();
    ++i;
  }
  return out;
}

/// Sturm sequence of a squarefree polynomial.
class SturmChain {
 public:
  explicit SturmChain(const UPoly &p) {
    seq_.push_back(p);
    if (p.degree() <= 0) return;
    seq_.push_back(p.derivative());
    while (seq_.back().degree() > 0) {
      UPoly r = divmod(seq_[seq_.size() - 2], seq_.back()).second;
      if (r.is_zero()) break;
      seq_.push_back(UPoly() - r);
    }
  }

  int variations(const Rational &t) const {
    int count = 0, last = 0;
    for (const auto &p : seq_) {
      int s = p.sign_at(t);
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  }

  /// Distinct real roots in the half-open interval (a, b].
  int count(const Rational &a, const Rational &b) const { return variations(a) - variations(b); }

 private:
  std::vector<UPoly> seq_;
};

/// One distinct real root: exact when `exact`, else isolated in (lo, hi) with
/// lo < root < hi and `factor` (squarefree) changing sign on the interval.
struct RealRoot {
  Rational lo, hi;
  bool exact = false;
  unsigned multiplicity = 1;
  UPoly factor;

  Rational value() const {
    if (!exact) throw std::logic_error("irrational root has no exact value");
    return lo;
  }
  long double approx() const { return exact ? to_ld(lo) : (to_ld(lo) + to_ld(hi)) / 2; }
  Rational width() const { return hi - lo; }
  bool contains(const Rational &t) const { return exact ? t == lo : (lo < t && t < hi); }
};

/// Halves the isolating interval until its width is at most `width`.
inline void refine(RealRoot &r, const Rational &width) {
  if (r.exact) return;
  // lo may be a root of the factor (the open end of an isolating interval);
  // hi never is, so it carries the reference sign.
  int shi = r.factor.sign_at(r.hi);
  while (r.hi - r.lo > width) {
    Rational mid = (r.lo + r.hi) / 2;
    int s = r.factor.sign_at(mid);
    if (s == 0) {
      r.lo = r.hi = mid;
      r.exact = true;
      return;
    }
    if (s == shi)
      r.hi = mid;
    else
      r.lo = mid;
  }
}

struct RootList {
  /// Nonzero real roots, ascending.
  std::vector<RealRoot> roots;
  unsigned zero_multiplicity = 0;
  /// Number of non-real roots counted with multiplicity.
  unsigned complex_degree = 0;
  /// Largest multiplicity of a non-real root (0 if none).
  unsigned max_complex_multiplicity = 0;

  unsigned max_real_multiplicity() const {
    unsigned m = 0;
    for (const auto &r : roots) m = std::max(m, r.multiplicity);
    return m;
  }
  bool all_rational() const {
    return std::all_of(roots.begin(), roots.end(), [](const RealRoot &r) { return r.exact; });
  }
  /// Multiplicity of an exact value among the nonzero roots (0 if absent).
  unsigned multiplicity_of(const Rational &t) const {
    for (const auto &r : roots)
      if (r.exact && r.lo == t) return r.multiplicity;
    return 0;
  }
};

namespace detail {

inline Rational cauchy_bound(const UPoly &p) {
  Rational m = 0;
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, Rational(abs(p[i] / p.lead())));
  return m + 1;
}

/// Smallest positive common denominator making every coefficient integral,
/// times the leading coefficient: all rational roots lie in (1/result) Z.
inline BigInt rational_root_lattice(const UPoly &p) {
  BigInt den = 1;
  for (const auto &c : p.coeffs()) den = lcm(den, denominator(c));
  BigInt lead = abs(numerator(p.lead() * Rational(den)));
  return lead;
}

inline void isolate(const UPoly &g, const SturmChain &sc, const Rational &a, const Rational &b, int n,
                    std::vector<RealRoot> &out) {
  // invariant: exactly n roots in (a, b]
  if (n == 0) return;
  if (g.sign_at(b) == 0 && n == 1) {
    out.push_back({b, b, true, 1, g});
    return;
  }
  if (n == 1) {
    out.push_back({a, b, false, 1, g});
    return;
  }
  Rational mid = (a + b) / 2;
  int left = sc.count(a, mid);
  isolate(g, sc, a, mid, left, out);
  isolate(g, sc, mid, b, n - left, out);
}

/// If the isolated root of the squarefree factor is rational, make it exact.
inline void settle_rational(RealRoot &r) {
  if (r.exact) return;
  BigInt L = rational_root_lattice(r.factor);
  Rational step = Rational(1) / Rational(L);
  refine(r, step / 2);
  if (r.exact) return;
  // At most one lattice point t/L lies inside an interval narrower than 1/L.
  Rational mid = (r.lo + r.hi) / 2 * Rational(L);
  BigInt t = numerator(mid) / denominator(mid);  // truncation toward zero
  for (BigInt cand : {BigInt(t - 1), t, BigInt(t + 1)}) {
    Rational v = Rational(cand) / Rational(L);
    if (r.lo < v && v < r.hi && r.factor.sign_at(v) == 0) {
      r.lo = r.hi = v;
      r.exact = true;
      return;
    }
  }
  // Closed endpoints may coincide with the lattice point.
  if (r.factor.sign_at(r.hi) == 0) {
    r.lo = r.hi;
    r.exact = true;
  }
}

}  // namespace detail

inline Rational default_isolation_width() { return Rational(BigInt(1), BigInt(1) << 64); }

/// Real roots of q with exact multiplicities. Multiplicities come from the
/// squarefree decomposition only; isolation never affects them.
inline RootList roots_with_multiplicity(const UPoly &q, const Rational &isolation_width = default_isolation_width()) {
  if (q.is_zero()) throw std::invalid_argument("roots of the zero polynomial");
  RootList out;
  out.zero_multiplicity = q.order_at_zero();
  UPoly p = q.shift_down(out.zero_multiplicity);
  for (auto &[g, mult] : squarefree_decomposition(p)) {
    SturmChain sc(g);
    Rational B = detail::cauchy_bound(g);
    int n = sc.count(-B, B);
    std::vector<RealRoot> found;
    detail::isolate(g, sc, -B, B, n, found);
    for (auto &r : found) {
      r.multiplicity = mult;
      detail::settle_rational(r);
      refine(r, isolation_width);
      out.roots.push_back(std::move(r));
    }
    unsigned cdeg = static_cast<unsigned>(g.degree() - n);
    out.complex_degree += cdeg * mult;
    if (cdeg > 0) out.max_complex_multiplicity = std::max(out.max_complex_multiplicity, mult);
  }
  auto mid = [](const RealRoot &r) { return (r.lo + r.hi) / 2; };
  std::sort(out.roots.begin(), out.roots.end(), [&](const RealRoot &a, const RealRoot &b) { return mid(a) < mid(b); });
  // Roots of different factors are distinct, so refining separates any overlap.
  for (bool again = true; again;) {
    again = false;
    for (std::size_t i = 0; i + 1 < out.roots.size(); ++i) {
      RealRoot &a = out.roots[i], &b = out.roots[i + 1];
      if (a.hi < b.lo || (a.exact && b.exact) || (a.exact && a.lo <= b.lo) || (b.exact && a.hi <= b.lo)) continue;
      refine(a, a.width() / 2);
      refine(b, b.width() / 2);
      again = true;
    }
  }
  return out;
}

}  // namespace trilinear
