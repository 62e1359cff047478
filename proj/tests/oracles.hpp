#pragma once

// Brute-force reference implementations for the tests. They share nothing with
// the library except the Rational type: polynomials are plain maps over
// integer exponent pairs, and hulls and roots are found by enumeration.

#include "trilinear/fracpoly.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using trilinear::BigInt;
using trilinear::Rational;
using Dense = std::map<std::pair<int, int>, Rational>;

inline void add(Dense &p, int a, int b, const Rational &c) {
  if (c == 0) return;
  Rational &slot = p[{a, b}];
  slot += c;
  if (slot == 0) p.erase({a, b});
}

inline Dense mul(const Dense &a, const Dense &b) {
  Dense out;
  for (const auto &[ka, ca] : a)
    for (const auto &[kb, cb] : b) add(out, ka.first + kb.first, ka.second + kb.second, ca * cb);
  return out;
}

inline Dense power(const Dense &a, int k) {
  Dense out{{{0, 0}, Rational(1)}};
  for (int i = 0; i < k; ++i) out = mul(out, a);
  return out;
}

inline Dense from(const trilinear::FracPoly &p) {
  Dense out;
  for (const auto &[k, c] : p) {
    if (k.first.denominator() != 1 || k.second.denominator() != 1) throw std::invalid_argument("oracle: integer exponents only");
    add(out, static_cast<int>(k.first.numerator()), static_cast<int>(k.second.numerator()), c);
  }
  return out;
}

inline bool same(const Dense &d, const trilinear::FracPoly &p) { return d == from(p); }

inline Dense dx(const Dense &p) {
  Dense out;
  for (const auto &[k, c] : p)
    if (k.first > 0) add(out, k.first - 1, k.second, c * k.first);
  return out;
}

inline Dense dy(const Dense &p) {
  Dense out;
  for (const auto &[k, c] : p)
    if (k.second > 0) add(out, k.first, k.second - 1, c * k.second);
  return out;
}

/// D S = S_xxy - S_xyy, term by term.
inline Dense D(const Dense &s) {
  Dense a = dx(dx(dy(s))), b = dx(dy(dy(s)));
  for (const auto &[k, c] : b) add(a, k.first, k.second, -c);
  return a;
}

/// P(u, v - u) and P(v - u, u) by substituting and multiplying out.
inline Dense frame_x_xpy(const Dense &p) {
  const Dense u{{{1, 0}, Rational(1)}}, vmu{{{0, 1}, Rational(1)}, {{1, 0}, Rational(-1)}};
  Dense out;
  for (const auto &[k, c] : p)
    for (const auto &[kk, cc] : mul(power(u, k.first), power(vmu, k.second))) add(out, kk.first, kk.second, c * cc);
  return out;
}

inline Dense frame_y_xpy(const Dense &p) {
  const Dense u{{{1, 0}, Rational(1)}}, vmu{{{0, 1}, Rational(1)}, {{1, 0}, Rational(-1)}};
  Dense out;
  for (const auto &[k, c] : p)
    for (const auto &[kk, cc] : mul(power(vmu, k.first), power(u, k.second))) add(out, kk.first, kk.second, c * cc);
  return out;
}

// ---------------------------------------------------------------------------
// Newton polygon by enumeration

using Pt = std::pair<std::int64_t, std::int64_t>;

/// Vertices of the Newton polygon of a support given as lattice points:
/// minimal points of the staircase that lie strictly below every chord of
/// two other minimal points spanning them.
inline std::vector<Pt> hull_vertices(const std::vector<Pt> &support) {
  std::vector<Pt> minimal;
  for (const auto &a : support) {
    bool dominated = false;
    for (const auto &b : support)
      if (b != a && b.first <= a.first && b.second <= a.second) dominated = true;
    if (!dominated) minimal.push_back(a);
  }
  std::sort(minimal.begin(), minimal.end());
  minimal.erase(std::unique(minimal.begin(), minimal.end()), minimal.end());
  std::vector<Pt> out;
  for (const auto &v : minimal) {
    bool inside = false;
    for (const auto &a : minimal)
      for (const auto &b : minimal) {
        if (!(a.first < v.first && v.first < b.first)) continue;
        // v on or above the chord a-b?
        __int128 cross = (__int128)(b.first - a.first) * (v.second - a.second) -
                         (__int128)(b.second - a.second) * (v.first - a.first);
        if (cross >= 0) inside = true;
      }
    if (!inside) out.push_back(v);
  }
  return out;
}

inline std::vector<Pt> support(const Dense &p) {
  std::vector<Pt> s;
  for (const auto &[k, c] : p) s.push_back({k.first, k.second});
  return s;
}

// ---------------------------------------------------------------------------
// Rational roots by the rational root theorem

inline std::vector<BigInt> divisors(BigInt n) {
  if (n < 0) n = -n;
  std::vector<BigInt> out;
  for (BigInt d = 1; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  return out;
}

inline Rational value(const std::vector<Rational> &c, const Rational &t) {
  Rational acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

/// c(t) / (t - r), exact; c(r) must vanish.
inline std::vector<Rational> deflate(const std::vector<Rational> &c, const Rational &r) {
  std::vector<Rational> q(c.size() - 1);
  Rational carry = 0;
  for (std::size_t i = c.size() - 1; i >= 1; --i) {
    carry = c[i] + carry * r;
    q[i - 1] = carry;
  }
  return q;
}

/// Nonzero rational roots with multiplicities (the zero root is divided out).
inline std::map<Rational, unsigned> rational_roots(std::vector<Rational> c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
  std::size_t z = 0;
  while (z < c.size() && c[z] == 0) ++z;
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(z));
  std::map<Rational, unsigned> out;
  if (c.size() <= 1) return out;
  BigInt l = 1;
  for (const auto &v : c) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(v));
  std::vector<BigInt> ic;
  for (const auto &v : c) ic.push_back(boost::multiprecision::numerator(v * Rational(l)));
  for (const auto &p : divisors(ic.front()))
    for (const auto &q : divisors(ic.back()))
      for (int s : {1, -1}) {
        Rational t(p * s, q);
        if (out.count(t)) continue;
        unsigned mult = 0;
        std::vector<Rational> w = c;
        while (w.size() > 1 && value(w, t) == 0) {
          w = deflate(w, t);
          ++mult;
        }
        if (mult) out[t] = mult;
      }
  return out;
}

inline unsigned max_mult(const std::map<Rational, unsigned> &roots, std::optional<Rational> skip = std::nullopt) {
  unsigned m = 0;
  for (const auto &[t, k] : roots)
    if (!skip || t != *skip) m = std::max(m, k);
  return m;
}

// ---------------------------------------------------------------------------
// Invariants by direct factorization and three-frame enumeration

struct Invariants {
  bool degenerate = false;
  int n = 0;
  unsigned alpha = 0, beta = 0, gamma = 0, d0 = 0, d1 = 0, kappa = 0;
  Rational delta;
};

/// Largest multiplicity of a nonzero rational root over the compact edges
/// (m != 1) of P's polygon, with x = +1 and x = -1.
inline unsigned edge_orders(const Dense &P) {
  auto verts = hull_vertices(support(P));
  unsigned best = 0;
  for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
    Pt a = verts[i], b = verts[i + 1];
    // m = (p_b - p_a) / (q_a - q_b); m = 1 edges are skipped
    if (b.first - a.first == a.second - b.second) continue;
    for (int sign : {1, -1}) {
      std::vector<Rational> c(static_cast<std::size_t>(a.second - b.second) + 1);
      for (const auto &[k, coef] : P) {
        // on the line through a and b
        __int128 cross = (__int128)(b.first - a.first) * (k.second - a.second) -
                         (__int128)(b.second - a.second) * (k.first - a.first);
        if (cross != 0) continue;
        Rational v = (sign < 0 && k.first % 2) ? Rational(-coef) : coef;
        c[static_cast<std::size_t>(k.second - b.second)] += v;
      }
      best = std::max(best, max_mult(rational_roots(c)));
    }
  }
  return best;
}

inline Invariants invariants(const Dense &P) {
  Invariants inv;
  if (P.empty()) {
    inv.degenerate = true;
    return inv;
  }
  int low = 1 << 30;
  for (const auto &[k, c] : P) low = std::min(low, k.first + k.second);
  inv.n = 3 + low;
  Dense H;
  for (const auto &[k, c] : P)
    if (k.first + k.second == low) add(H, k.first, k.second, c);
  int amin = 1 << 30, bmin = 1 << 30;
  for (const auto &[k, c] : H) amin = std::min(amin, k.first), bmin = std::min(bmin, k.second);
  inv.alpha = static_cast<unsigned>(amin);
  inv.beta = static_cast<unsigned>(bmin);
  // H(1, t) = t^beta * h(t); gamma is the order of t = -1, d0 the largest other.
  std::vector<Rational> h(static_cast<std::size_t>(low) + 1);
  for (const auto &[k, c] : H) h[static_cast<std::size_t>(k.second)] += c;
  auto roots = rational_roots(h);
  inv.gamma = roots.count(Rational(-1)) ? roots[Rational(-1)] : 0;
  inv.d0 = max_mult(roots, Rational(-1));
  inv.d1 = std::max({edge_orders(P), edge_orders(frame_x_xpy(P)), edge_orders(frame_y_xpy(P))});
  inv.kappa = std::max({inv.alpha, inv.beta, inv.gamma, inv.d0 + 1, inv.d1 + 1});
  Rational den = std::max({Rational(4), Rational(inv.kappa + 2), Rational(inv.n, 2)});
  inv.delta = 1 / den;
  return inv;
}

// ---------------------------------------------------------------------------
// Random inputs

inline Rational random_rational(std::mt19937_64 &rng, int range = 9, int max_den = 7) {
  std::uniform_int_distribution<int> num(-range, range), den(1, max_den);
  return Rational(num(rng), den(rng));
}

/// S1(x) + S2(y) + S3(x + y), each of degree <= max_degree, as a FracPoly.
inline trilinear::FracPoly random_degenerate(std::mt19937_64 &rng, int max_degree = 12) {
  using trilinear::FracPoly;
  std::uniform_int_distribution<int> deg(0, max_degree);
  FracPoly s;
  int d1 = deg(rng), d2 = deg(rng), d3 = deg(rng);
  for (int k = 0; k <= d1; ++k) s += FracPoly::monomial(random_rational(rng), k, 0);
  for (int k = 0; k <= d2; ++k) s += FracPoly::monomial(random_rational(rng), 0, k);
  for (int k = 0; k <= d3; ++k) s += random_rational(rng) * (FracPoly::x() + FracPoly::y()).pow(static_cast<unsigned>(k));
  return s;
}

/// Random polynomial with up to `terms` terms, exponents in [0, max_exp].
inline trilinear::FracPoly random_poly(std::mt19937_64 &rng, int terms, int max_exp) {
  std::uniform_int_distribution<int> e(0, max_exp), count(1, terms);
  trilinear::FracPoly p;
  int t = count(rng);
  for (int i = 0; i < t; ++i) {
    Rational c = random_rational(rng);
    if (c == 0) c = 1;
    p.add_term(c, e(rng), e(rng));
  }
  return p;
}

}  // namespace oracle
