#pragma once

#include "trilinear/fracpoly.hpp"
#include "trilinear/univariate.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace trilinear {

struct Point {
  Exponent p, q;
  friend bool operator==(const Point &a, const Point &b) { return a.p == b.p && a.q == b.q; }
};

/// Compact edge between consecutive vertices; m = (p_r - p_l) / (q_l - q_r).
struct Edge {
  Point left, right;
  Exponent m;
  friend bool operator==(const Edge &a, const Edge &b) { return a.left == b.left && a.right == b.right; }
};

inline Exponent m_value(const Edge &e) {
  if (e.left.q == e.right.q) throw std::invalid_argument("degenerate edge");
  return (e.right.p - e.left.p) / (e.left.q - e.right.q);
}

/// p + m q, the value of the supporting functional with parameter m.
inline Exponent support_value(const Point &v, const Exponent &m) { return v.p + m * v.q; }

struct NewtonPolygon {
  /// Sorted by increasing p (hence decreasing q).
  std::vector<Point> vertices;
  std::vector<Edge> edges;
  // The staircase always ends in a vertical ray above the first vertex and a
  // horizontal ray right of the last one.
  bool has_horizontal_ray = true;
  bool has_vertical_ray = true;

  const Point &leftmost() const { return vertices.front(); }
  const Point &rightmost() const { return vertices.back(); }
};

namespace detail {

struct LatticePoint {
  std::int64_t p, q;
};

inline __int128 cross(const LatticePoint &o, const LatticePoint &a, const LatticePoint &b) {
  return static_cast<__int128>(a.p - o.p) * (b.q - o.q) - static_cast<__int128>(a.q - o.q) * (b.p - o.p);
}

}  // namespace detail

/// Lower-left hull of the union of quadrants {u >= p, v >= q} over the support.
/// Exponents are scaled to a common integer lattice for the hull test.
inline NewtonPolygon newton_polygon(const FracPoly &P) {
  if (P.is_zero()) throw std::invalid_argument("Newton polygon of the zero polynomial");
  const std::int64_t D = P.common_denominator();
  std::vector<detail::LatticePoint> pts;
  pts.reserve(P.size());
  for (const auto &[k, c] : P)
    pts.push_back({k.first.numerator() * (D / k.first.denominator()), k.second.numerator() * (D / k.second.denominator())});
  std::sort(pts.begin(), pts.end(), [](const auto &a, const auto &b) { return a.p != b.p ? a.p < b.p : a.q < b.q; });

  // Minimal elements: strictly decreasing q as p increases.
  std::vector<detail::LatticePoint> stair;
  for (const auto &pt : pts)
    if (stair.empty() || pt.q < stair.back().q) stair.push_back(pt);

  std::vector<detail::LatticePoint> hull;
  for (const auto &pt : stair) {
    while (hull.size() >= 2 && detail::cross(hull[hull.size() - 2], hull.back(), pt) <= 0) hull.pop_back();
    hull.push_back(pt);
  }

  NewtonPolygon np;
  for (const auto &h : hull) np.vertices.push_back({Exponent(h.p, D), Exponent(h.q, D)});
  for (std::size_t i = 0; i + 1 < np.vertices.size(); ++i) {
    Edge e{np.vertices[i], np.vertices[i + 1], Exponent(0)};
    e.m = m_value(e);
    np.edges.push_back(e);
  }
  return np;
}

struct Face {
  enum class Kind { Vertex, Edge, VerticalRay, HorizontalRay };
  Kind kind = Kind::Vertex;
  Point vertex{};  // Vertex, or the ray's base vertex
  Edge edge{};

  bool compact() const { return kind == Kind::Vertex || kind == Kind::Edge; }
};

/// Face met by the bisector p = q. When only a ray meets it, the ray variant is
/// returned and callers treat it as "no compact main face".
inline Face main_face(const NewtonPolygon &np) {
  if (np.vertices.empty()) throw std::invalid_argument("empty Newton polygon");
  for (const auto &v : np.vertices)
    if (v.p == v.q) return {Face::Kind::Vertex, v, {}};
  for (const auto &e : np.edges)
    if (e.left.p < e.left.q && e.right.p > e.right.q) return {Face::Kind::Edge, {}, e};
  if (np.leftmost().p > np.leftmost().q) return {Face::Kind::VerticalRay, np.leftmost(), {}};
  return {Face::Kind::HorizontalRay, np.rightmost(), {}};
}

/// Terms of P lying on the face. Throws if the face is not a face of P's polygon.
inline FracPoly face_restriction(const FracPoly &P, const Face &F) {
  NewtonPolygon np = newton_polygon(P);
  FracPoly out;
  switch (F.kind) {
    case Face::Kind::Vertex: {
      if (std::find(np.vertices.begin(), np.vertices.end(), F.vertex) == np.vertices.end())
        throw std::invalid_argument("vertex is not on the Newton polygon");
      out.add_term(P.coeff(F.vertex.p, F.vertex.q), F.vertex.p, F.vertex.q);
      return out;
    }
    case Face::Kind::Edge: {
      if (std::find(np.edges.begin(), np.edges.end(), F.edge) == np.edges.end())
        throw std::invalid_argument("edge is not on the Newton polygon");
      Exponent level = support_value(F.edge.left, F.edge.m);
      for (const auto &[k, c] : P)
        if (support_value({k.first, k.second}, F.edge.m) == level) out.add_term(c, k.first, k.second);
      return out;
    }
    case Face::Kind::VerticalRay:
      if (!(F.vertex == np.leftmost())) throw std::invalid_argument("ray is not on the Newton polygon");
      for (const auto &[k, c] : P)
        if (k.first == F.vertex.p) out.add_term(c, k.first, k.second);
      return out;
    case Face::Kind::HorizontalRay:
      if (!(F.vertex == np.rightmost())) throw std::invalid_argument("ray is not on the Newton polygon");
      for (const auto &[k, c] : P)
        if (k.second == F.vertex.q) out.add_term(c, k.first, k.second);
      return out;
  }
  return out;
}

inline FracPoly face_restriction(const FracPoly &P, const Edge &E) { return face_restriction(P, Face{Face::Kind::Edge, {}, E}); }

/// P(sign, y) as a univariate polynomial in y, after removing the common
/// y-power. Returns nullopt when sign < 0 and some x-exponent is fractional
/// (that half-plane is not in the real domain of the face polynomial).
inline std::optional<UPoly> face_univariate(const FracPoly &face, int sign) {
  Exponent qmin;
  bool first = true;
  for (const auto &[k, c] : face) {
    if (!is_integer(k.second)) throw std::invalid_argument("face polynomial has fractional y-exponent");
    if (sign < 0 && !is_integer(k.first)) return std::nullopt;
    if (first || k.second < qmin) qmin = k.second;
    first = false;
  }
  std::vector<Rational> coeffs;
  for (const auto &[k, c] : face) {
    auto deg = static_cast<std::size_t>((k.second - qmin).numerator());
    if (coeffs.size() <= deg) coeffs.resize(deg + 1);
    bool flip = sign < 0 && (k.first.numerator() % 2 != 0);
    coeffs[deg] += flip ? Rational(-c) : c;
  }
  return UPoly(std::move(coeffs));
}

struct VanishingOrder {
  unsigned real = 0;
  /// Same count with non-real roots admitted (diagnostic only).
  unsigned with_complex = 0;
};

/// Largest multiplicity of a nonzero root of the edge polynomial at x = +1 or
/// x = -1. Only real roots count toward `real`.
inline VanishingOrder edge_vanishing_order_detail(const FracPoly &P, const Edge &E) {
  FracPoly face = face_restriction(P, E);
  VanishingOrder vo;
  for (int sign : {1, -1}) {
    auto u = face_univariate(face, sign);
    if (!u) continue;
    RootList rl = roots_with_multiplicity(*u);
    vo.real = std::max(vo.real, rl.max_real_multiplicity());
    vo.with_complex = std::max({vo.with_complex, rl.max_real_multiplicity(), rl.max_complex_multiplicity});
  }
  return vo;
}

inline unsigned edge_vanishing_order(const FracPoly &P, const Edge &E) { return edge_vanishing_order_detail(P, E).real; }

}  // namespace trilinear
