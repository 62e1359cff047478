#pragma once

#include "trilinear/fracpoly.hpp"
#include "trilinear/newton.hpp"
#include "trilinear/parallel.hpp"
#include "trilinear/univariate.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trilinear {

struct ResolveOptions {
  int max_depth = 24;
  Rational epsilon0 = make_rational(1, 16);
  /// Dominant term must beat everything else by this factor.
  Rational margin = 2;
};

enum class HalfPlane { East, West };
enum class RegionKind { GoodVertex, GoodEdge, Bad, Truncated };

inline const char *kind_name(RegionKind k) {
  switch (k) {
    case RegionKind::GoodVertex: return "GoodVertex";
    case RegionKind::GoodEdge: return "GoodEdge";
    case RegionKind::Bad: return "Bad";
    case RegionKind::Truncated: return "Truncated";
  }
  return "?";
}

/// One substitution y_j = x^{m_j} (r_j + y_{j+1}) along a branch, plus the
/// polygon data of P_j needed to audit it.
struct PathStep {
  Exponent m;
  Rational r;
  unsigned s = 1;   // multiplicity of r
  Rational rho;     // the branch lives in |y_{j+1}| < rho
  Point edge_left;  // left vertex of the edge that produced r
  Point leftmost;   // leftmost vertex of P_j
  // Floating copies of m, r, rho for sampling.
  long double m_f = 0, r_f = 0, rho_f = 0;
};

struct PolyHandle {
  FracPoly poly;
  CompiledPoly compiled;
  explicit PolyHandle(FracPoly p) : poly(std::move(p)), compiled(poly) {}
};

struct RegionNode {
  RegionKind kind = RegionKind::GoodVertex;
  int depth = 0;
  std::vector<PathStep> path;              // length == depth
  std::shared_ptr<const PolyHandle> poly;  // P_depth in (x, y_depth)

  // Good leaves: |P| ~ |coeff x^p y^q| with (p, q) = vertex.
  Point vertex{};
  Rational coeff;
  // Supporting parameters of the certificate: m in [m_left, m_right];
  // m_right empty means unbounded. GoodEdge has m_left == m_right.
  Exponent m_left{0};
  std::optional<Exponent> m_right;
  // GoodVertex window: c_lo x^{m_right} < |y| < c_hi x^{m_left}. The lower
  // bound is absent without m_right; the upper one without has_upper.
  bool has_upper = false;
  Rational c_lo, c_hi;
  // GoodEdge: y = x^m r with r in [r_lo, r_hi].
  Rational r_lo, r_hi;
  // Certificate in the coordinate u = y - u*(x), u* the small root of P(x, .).
  bool series = false;

  // Bad / Truncated: |y / x^edge_m - root| < rho.
  Exponent edge_m{0};
  RealRoot root;
  unsigned multiplicity = 0;
  Rational rho;
  std::vector<RegionNode> children;
  std::string reason;

  bool good() const { return kind == RegionKind::GoodVertex || kind == RegionKind::GoodEdge; }

  /// Floating copies of the window data, filled once the tree is built.
  struct Numeric {
    long double c_lo = 0, c_hi = 0, r_lo = 0, r_hi = 0, m_left = 0, m_right = 0, edge_m = 0, root = 0, rho = 0;
  } f;
};

namespace detail {

/// sum_i K_i eps^{e_i} <= budget, every e_i >= 0, so it is monotone in eps.
struct EpsConstraint {
  std::vector<std::pair<long double, long double>> terms;
  long double budget = 0;
  std::string what;

  long double value(long double eps) const {
    long double s = 0;
    for (const auto &[k, e] : terms) s += e == 0 ? k : k * std::pow(eps, e);
    return s;
  }
  bool holds(long double eps) const { return value(eps) <= budget; }
};

}  // namespace detail

struct ResolutionTree {
  HalfPlane half_plane = HalfPlane::East;
  FracPoly P;  // phase derivative in this half-plane's coordinates (x > 0)
  Rational epsilon;
  Rational margin;
  int epsilon_halvings = 0;
  /// East/west split constant: 2^10 (1 + max |root|) of the m = 1 edge.
  Rational split_constant;
  std::vector<RegionNode> regions;  // regions of the depth-0 triple
  std::vector<detail::EpsConstraint> constraints;

  std::vector<const RegionNode *> leaves() const {
    std::vector<const RegionNode *> out;
    collect(regions, out);
    return out;
  }

 private:
  static void collect(const std::vector<RegionNode> &nodes, std::vector<const RegionNode *> &out) {
    for (const auto &n : nodes) {
      if (n.kind == RegionKind::Bad)
        collect(n.children, out);
      else
        out.push_back(&n);
    }
  }
};

namespace detail {

inline long double uniform01(std::mt19937_64 &rng) {
  return (static_cast<long double>(rng()) + 0.5L) * 0x1p-64L;
}

inline long double ld_pow(long double b, const Exponent &e) { return real_pow(b, e); }

struct EdgeData {
  Edge edge;
  FracPoly face;
  CompiledPoly face_c;
  RootList roots;
  Rational c_minus, c_plus;
};

inline long double abs_min(const RealRoot &r) {
  return r.exact ? std::fabs(to_ld(r.lo)) : std::min(std::fabs(to_ld(r.lo)), std::fabs(to_ld(r.hi)));
}
inline long double abs_max(const RealRoot &r) {
  return r.exact ? std::fabs(to_ld(r.lo)) : std::max(std::fabs(to_ld(r.lo)), std::fabs(to_ld(r.hi)));
}
inline Rational center(const RealRoot &r) { return r.exact ? r.lo : (r.lo + r.hi) / 2; }

class Builder {
 public:
  Builder(const ResolveOptions &opt) : opt_(opt), margin_(to_ld(opt.margin)) {
    if (opt.margin <= 1) throw std::invalid_argument("margin must exceed 1");
    if (opt.max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
    if (opt.epsilon0 <= 0) throw std::invalid_argument("epsilon0 must be positive");
  }

  std::vector<EpsConstraint> constraints;

  std::vector<RegionNode> build(const FracPoly &P) {
    std::vector<RegionNode> out;
    build_triple(std::make_shared<const PolyHandle>(P), 0, {}, out);
    return out;
  }

 private:
  ResolveOptions opt_;
  long double margin_;

  static constexpr int kMaxHalvings = 40;

  /// Share of the 1/margin dominance budget given to each band edge.
  long double band_budget() const { return 3 / (8 * margin_); }

  /// Largest c <= 1/2 (to 12 bits) such that the edge terms above the right
  /// vertex are negligible there, and every root magnitude exceeds 2c.
  Rational choose_c_minus(const EdgeData &ed) const {
    const Point &v = ed.edge.right;
    long double cv = std::fabs(to_ld(ed.face.coeff(v.p, v.q)));
    long double rmin = std::numeric_limits<long double>::infinity();
    for (const auto &r : ed.roots.roots) rmin = std::min(rmin, abs_min(r));
    auto ok = [&](const Rational &c) {
      long double cl = to_ld(c), sum = 0;
      for (const auto &[k, coef] : ed.face)
        if (k.second > v.q) sum += std::fabs(to_ld(coef)) / cv * detail::ld_pow(cl, k.second - v.q);
      return sum <= band_budget() && 2 * cl <= rmin;
    };
    Rational c = make_rational(1, 2);
    for (int i = 0; !ok(c); ++i, c /= 2)
      if (i == kMaxHalvings) throw std::runtime_error("could not separate edge band from its right vertex");
    Rational lo = c, hi = 2 * c;
    if (c == make_rational(1, 2)) return c;
    for (int i = 0; i < 12; ++i) {
      Rational mid = (lo + hi) / 2;
      (ok(mid) ? lo : hi) = mid;
    }
    return lo;
  }

  /// Smallest c >= 2 (to 12 bits), the mirror image of choose_c_minus.
  Rational choose_c_plus(const EdgeData &ed) const {
    const Point &v = ed.edge.left;
    long double cv = std::fabs(to_ld(ed.face.coeff(v.p, v.q)));
    long double rmax = 0;
    for (const auto &r : ed.roots.roots) rmax = std::max(rmax, abs_max(r));
    auto ok = [&](const Rational &c) {
      long double cl = to_ld(c), sum = 0;
      for (const auto &[k, coef] : ed.face)
        if (k.second < v.q) sum += std::fabs(to_ld(coef)) / cv * detail::ld_pow(cl, k.second - v.q);
      return sum <= band_budget() && cl >= 2 * rmax;
    };
    Rational c = 2;
    for (int i = 0; !ok(c); ++i, c *= 2)
      if (i == kMaxHalvings) throw std::runtime_error("could not separate edge band from its left vertex");
    if (c == 2) return c;
    Rational lo = c / 2, hi = c;
    for (int i = 0; i < 12; ++i) {
      Rational mid = (lo + hi) / 2;
      (ok(mid) ? hi : lo) = mid;
    }
    return hi;
  }

  /// Dyadic neighbourhood radius of root i: well inside the band, a quarter of
  /// the gap to other roots, and passing `extra` (checked on the candidate).
  template <class Extra>
  Rational choose_rho(const EdgeData &ed, std::size_t i, Extra &&extra) const {
    long double ri = to_ld(center(ed.roots.roots[i]));
    long double lo = to_ld(ed.c_minus), hi = to_ld(ed.c_plus);
    Rational rho = make_rational(1, 4);
    for (int it = 0; it < kMaxHalvings; ++it, rho /= 2) {
      long double rl = to_ld(rho);
      bool ok = rl <= (std::fabs(ri) - lo) / 2 && rl <= (hi - std::fabs(ri)) / 2;
      for (std::size_t j = 0; ok && j < ed.roots.roots.size(); ++j)
        if (j != i && rl > std::fabs(ri - to_ld(center(ed.roots.roots[j]))) / 4) ok = false;
      if (ok && extra(rl)) return rho;
    }
    throw std::runtime_error("could not isolate root neighbourhood");
  }

  void build_triple(std::shared_ptr<const PolyHandle> ph, int depth, const std::vector<PathStep> &path,
                    std::vector<RegionNode> &out) {
    const FracPoly &P = ph->poly;
    NewtonPolygon np = newton_polygon(P);
    std::vector<EdgeData> edges;
    for (const auto &e : np.edges) {
      EdgeData ed;
      ed.edge = e;
      Exponent level = support_value(e.left, e.m);
      for (const auto &[k, c] : P)
        if (support_value({k.first, k.second}, e.m) == level) ed.face.add_term(c, k.first, k.second);
      ed.face_c = CompiledPoly(ed.face);
      ed.roots = roots_with_multiplicity(*face_univariate(ed.face, 1));
      ed.c_minus = choose_c_minus(ed);
      ed.c_plus = choose_c_plus(ed);
      edges.push_back(std::move(ed));
    }
    const bool stabilized = np.leftmost().q == Exponent(1) && np.edges.size() == 1;
    const std::size_t N = np.vertices.size();

    for (std::size_t j = 0; j < N; ++j) {
      RegionNode leaf = base_node(RegionKind::GoodVertex, depth, path, ph);
      leaf.vertex = np.vertices[j];
      leaf.coeff = P.coeff(leaf.vertex.p, leaf.vertex.q);
      if (j > 0) {
        leaf.m_left = np.edges[j - 1].m;
        leaf.has_upper = true;
        leaf.c_hi = edges[j - 1].c_minus;
      }
      if (j + 1 < N) {
        leaf.m_right = np.edges[j].m;
        leaf.c_lo = edges[j].c_plus;
      }
      constraints.push_back(vertex_constraint(leaf, P));
      out.push_back(std::move(leaf));
    }

    for (std::size_t j = 1; j < edges.size(); ++j) {
      EpsConstraint c;
      c.what = "window order";
      c.budget = 0.5L;
      c.terms.push_back({to_ld(edges[j].c_plus / edges[j - 1].c_minus), to_ld(edges[j].edge.m - edges[j - 1].edge.m)});
      constraints.push_back(c);
    }

    for (auto &ed : edges) {
      std::vector<std::pair<Rational, Rational>> holes;  // excluded r-intervals
      for (std::size_t i = 0; i < ed.roots.roots.size(); ++i) {
        const RealRoot &root = ed.roots.roots[i];
        RegionNode bad = base_node(RegionKind::Bad, depth, path, ph);
        bad.edge_m = ed.edge.m;
        bad.root = root;
        bad.multiplicity = root.multiplicity;
        PathStep step{ed.edge.m, center(root), root.multiplicity, Rational(0), ed.edge.left, np.leftmost()};

        if (!root.exact) {
          bad.kind = RegionKind::Truncated;
          bad.reason = "irrational root";
          bad.rho = choose_rho(ed, i, [](long double) { return true; });
        } else if (stabilized) {
          FracPoly Q = substitute_branch(P, root.value(), ed.edge.m);
          bad.rho = choose_rho(ed, i, [&](long double rho) { return series_const_part(Q, rho) <= 1 / (2 * margin_); });
          step.rho = bad.rho;
          bad.children.push_back(series_leaf(std::move(Q), depth + 1, path, step));
        } else if (depth + 1 > opt_.max_depth) {
          bad.kind = RegionKind::Truncated;
          bad.reason = "max depth";
          bad.rho = choose_rho(ed, i, [](long double) { return true; });
        } else {
          FracPoly child = substitute_branch(P, root.value(), ed.edge.m);
          bad.rho = choose_rho(ed, i, [&](long double rho) { return vertical_ray_part(child, rho) <= 1 / (4 * margin_); });
          step.rho = bad.rho;
          std::vector<PathStep> cpath = path;
          cpath.push_back(step);
          build_triple(std::make_shared<const PolyHandle>(std::move(child)), depth + 1, cpath, bad.children);
        }
        Rational c = center(root);
        holes.push_back({c - bad.rho, c + bad.rho});
        out.push_back(std::move(bad));
      }
      for (auto &leaf : edge_leaves(ed, holes, P, depth, path, ph)) out.push_back(std::move(leaf));
    }
  }

  static RegionNode base_node(RegionKind kind, int depth, const std::vector<PathStep> &path,
                              const std::shared_ptr<const PolyHandle> &ph) {
    RegionNode n;
    n.kind = kind;
    n.depth = depth;
    n.path = path;
    n.poly = ph;
    return n;
  }

  /// Constant-level weight of the vertical-ray terms above the leftmost vertex
  /// when |y| < rho.
  static long double vertical_ray_part(const FracPoly &child, long double rho) {
    NewtonPolygon np = newton_polygon(child);
    const Point &v = np.leftmost();
    long double cv = std::fabs(to_ld(child.coeff(v.p, v.q))), sum = 0;
    for (const auto &[k, c] : child)
      if (k.first == v.p && k.second > v.q) sum += std::fabs(to_ld(c)) / cv * ld_pow(rho, k.second - v.q);
    return sum;
  }

  /// Constant-level part of |d_y Q / x^a - c1| / |c1| on |y| < rho.
  static long double series_const_part(const FracPoly &Q, long double rho) {
    Point v = newton_polygon(Q).leftmost();
    long double c1 = std::fabs(to_ld(Q.coeff(v.p, v.q))), sum = 0;
    for (const auto &[k, c] : Q)
      if (k.first == v.p && k.second > v.q)
        sum += std::fabs(to_ld(c)) / c1 * to_ld(k.second) * ld_pow(rho, k.second - Exponent(1));
    return sum;
  }

  RegionNode series_leaf(FracPoly Q, int depth, std::vector<PathStep> path, const PathStep &step) {
    path.push_back(step);
    NewtonPolygon np = newton_polygon(Q);
    RegionNode leaf;
    leaf.kind = RegionKind::GoodVertex;
    leaf.depth = depth;
    leaf.series = true;
    leaf.vertex = np.leftmost();
    leaf.coeff = Q.coeff(leaf.vertex.p, leaf.vertex.q);
    leaf.m_left = 0;
    leaf.path = path;
    const Point &v = leaf.vertex;
    long double c1 = std::fabs(to_ld(leaf.coeff)), rho = to_ld(step.rho);

    EpsConstraint slope, root;
    slope.what = "series slope";
    slope.budget = 1 / margin_;
    root.what = "series root";
    root.budget = (1 - 1 / margin_) * rho / 2;
    for (const auto &[k, c] : Q) {
      if (k.first == v.p && k.second == v.q) continue;
      long double e = to_ld(k.first - v.p), K = std::fabs(to_ld(c)) / c1;
      if (k.second == Exponent(0))
        root.terms.push_back({K, e});
      else
        slope.terms.push_back({K * to_ld(k.second) * ld_pow(rho, k.second - Exponent(1)), e});
    }
    constraints.push_back(slope);
    constraints.push_back(root);
    leaf.poly = std::make_shared<const PolyHandle>(std::move(Q));
    return leaf;
  }

  /// Every other term relative to the vertex monomial, bounded over the window
  /// at x = eps.
  EpsConstraint vertex_constraint(const RegionNode &leaf, const FracPoly &P) const {
    EpsConstraint c;
    c.what = "vertex dominance";
    c.budget = 1 / margin_;
    const Point &v = leaf.vertex;
    long double cv = std::fabs(to_ld(leaf.coeff));
    const bool top = leaf.path.empty();
    for (const auto &[k, coef] : P) {
      if (k.first == v.p && k.second == v.q) continue;
      long double K = std::fabs(to_ld(coef)) / cv;
      Exponent dp = k.first - v.p, dq = k.second - v.q;
      if (dq > Exponent(0)) {
        if (leaf.has_upper) {
          c.terms.push_back({K * ld_pow(to_ld(leaf.c_hi), dq), to_ld(dp + leaf.m_left * dq)});
        } else if (top) {
          c.terms.push_back({K, to_ld(dp + dq)});  // |y| < eps
        } else {
          c.terms.push_back({K * ld_pow(to_ld(leaf.path.back().rho), dq), to_ld(dp)});
        }
      } else if (dq < Exponent(0)) {
        c.terms.push_back({K * ld_pow(to_ld(leaf.c_lo), dq), to_ld(dp + *leaf.m_right * dq)});
      } else {
        c.terms.push_back({K, to_ld(dp)});
      }
    }
    return c;
  }

  struct PieceStats {
    long double spread[2];  // max/min of |F(r)| / |r|^q for left, right vertex
    long double lower;      // rigorous lower bound of |F| on the piece
  };

  static PieceStats piece_stats(const EdgeData &ed, const Rational &a, const Rational &b) {
    const int G = 64;
    long double al = to_ld(a), bl = to_ld(b);
    long double R = std::max(std::fabs(al), std::fabs(bl));
    PieceStats st{};
    long double gmin[2] = {INFINITY, INFINITY}, gmax[2] = {0, 0}, fmin = INFINITY;
    const Exponent qs[2] = {ed.edge.left.q, ed.edge.right.q};
    for (int i = 0; i <= G; ++i) {
      long double r = al + (bl - al) * i / G;
      long double f = std::fabs(ed.face_c(1.0L, r));
      fmin = std::min(fmin, f);
      for (int s = 0; s < 2; ++s) {
        long double g = f / ld_pow(std::fabs(r), qs[s]);
        gmin[s] = std::min(gmin[s], g);
        gmax[s] = std::max(gmax[s], g);
      }
    }
    for (int s = 0; s < 2; ++s) st.spread[s] = gmin[s] > 0 ? gmax[s] / gmin[s] : INFINITY;
    long double lip = 0;
    for (const auto &[k, c] : ed.face)
      if (k.second > Exponent(0)) lip += std::fabs(to_ld(c)) * to_ld(k.second) * ld_pow(R, k.second - Exponent(1));
    st.lower = fmin - lip * (bl - al) / (2 * G);
    return st;
  }

  /// Off-edge terms of P grouped by their extra power e of x after y = x^m r:
  /// returns (sup |T_e(r)| / |F(r)|, e) on [a, b], F the edge polynomial.
  /// Cell-wise bounds on a grid: sup |T| from the endpoints plus a Lipschitz
  /// term, inf |F| likewise.
  static std::vector<std::pair<long double, long double>> tail_terms(const EdgeData &ed, const FracPoly &P,
                                                                     const Rational &a, const Rational &b) {
    Exponent level0 = support_value(ed.edge.left, ed.edge.m);
    std::map<Exponent, std::vector<std::pair<long double, long double>>> groups;  // e -> (coef, q)
    for (const auto &[k, coef] : P) {
      Exponent e = support_value({k.first, k.second}, ed.edge.m) - level0;
      if (e == Exponent(0)) continue;
      groups[e].push_back({to_ld(coef), to_ld(k.second)});
    }
    const int G = 256;
    long double al = to_ld(a), bl = to_ld(b), h = (bl - al) / G;
    long double R = std::max(std::fabs(al), std::fabs(bl));
    auto lip = [R](const std::vector<std::pair<long double, long double>> &terms) {
      long double l = 0;
      for (const auto &[c, q] : terms)
        if (q > 0) l += std::fabs(c) * q * std::pow(R, q - 1);
      return l;
    };
    std::vector<std::pair<long double, long double>> fterms;
    for (const auto &[k, coef] : ed.face) fterms.push_back({to_ld(coef), to_ld(k.second)});
    const long double lipF = lip(fterms);
    std::vector<long double> F(G + 1);
    for (int i = 0; i <= G; ++i) F[i] = std::fabs(ed.face_c(1.0L, al + h * i));

    std::vector<std::pair<long double, long double>> out;
    for (const auto &[e, terms] : groups) {
      auto T = [&](long double r) {
        long double s = 0;
        for (const auto &[c, q] : terms) s += c * (q == 0 ? 1 : std::pow(std::fabs(r), q) * (r < 0 && std::fmod(q, 2) == 1 ? -1 : 1));
        return std::fabs(s);
      };
      const long double lipT = lip(terms);
      long double Kmax = 0, Tprev = T(al);
      for (int i = 0; i < G; ++i) {
        long double Tnext = T(al + h * (i + 1));
        long double up = std::max(Tprev, Tnext) + lipT * h / 2;
        long double down = std::min(F[i], F[i + 1]) - lipF * h / 2;
        Kmax = std::max(Kmax, down > 0 ? up / down : std::numeric_limits<long double>::infinity());
        Tprev = Tnext;
      }
      out.push_back({Kmax, to_ld(e)});
    }
    return out;
  }

  std::vector<RegionNode> edge_leaves(const EdgeData &ed, std::vector<std::pair<Rational, Rational>> holes,
                                      const FracPoly &P, int depth, const std::vector<PathStep> &path,
                                      const std::shared_ptr<const PolyHandle> &ph) {
    std::sort(holes.begin(), holes.end());
    std::vector<std::pair<Rational, Rational>> pieces;
    for (int sign : {-1, 1}) {
      Rational lo = sign > 0 ? ed.c_minus : Rational(-ed.c_plus);
      Rational hi = sign > 0 ? ed.c_plus : Rational(-ed.c_minus);
      Rational cur = lo;
      for (const auto &[hl, hh] : holes) {
        if (hh <= lo || hl >= hi) continue;
        if (hl > cur) pieces.push_back({cur, hl});
        cur = std::max(cur, hh);
      }
      if (cur < hi) pieces.push_back({cur, hi});
    }

    std::vector<RegionNode> out;
    std::vector<std::pair<std::pair<Rational, Rational>, int>> work;
    for (auto &pc : pieces) work.push_back({pc, 0});
    while (!work.empty()) {
      auto [pc, level] = work.back();
      work.pop_back();
      PieceStats st = piece_stats(ed, pc.first, pc.second);
      int best = st.spread[0] <= st.spread[1] ? 0 : 1;
      if ((st.lower <= 0 || st.spread[best] > 8) && level < 24) {
        Rational mid = (pc.first + pc.second) / 2;
        work.push_back({{mid, pc.second}, level + 1});
        work.push_back({{pc.first, mid}, level + 1});
        continue;
      }
      if (st.lower <= 0) throw std::runtime_error("edge polynomial not bounded away from zero on a good piece");
      RegionNode leaf = base_node(RegionKind::GoodEdge, depth, path, ph);
      leaf.vertex = best == 0 ? ed.edge.left : ed.edge.right;
      leaf.coeff = P.coeff(leaf.vertex.p, leaf.vertex.q);
      leaf.m_left = ed.edge.m;
      leaf.m_right = ed.edge.m;
      leaf.edge_m = ed.edge.m;
      leaf.r_lo = pc.first;
      leaf.r_hi = pc.second;

      EpsConstraint c;
      c.what = "edge tail";
      c.budget = 1 / margin_;
      c.terms = tail_terms(ed, P, pc.first, pc.second);
      constraints.push_back(c);
      out.push_back(std::move(leaf));
    }
    std::sort(out.begin(), out.end(), [](const RegionNode &a, const RegionNode &b) { return a.r_lo < b.r_lo; });
    return out;
  }
};

}  // namespace detail

namespace detail {

inline void fill_numeric(std::vector<RegionNode> &nodes) {
  for (auto &n : nodes) {
    for (auto &st : n.path) st.m_f = to_ld(st.m), st.r_f = to_ld(st.r), st.rho_f = to_ld(st.rho);
    n.f = {to_ld(n.c_lo), to_ld(n.c_hi), to_ld(n.r_lo), to_ld(n.r_hi), to_ld(n.m_left),
           n.m_right ? to_ld(*n.m_right) : 0, to_ld(n.edge_m), n.kind == RegionKind::Bad ? to_ld(n.root.value()) : 0,
           to_ld(n.rho)};
    fill_numeric(n.children);
  }
}

/// x^e for x > 0.
inline long double pos_pow(long double x, long double e) {
  long double twice = 2 * e;
  if (twice == std::floor(twice) && twice >= 0 && twice < 64) {
    auto n = static_cast<int>(twice);
    long double r = int_pow(x, n / 2);
    return n % 2 ? r * std::sqrt(x) : r;
  }
  return std::pow(x, e);
}

}  // namespace detail

/// Largest root magnitude of the m = 1 edge polynomial at x = +-1.
inline Rational split_constant(const FracPoly &P) {
  Rational maxroot = 0;
  NewtonPolygon np = newton_polygon(P);
  for (const auto &e : np.edges) {
    if (e.m != Exponent(1)) continue;
    FracPoly face = face_restriction(P, e);
    for (int sign : {1, -1}) {
      auto u = face_univariate(face, sign);
      if (!u) continue;
      for (const auto &r : roots_with_multiplicity(*u).roots) maxroot = std::max({maxroot, Rational(abs(r.lo)), Rational(abs(r.hi))});
    }
  }
  return Rational(1024) * (1 + maxroot);
}

/// Resolution of P on (0, eps) x (-eps, eps); the west half uses P(-x, y).
inline ResolutionTree resolve(const FracPoly &input, const ResolveOptions &opt = {}, HalfPlane half = HalfPlane::East) {
  if (input.is_zero()) throw std::invalid_argument("cannot resolve the zero polynomial");
  ResolutionTree tree;
  tree.half_plane = half;
  tree.P = half == HalfPlane::East ? input : reflect_x(input);
  tree.margin = opt.margin;
  tree.split_constant = split_constant(input);
  detail::Builder b(opt);
  tree.regions = b.build(tree.P);

  tree.constraints = b.constraints;
  detail::fill_numeric(tree.regions);
  Rational eps = opt.epsilon0;
  for (int h = 0;; ++h) {
    long double el = to_ld(eps);
    bool ok = std::all_of(b.constraints.begin(), b.constraints.end(), [&](const auto &c) { return c.holds(el); });
    if (ok) {
      tree.epsilon = eps;
      tree.epsilon_halvings = h;
      break;
    }
    if (h == 40) throw std::runtime_error("epsilon selection did not converge");
    eps /= 2;
  }
  return tree;
}


// ---------------------------------------------------------------------------
// Membership and certificates

namespace detail {

/// Window test for a good leaf in its own coordinates; |y| < bound always.
inline bool in_window(const RegionNode &n, long double x, long double y, long double bound, bool strict) {
  auto lt = [strict](long double a, long double b) { return strict ? a < b : a <= b; };
  long double ay = std::fabs(y);
  if (!(ay < bound)) return false;
  if (n.kind == RegionKind::GoodEdge) {
    long double r = y / pos_pow(x, n.f.edge_m);
    return lt(n.f.r_lo, r) && lt(r, n.f.r_hi);
  }
  if (n.m_right && !lt(n.f.c_lo * pos_pow(x, n.f.m_right), ay)) return false;
  if (n.has_upper && !lt(ay, n.f.c_hi * pos_pow(x, n.f.m_left))) return false;
  return true;
}

inline void containing(const std::vector<RegionNode> &nodes, long double x, long double y, long double bound,
                       bool strict, std::vector<const RegionNode *> &out) {
  if (!(std::fabs(y) < bound)) return;
  for (const auto &n : nodes) {
    if (n.kind == RegionKind::Truncated) continue;
    if (n.kind == RegionKind::Bad) {
      long double r = y / pos_pow(x, n.f.edge_m) - n.f.root;
      if (std::fabs(r) < n.f.rho) containing(n.children, x, r, n.f.rho, strict, out);
    } else if (in_window(n, x, y, bound, strict)) {
      out.push_back(&n);
    }
  }
}

inline long double leaf_bound(const RegionNode &leaf, long double eps) {
  return leaf.path.empty() ? eps : leaf.path.back().rho_f;
}

/// Local coordinate y_k of (x, y) along the leaf's branch, or nullopt when the
/// point leaves one of the branch's root neighbourhoods.
inline std::optional<long double> pull_back(const RegionNode &leaf, long double x, long double y, long double eps) {
  if (!(std::fabs(y) < eps)) return std::nullopt;
  for (const auto &st : leaf.path) {
    long double r = y / pos_pow(x, st.m_f) - st.r_f;
    if (!(std::fabs(r) < st.rho_f)) return std::nullopt;
    y = r;
  }
  return y;
}

inline long double push_forward(const RegionNode &leaf, long double x, long double yk) {
  for (auto it = leaf.path.rbegin(); it != leaf.path.rend(); ++it) yk = pos_pow(x, it->m_f) * (it->r_f + yk);
  return yk;
}

/// Root of P_k(x, .) near 0 for a series leaf (Newton from 0).
inline long double series_root(const RegionNode &leaf, long double x) {
  const CompiledPoly &q = leaf.poly->compiled;
  long double u = 0;
  for (int i = 0; i < 100; ++i) {
    long double d = q.derivative(0, 1, x, u);
    if (d == 0) break;
    long double step = q(x, u) / d;
    u -= step;
    if (std::fabs(step) <= 1e-18L * (1 + std::fabs(u))) break;
  }
  return u;
}

using HighFloat = boost::multiprecision::cpp_bin_float_100;

inline HighFloat high_pow(const HighFloat &b, const Exponent &e) {
  if (e == Exponent(0)) return HighFloat(1);
  if (e.denominator() == 1) return boost::multiprecision::pow(b, static_cast<int>(e.numerator()));
  return boost::multiprecision::pow(b, HighFloat(e.numerator()) / e.denominator());
}

/// |P(x, y)| with y = push_forward(yk). The long double value is kept when it
/// is well conditioned; otherwise the chain and P are re-evaluated with 332
/// significant bits, since points near a branch cancel almost completely.
class AbsEvaluator {
 public:
  explicit AbsEvaluator(const FracPoly &P) : fast_(P) {
    for (const auto &[k, c] : P)
      terms_.push_back({HighFloat(numerator(c)) / HighFloat(denominator(c)), k.first, k.second});
  }

  long double operator()(const RegionNode &leaf, long double x, long double yk) const {
    long double y = push_forward(leaf, x, yk);
    long double v = fast_(x, y), mag = fast_.magnitude(x, y);
    if (std::fabs(v) > 0x1p-40L * mag) return std::fabs(v);
    HighFloat hx = x, hy = yk;
    for (auto it = leaf.path.rbegin(); it != leaf.path.rend(); ++it)
      hy = high_pow(hx, it->m) * (HighFloat(numerator(it->r)) / HighFloat(denominator(it->r)) + hy);
    HighFloat sum = 0;
    for (const auto &t : terms_) sum += t.c * high_pow(hx, t.ex) * high_pow(hy, t.ey);
    return static_cast<long double>(boost::multiprecision::abs(sum));
  }

 private:
  struct Term {
    HighFloat c;
    Exponent ex, ey;
  };
  CompiledPoly fast_;
  std::vector<Term> terms_;
};

/// |x^p y_k^q| for ordinary leaves, x^p |y_k - u*(x)| for series leaves.
inline long double certificate(const RegionNode &leaf, long double x, long double yk) {
  long double y = leaf.series ? yk - series_root(leaf, x) : yk;
  return ld_pow(x, leaf.vertex.p) * ld_pow(std::fabs(y), leaf.vertex.q);
}

}  // namespace detail

/// Good leaves whose windows contain (x, y), x > 0 in the tree's half-plane.
inline std::vector<const RegionNode *> leaves_containing(const ResolutionTree &tree, long double x, long double y,
                                                         bool strict = true) {
  std::vector<const RegionNode *> out;
  if (x > 0 && x < to_ld(tree.epsilon)) detail::containing(tree.regions, x, y, to_ld(tree.epsilon), strict, out);
  return out;
}

inline bool leaf_contains(const ResolutionTree &tree, const RegionNode &leaf, long double x, long double y,
                          bool strict = false) {
  long double eps = to_ld(tree.epsilon);
  if (!(x > 0 && x < eps)) return false;
  auto yk = detail::pull_back(leaf, x, y, eps);
  return yk && detail::in_window(leaf, x, *yk, detail::leaf_bound(leaf, eps), strict);
}

/// |P(x, y)| divided by the leaf's certificate monomial. Throws when the point
/// is not in the leaf.
inline long double certificate_ratio(const ResolutionTree &tree, const RegionNode &leaf, long double x, long double y) {
  if (!leaf.good()) throw std::invalid_argument("certificate_ratio needs a good leaf");
  if (!leaf_contains(tree, leaf, x, y)) throw std::domain_error("sample outside the leaf window");
  long double yk = *detail::pull_back(leaf, x, y, to_ld(tree.epsilon));
  return detail::AbsEvaluator(tree.P)(leaf, x, yk) / detail::certificate(leaf, x, yk);
}

struct RatioStats {
  long double min = 0, max = 0, median = 0;
  /// Largest |d^a_x d^b_y P_k| / min(1, |x^{p-a} y^{q-b}|) over a, b <= 2
  /// (not computed for series leaves).
  long double derivative_max = 0;
  std::size_t samples = 0, attempts = 0;
  long double spread() const { return min > 0 ? max / min : INFINITY; }
};

/// Samples the leaf window over 0 < x < eps (eps <= tree epsilon), maps each
/// point to (x, y) along the branch and compares |P| with the certificate.
inline RatioStats monomial_check(const ResolutionTree &tree, const RegionNode &leaf, std::size_t samples,
                                 const Rational &eps, std::uint64_t seed = 1) {
  if (!leaf.good()) throw std::invalid_argument("monomial_check needs a good leaf");
  if (eps > tree.epsilon || eps <= 0) throw std::domain_error("check epsilon exceeds the tree epsilon");
  const long double e = to_ld(eps);
  const long double bound = leaf.path.empty() ? e : to_ld(leaf.path.back().rho);
  const detail::AbsEvaluator absP(tree.P);
  const CompiledPoly &Pk = leaf.poly->compiled;

  // x beyond x_top gives an empty window; drawing x below it is the same as
  // rejecting those draws.
  long double x_top = e;
  if (leaf.kind == RegionKind::GoodEdge) {
    long double R = std::max(std::fabs(to_ld(leaf.r_lo)), std::fabs(to_ld(leaf.r_hi)));
    long double r_in = std::min(std::fabs(to_ld(leaf.r_lo)), std::fabs(to_ld(leaf.r_hi)));
    if (leaf.r_lo < 0 && leaf.r_hi > 0) r_in = 0;
    (void)R;
    if (r_in > 0) x_top = std::min(x_top, std::pow(bound / r_in, 1 / to_ld(leaf.edge_m)));
  } else if (leaf.m_right) {
    long double cl = to_ld(leaf.c_lo), mr = to_ld(*leaf.m_right);
    x_top = std::min(x_top, std::pow(bound / cl, 1 / mr));
    if (leaf.has_upper) x_top = std::min(x_top, std::pow(to_ld(leaf.c_hi) / cl, 1 / (mr - to_ld(leaf.m_left))));
  }

  constexpr std::size_t kChunks = 32;
  struct Chunk {
    std::vector<long double> ratios;
    long double dmax = 0;
    std::size_t attempts = 0;
  };
  std::vector<Chunk> chunks(kChunks);
  parallel_for(kChunks, [&](std::size_t ci) {
    Chunk &ch = chunks[ci];
    std::size_t want = samples / kChunks + (ci < samples % kChunks ? 1 : 0);
    auto rng = stream_rng(seed, ci);
    while (ch.ratios.size() < want) {
      if (++ch.attempts > 1000 * (want + 1)) throw std::domain_error("leaf window is empty at this epsilon");
      long double x = x_top * detail::uniform01(rng);
      long double yk;
      if (leaf.kind == RegionKind::GoodEdge) {
        long double r = to_ld(leaf.r_lo) + (to_ld(leaf.r_hi) - to_ld(leaf.r_lo)) * detail::uniform01(rng);
        yk = detail::ld_pow(x, leaf.edge_m) * r;
        if (!(std::fabs(yk) < bound)) continue;
      } else {
        long double lo = leaf.m_right ? to_ld(leaf.c_lo) * detail::ld_pow(x, *leaf.m_right) : 0;
        long double hi = leaf.has_upper ? std::min(bound, to_ld(leaf.c_hi) * detail::ld_pow(x, leaf.m_left)) : bound;
        if (!(lo < hi)) continue;
        yk = lo + (hi - lo) * detail::uniform01(rng);
        if (rng() & 1) yk = -yk;
      }
      long double cert = detail::certificate(leaf, x, yk);
      if (!(cert > 0)) continue;
      ch.ratios.push_back(absP(leaf, x, yk) / cert);
      if (!leaf.series) {
        for (int a = 0; a <= 2; ++a)
          for (int b = 0; b <= 2; ++b) {
            long double mono = detail::ld_pow(x, leaf.vertex.p - Exponent(a)) *
                               detail::ld_pow(std::fabs(yk), leaf.vertex.q - Exponent(b));
            long double ratio = std::fabs(Pk.derivative(a, b, x, yk)) / std::min(1.0L, mono);
            ch.dmax = std::max(ch.dmax, ratio);
          }
      }
    }
  });

  RatioStats st;
  std::vector<long double> all;
  for (auto &ch : chunks) {
    all.insert(all.end(), ch.ratios.begin(), ch.ratios.end());
    st.derivative_max = std::max(st.derivative_max, ch.dmax);
    st.attempts += ch.attempts;
  }
  st.samples = all.size();
  if (all.empty()) return st;
  std::sort(all.begin(), all.end());
  st.min = all.front();
  st.max = all.back();
  st.median = all[all.size() / 2];
  return st;
}

struct CoverageReport {
  std::size_t samples = 0;
  std::size_t uncovered = 0;  // points in no good leaf
  std::size_t overlaps = 0;   // points strictly inside two good leaves
  double uncovered_fraction() const { return samples ? double(uncovered) / double(samples) : 0.0; }
};

/// Monte Carlo over (0, eps) x (-eps, eps).
inline CoverageReport coverage_check(const ResolutionTree &tree, std::size_t samples, std::uint64_t seed = 7) {
  constexpr std::size_t kChunks = 64;
  std::vector<CoverageReport> parts(kChunks);
  const long double eps = to_ld(tree.epsilon);
  parallel_for(kChunks, [&](std::size_t ci) {
    auto rng = stream_rng(seed, ci);
    std::size_t n = samples / kChunks + (ci < samples % kChunks ? 1 : 0);
    std::vector<const RegionNode *> hits;
    for (std::size_t i = 0; i < n; ++i) {
      long double x = eps * detail::uniform01(rng);
      long double y = eps * (2 * detail::uniform01(rng) - 1);
      hits.clear();
      detail::containing(tree.regions, x, y, eps, true, hits);
      parts[ci].samples++;
      if (hits.empty()) parts[ci].uncovered++;
      if (hits.size() > 1) parts[ci].overlaps++;
    }
  });
  CoverageReport r;
  for (const auto &p : parts) {
    r.samples += p.samples;
    r.uncovered += p.uncovered;
    r.overlaps += p.overlaps;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Bookkeeping audits

struct ChainViolation {
  std::string path;
  std::string message;
};

namespace detail {

inline std::string path_label(const std::vector<PathStep> &path) {
  std::string s = "root";
  for (const auto &st : path) s += " -> (m=" + fraction_string(st.m) + ", r=" + fraction_string(st.r) + ")";
  return s;
}

inline std::string point_text(const Point &p) { return "(" + fraction_string(p.p) + ", " + fraction_string(p.q) + ")"; }

inline void audit(const std::vector<RegionNode> &nodes, std::vector<ChainViolation> &out) {
  for (const auto &n : nodes) {
    if (n.kind == RegionKind::Bad) {
      const RegionNode &child = n.children.front();
      const PathStep &st = child.path.back();
      Point left = newton_polygon(child.poly->poly).leftmost();
      Point expect{st.edge_left.p + st.edge_left.q * st.m, Exponent(static_cast<std::int64_t>(st.s))};
      std::string where = path_label(child.path);
      if (!(left == expect))
        out.push_back({where, "leftmost vertex " + point_text(left) + " != " + point_text(expect)});
      if (Exponent(static_cast<std::int64_t>(st.s)) > st.edge_left.q)
        out.push_back({where, "root multiplicity exceeds the edge's left height"});
      if (support_value(st.edge_left, st.m) > support_value(st.leftmost, st.m))
        out.push_back({where, "leftmost vertex lies below the edge's supporting line"});
      audit(n.children, out);
      continue;
    }
    if (!n.good()) continue;
    // Supporting-line chain at each finite end of the leaf's window.
    Point lead = newton_polygon(n.poly->poly).leftmost();
    std::vector<Exponent> ms{n.m_left};
    if (n.m_right && *n.m_right != n.m_left) ms.push_back(*n.m_right);
    for (const Exponent &m : ms) {
      if (support_value(n.vertex, m) > support_value(lead, m))
        out.push_back({path_label(n.path), "certificate vertex is not on a supporting line with m=" + fraction_string(m)});
      if (n.path.empty()) continue;
      const PathStep &s0 = n.path.front();
      Exponent bound = support_value(s0.edge_left, s0.m);
      Exponent tail = m;
      for (std::size_t j = 1; j < n.path.size(); ++j) tail += n.path[j].m;
      bound += Exponent(static_cast<std::int64_t>(s0.s)) * tail;
      if (support_value(lead, m) > bound)
        out.push_back({path_label(n.path), "leftmost support exceeds the accumulated bound at m=" + fraction_string(m)});
    }
  }
}

}  // namespace detail

/// Exact check of the collapse identity, the multiplicity and supporting-line
/// inequalities at every substitution, and the accumulated bound at every leaf.
inline std::vector<ChainViolation> verify_chain_identities(const ResolutionTree &tree) {
  std::vector<ChainViolation> out;
  detail::audit(tree.regions, out);
  return out;
}

/// Nodes whose polynomial differs from the replayed chain of substitutions.
inline std::vector<ChainViolation> replay_violations(const ResolutionTree &tree) {
  std::vector<ChainViolation> out;
  for (const RegionNode *leaf : tree.leaves()) {
    if (!leaf->good()) continue;
    FracPoly q = tree.P;
    for (const auto &st : leaf->path) q = substitute_branch(q, st.r, st.m);
    if (q != leaf->poly->poly) out.push_back({detail::path_label(leaf->path), "replayed polynomial differs"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Box covers

/// Dimensions kept exactly as (1/K) 2^{dx_log2} and 2^{dy_log2}.
struct BoxSpec {
  Rational sigma, rho;
  std::int64_t K = 1;
  Rational tau;
  Exponent dx_log2{0}, dy_log2{0};
  BigInt count_estimate;
  std::string formula;

  long double dx() const { return std::exp2(to_ld(dx_log2)) / static_cast<long double>(K); }
  long double dy() const { return std::exp2(to_ld(dy_log2)); }
  /// Exact values when the exponents are integers.
  std::optional<Rational> dx_exact() const {
    if (!is_integer(dx_log2)) return std::nullopt;
    return pow2(dx_log2.numerator()) / Rational(K);
  }
  std::optional<Rational> dy_exact() const {
    if (!is_integer(dy_log2)) return std::nullopt;
    return pow2(dy_log2.numerator());
  }
  static Rational pow2(std::int64_t e) {
    BigInt one = 1;
    return e >= 0 ? Rational(BigInt(one << static_cast<unsigned>(e))) : Rational(one, BigInt(one << static_cast<unsigned>(-e)));
  }
};

enum class BoxCase { EdgeLeaf, VertexDeep, VertexTop };

inline const char *box_case_name(BoxCase c) {
  switch (c) {
    case BoxCase::EdgeLeaf: return "edge";
    case BoxCase::VertexDeep: return "vertex, depth >= 1";
    case BoxCase::VertexTop: return "vertex, depth 0";
  }
  return "?";
}

namespace detail {

/// log2 of a dyadic rational 2^k, or nullopt.
inline std::optional<std::int64_t> dyadic_log2(const Rational &v) {
  if (v <= 0) return std::nullopt;
  BigInt n = numerator(v), d = denominator(v);
  auto single_bit = [](const BigInt &z) { return z > 0 && (z & (z - 1)) == 0; };
  if (n == 1 && single_bit(d)) return -static_cast<std::int64_t>(msb(d));
  if (d == 1 && single_bit(n)) return static_cast<std::int64_t>(msb(n));
  return std::nullopt;
}

}  // namespace detail

/// Box dimensions for dyadic sigma = 2^-a, rho = 2^-b:
///   edge leaf          dy = sigma^M,       dx = dy sigma^(1-m0) / K
///   vertex, depth >= 1 dy = rho sigma^M,   dx = dy sigma^(1-m0) / K
///   vertex, depth 0    dy = rho sigma^m0,  dx = sigma / K
/// with M = m0 + ... + mn the accumulated m along the branch.
inline BoxSpec box_dimensions(BoxCase kind, const std::vector<Exponent> &ms, const Rational &sigma, const Rational &rho,
                              std::int64_t K) {
  auto ls = detail::dyadic_log2(sigma), lr = detail::dyadic_log2(rho);
  if (!ls || !lr) throw std::invalid_argument("sigma and rho must be dyadic");
  if (K < 1) throw std::invalid_argument("K must be positive");
  if (ms.empty()) throw std::invalid_argument("box_dimensions needs at least one m");
  BoxSpec b;
  b.sigma = sigma;
  b.rho = rho;
  b.K = K;
  b.tau = 1 + Rational(1) / Rational(K);
  Exponent a(*ls), r(*lr);  // log2 sigma, log2 rho
  Exponent M(0);
  for (const auto &m : ms) M += m;
  const Exponent &m0 = ms.front();
  switch (kind) {
    case BoxCase::EdgeLeaf:
      b.dy_log2 = a * M;
      b.dx_log2 = b.dy_log2 + a * (Exponent(1) - m0);
      b.formula = "dy = sigma^M, dx = dy sigma^(1-m0)/K";
      break;
    case BoxCase::VertexDeep:
      b.dy_log2 = r + a * M;
      b.dx_log2 = b.dy_log2 + a * (Exponent(1) - m0);
      b.formula = "dy = rho sigma^M, dx = dy sigma^(1-m0)/K";
      break;
    case BoxCase::VertexTop:
      b.dy_log2 = r + a * m0;
      b.dx_log2 = a;
      b.formula = "dy = rho sigma^m0, dx = sigma/K";
      break;
  }
  // count = ceil(sigma / dx) = ceil(K 2^t)
  Exponent t = a - b.dx_log2;
  if (is_integer(t) && t >= Exponent(0)) {
    b.count_estimate = BigInt(K) << static_cast<unsigned>(t.numerator());
  } else if (is_integer(t)) {
    Rational v = Rational(K) * BoxSpec::pow2(t.numerator());
    BigInt c = numerator(v) / denominator(v);
    if (Rational(c) < v) c += 1;
    b.count_estimate = c;
  } else {
    long double v = static_cast<long double>(K) * std::exp2(to_ld(t));
    b.count_estimate = BigInt(static_cast<long long>(std::ceil(v)));
  }
  if (b.count_estimate < 1) b.count_estimate = 1;
  return b;
}

/// Box cover of a good leaf: sigma dyadic in [2^-40 eps, eps], rho dyadic in
/// [sigma^(m_right - m_left), 1].
inline BoxSpec box_cover(const ResolutionTree &tree, const RegionNode &leaf, const Rational &sigma, const Rational &rho,
                         std::int64_t K) {
  if (!leaf.good()) throw std::invalid_argument("box_cover needs a good leaf");
  auto ls = detail::dyadic_log2(sigma), lr = detail::dyadic_log2(rho);
  if (!ls || !lr) throw std::invalid_argument("sigma and rho must be dyadic");
  if (sigma > tree.epsilon || sigma * Rational(BigInt(1) << 40) < tree.epsilon)
    throw std::invalid_argument("sigma outside [2^-40 eps, eps]");
  if (rho > 1) throw std::invalid_argument("rho exceeds 1");
  if (leaf.kind == RegionKind::GoodVertex && leaf.m_right) {
    // rho >= sigma^(m_right - m_left)  <=>  log2 rho >= log2 sigma * dm
    Exponent dm = *leaf.m_right - leaf.m_left;
    if (Exponent(*lr) < Exponent(*ls) * dm) throw std::invalid_argument("rho below sigma^(m_right - m_left)");
  }
  std::vector<Exponent> ms;
  for (const auto &st : leaf.path) ms.push_back(st.m);
  BoxCase kind;
  if (leaf.kind == RegionKind::GoodEdge) {
    ms.push_back(leaf.edge_m);
    kind = BoxCase::EdgeLeaf;
  } else if (leaf.depth >= 1) {
    ms.push_back(leaf.m_left);
    kind = BoxCase::VertexDeep;
  } else {
    ms.push_back(leaf.m_left);
    kind = BoxCase::VertexTop;
  }
  return box_dimensions(kind, ms, sigma, rho, K);
}

}  // namespace trilinear
