#pragma once

#include "trilinear/fracpoly.hpp"
#include "trilinear/newton.hpp"
#include "trilinear/univariate.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace trilinear {

struct LinearOrders {
  unsigned alpha = 0, beta = 0, gamma = 0, d0 = 0;
  /// d0 recomputed with non-real linear factors admitted (diagnostic).
  unsigned d0_complex = 0;
};

/// Orders of x, y, x+y and of the other real linear factors in a homogeneous H.
inline LinearOrders linear_orders(const FracPoly &H) {
  if (H.is_zero()) throw std::invalid_argument("linear_orders of the zero polynomial");
  if (!H.has_integer_exponents()) throw std::invalid_argument("linear_orders requires integer exponents");
  if (!is_homogeneous(H)) throw std::invalid_argument("linear_orders requires a homogeneous polynomial");
  LinearOrders lo;
  Exponent amin = H.begin()->first.first, bmin = H.begin()->first.second;
  for (const auto &[k, c] : H) {
    amin = std::min(amin, k.first);
    bmin = std::min(bmin, k.second);
  }
  lo.alpha = static_cast<unsigned>(amin.numerator());
  lo.beta = static_cast<unsigned>(bmin.numerator());

  // H(1, t); a pure x-power gives a nonzero constant and no roots.
  std::vector<Rational> coeffs;
  for (const auto &[k, c] : H) {
    auto deg = static_cast<std::size_t>(k.second.numerator());
    if (coeffs.size() <= deg) coeffs.resize(deg + 1);
    coeffs[deg] += c;
  }
  UPoly h1(std::move(coeffs));
  if (h1.degree() <= 0) return lo;
  RootList rl = roots_with_multiplicity(h1);
  lo.gamma = rl.multiplicity_of(Rational(-1));
  for (const auto &r : rl.roots)
    if (!r.contains(Rational(-1))) lo.d0 = std::max(lo.d0, r.multiplicity);
  lo.d0_complex = std::max(lo.d0, rl.max_complex_multiplicity);
  return lo;
}

struct D1Detail {
  unsigned d1 = 0;
  unsigned d1_complex = 0;
  /// Frame and edge realizing d1 (when d1 > 0).
  std::optional<Frame> frame;
  std::optional<Edge> edge;
};

/// Max vanishing order over compact edges with m != 1 in the three frames.
inline D1Detail compute_d1_detail(const FracPoly &P) {
  if (P.is_zero()) throw std::invalid_argument("compute_d1 of the zero polynomial");
  D1Detail out;
  for (Frame f : {Frame::XY, Frame::X_XPY, Frame::Y_XPY}) {
    FracPoly Q = reframe(P, f);
    NewtonPolygon np = newton_polygon(Q);
    for (const auto &e : np.edges) {
      if (e.m == Exponent(1)) continue;
      VanishingOrder vo = edge_vanishing_order_detail(Q, e);
      if (vo.real > out.d1) {
        out.d1 = vo.real;
        out.frame = f;
        out.edge = e;
      }
      out.d1_complex = std::max(out.d1_complex, vo.with_complex);
    }
  }
  return out;
}

inline unsigned compute_d1(const FracPoly &P) { return compute_d1_detail(P).d1; }

struct PhaseInvariants {
  int n = 0;
  unsigned alpha = 0, beta = 0, gamma = 0, d0 = 0, d1 = 0, kappa = 0;
  Rational delta;
  int mu = 0;
  bool sharp = false;
  std::string case_label;

  // Diagnostics.
  unsigned d0_complex = 0, d1_complex = 0;
  FracPoly P;       // DS
  FracPoly lowest;  // P_{n-3}
};

struct DegenerateReport {
  std::string reason = "DS is identically zero";
};

using DecayResult = std::variant<PhaseInvariants, DegenerateReport>;

/// n = 3 + order of vanishing of DS at the origin, or nullopt when DS = 0.
inline std::optional<int> relative_multiplicity_of_ds(const FracPoly &P) {
  if (P.is_zero()) return std::nullopt;
  if (!P.has_integer_exponents()) throw std::invalid_argument("DS must have integer exponents");
  return 3 + static_cast<int>(lowest_part(P).degree.numerator());
}

inline std::optional<int> relative_multiplicity(const FracPoly &S) { return relative_multiplicity_of_ds(apply_D(S)); }

/// Fills delta, mu, sharp and case_label from n and the orders.
inline void classify(PhaseInvariants &inv) {
  const int n = inv.n;
  const int k = static_cast<int>(inv.kappa);
  inv.delta = Rational(1) / Rational(std::max({Rational(4), Rational(k + 2), Rational(n, 2)}));
  if (n == 3) {
    inv.mu = 0, inv.sharp = false, inv.case_label = "2(a) n=3";
  } else if (n <= 7) {
    inv.mu = 1, inv.sharp = false, inv.case_label = "2(b) 4<=n<=7";
  } else if (n == 8) {
    inv.mu = 2, inv.sharp = false, inv.case_label = "2(c) n=8";
  } else if (2 * k > n - 4) {
    inv.mu = 0, inv.sharp = false, inv.case_label = "2(a) κ > n/2−2";
  } else if (2 * k < n - 4) {
    inv.mu = 0, inv.sharp = true, inv.case_label = "1(a) κ < n/2−2";
  } else {
    bool linear = inv.alpha == inv.kappa || inv.beta == inv.kappa || inv.gamma == inv.kappa || inv.d0 + 1 == inv.kappa;
    inv.sharp = true;
    if (linear)
      inv.mu = 1, inv.case_label = "1(b) κ = n/2−2";
    else
      inv.mu = 0, inv.case_label = "1(a) d₁+1 = κ = n/2−2";
  }
}

/// Decay invariants of the phase S (or of P = DS directly when as_ds).
inline DecayResult decay_report(const FracPoly &input, bool as_ds) {
  FracPoly P = as_ds ? input : apply_D(input);
  auto n = relative_multiplicity_of_ds(P);
  if (!n) return DegenerateReport{};
  PhaseInvariants inv;
  inv.n = *n;
  inv.P = P;
  inv.lowest = lowest_part(P).part;
  LinearOrders lo = linear_orders(inv.lowest);
  inv.alpha = lo.alpha, inv.beta = lo.beta, inv.gamma = lo.gamma, inv.d0 = lo.d0, inv.d0_complex = lo.d0_complex;
  D1Detail d1 = compute_d1_detail(P);
  inv.d1 = d1.d1, inv.d1_complex = d1.d1_complex;
  inv.kappa = std::max({inv.alpha, inv.beta, inv.gamma, inv.d0 + 1, inv.d1 + 1});
  classify(inv);
  return inv;
}

}  // namespace trilinear
