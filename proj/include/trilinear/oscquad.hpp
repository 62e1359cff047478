#pragma once

#include "trilinear/fracpoly.hpp"
#include "trilinear/invariants.hpp"
#include "trilinear/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trilinear {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Cutoffs

/// Product cutoff phi(x) phi(y) on [-w, w]^2.
///
/// Bump profile: 1 on |t| <= w/2, 0 on |t| >= w, and 1 - (10 s^3 - 15 s^4 + 6 s^5)
/// with s = (|t| - w/2) / (w/2) in between (C^2 across both joins).
struct CutoffSpec {
  enum class Shape { Bump, Indicator };
  Shape shape = Shape::Bump;
  double half_width = 0.5;

  static CutoffSpec bump(double w = 0.5) { return {Shape::Bump, w}; }
  static CutoffSpec indicator(double w = 0.5) { return {Shape::Indicator, w}; }

  double profile(double t) const {
    double a = std::fabs(t), w = half_width;
    if (a >= w) return 0.0;
    if (shape == Shape::Indicator || a <= w / 2) return 1.0;
    double s = (a - w / 2) / (w / 2);
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
  }
  double operator()(double x, double y) const { return profile(x) * profile(y); }

  /// Closed form of the integral of phi over the plane.
  double integral() const {
    double one_d = shape == Shape::Indicator ? 2 * half_width : 1.5 * half_width;
    return one_d * one_d;
  }
  double support_area() const { return 4 * half_width * half_width; }
};

inline const char *shape_name(CutoffSpec::Shape s) { return s == CutoffSpec::Shape::Bump ? "bump" : "indicator"; }

struct QuadConfig {
  /// lambda * |Hess S| * h^2 <= 2 pi / points_per_period for the cell size h.
  int points_per_period = 10;
  /// Minimum number of cells per side (rounded up to a multiple of 4).
  int base_grid = 16;
  /// Accept when halving h moves the value by at most this times the support area.
  double refinement_tolerance = 1e-4;
  /// Cells per side beyond which the oscillation counts as unresolvable.
  int max_cells = 1 << 14;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f, g, h of the form. Each factor is amp(t) e^{i lambda phase(t)}: the phase
/// part is folded into S exactly, the amplitude must be bounded by 1.
struct TrilinearInputs {
  std::function<Complex(double)> f, g, h;  // empty means 1
  FracPoly f_phase, g_phase, h_phase;      // univariate, written in x
};

// ---------------------------------------------------------------------------
// Degenerate phases

struct DegenerateSplit {
  FracPoly A, B, C;  // S = A(x) + B(y) + C(x + y), each written in x
};

/// Exact decomposition of a polynomial annihilated by D, or nullopt.
inline std::optional<DegenerateSplit> split_degenerate(const FracPoly &S) {
  if (!S.has_integer_exponents()) return std::nullopt;
  std::int64_t deg = 0;
  for (const auto &[k, c] : S) deg = std::max(deg, (k.first + k.second).numerator());
  DegenerateSplit out;
  FracPoly rebuilt;
  for (std::int64_t d = 0; d <= deg; ++d) {
    Rational ax = S.coeff(Exponent(d), Exponent(0)), by = S.coeff(Exponent(0), Exponent(d));
    if (d == 0) {
      out.A.add_term(ax, 0, 0);
      rebuilt.add_term(ax, 0, 0);
      continue;
    }
    Rational c = d >= 2 ? S.coeff(Exponent(d - 1), Exponent(1)) / Rational(d) : Rational(0);
    out.A.add_term(ax - c, d, 0);
    out.B.add_term(by - c, d, 0);
    out.C.add_term(c, d, 0);
    rebuilt.add_term(ax - c, d, 0);
    rebuilt.add_term(by - c, 0, d);
    rebuilt += FracPoly::monomial(c, 0, 0) * (FracPoly::x() + FracPoly::y()).pow(static_cast<unsigned>(d));
  }
  if (rebuilt != S) return std::nullopt;
  return out;
}

/// Inputs f = e^{-i lambda A}, g = e^{-i lambda B}, h = e^{-i lambda C} that
/// cancel a degenerate phase completely.
inline TrilinearInputs cancelling_inputs(const DegenerateSplit &s) { return {{}, {}, {}, -s.A, -s.B, -s.C}; }

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

/// Univariate a(t) re-expressed as a(x), a(y) or a(x + y).
inline FracPoly lift(const FracPoly &a, int which) {
  FracPoly out;
  for (const auto &[k, c] : a) {
    if (k.second != Exponent(0) || !is_integer(k.first))
      throw std::invalid_argument("input phases must be polynomials in one variable");
    auto e = static_cast<unsigned>(k.first.numerator());
    if (which == 0)
      out.add_term(c, k.first, 0);
    else if (which == 1)
      out.add_term(c, 0, k.first);
    else
      out += FracPoly::constant(c) * (FracPoly::x() + FracPoly::y()).pow(e);
  }
  return out;
}

/// Dense integer-exponent polynomial in double precision, Horner in y.
class DensePoly {
 public:
  DensePoly() = default;
  explicit DensePoly(const FracPoly &p) {
    if (!p.has_integer_exponents()) throw std::invalid_argument("phase must have integer exponents");
    for (const auto &[k, c] : p) {
      dx_ = std::max<int>(dx_, static_cast<int>(k.first.numerator()));
      dy_ = std::max<int>(dy_, static_cast<int>(k.second.numerator()));
    }
    c_.assign(static_cast<std::size_t>((dx_ + 1) * (dy_ + 1)), 0.0);
    for (const auto &[k, c] : p) at(static_cast<int>(k.first.numerator()), static_cast<int>(k.second.numerator())) = to_ld(c);
  }

  int deg_y() const { return dy_; }

  /// Coefficients of y^j at fixed x.
  void column(double x, std::vector<double> &out) const {
    out.assign(static_cast<std::size_t>(dy_ + 1), 0.0);
    for (int j = 0; j <= dy_; ++j) {
      double s = 0;
      for (int i = dx_; i >= 0; --i) s = s * x + at(i, j);
      out[static_cast<std::size_t>(j)] = s;
    }
  }
  static double horner(const std::vector<double> &col, double y) {
    double s = 0;
    for (auto it = col.rbegin(); it != col.rend(); ++it) s = s * y + *it;
    return s;
  }
  double operator()(double x, double y) const {
    double s = 0;
    for (int j = dy_; j >= 0; --j) {
      double cj = 0;
      for (int i = dx_; i >= 0; --i) cj = cj * x + at(i, j);
      s = s * y + cj;
    }
    return s;
  }

 private:
  int dx_ = 0, dy_ = 0;
  std::vector<double> c_;
  double &at(int i, int j) { return c_[static_cast<std::size_t>(i * (dy_ + 1) + j)]; }
  double at(int i, int j) const { return c_[static_cast<std::size_t>(i * (dy_ + 1) + j)]; }
};

/// Termwise bound of |S_xx|, |S_xy|, |S_yy| on [-w, w]^2 folded into a bound
/// on the spectral norm of the Hessian.
inline double hessian_bound(const FracPoly &S, double w) {
  double b[3] = {0, 0, 0};
  const int da[3] = {2, 1, 0}, db[3] = {0, 1, 2};
  for (const auto &[k, c] : S) {
    for (int t = 0; t < 3; ++t) {
      auto [fx, zx] = falling(k.first, da[t]);
      auto [fy, zy] = falling(k.second, db[t]);
      if (zx || zy) continue;
      b[t] += std::fabs(static_cast<double>(to_ld(c) * fx * fy)) * std::pow(w, to_ld(k.first) - da[t]) *
              std::pow(w, to_ld(k.second) - db[t]);
    }
  }
  return std::sqrt(b[0] * b[0] + 2 * b[1] * b[1] + b[2] * b[2]);
}

// Three-point Gauss-Legendre nodes on [-1, 1] and the monomial coefficients
// of their Lagrange basis.
constexpr std::array<double, 3> kNodes = {-0.77459666924148337704, 0.0, 0.77459666924148337704};
// l_0 = (5/6)(t^2 - t sqrt(3/5)), l_1 = 1 - (5/3) t^2, l_2 = (5/6)(t^2 + t sqrt(3/5))
constexpr double kS = 0.77459666924148337704;
constexpr std::array<std::array<double, 3>, 3> kLagrange = {{
    {0.0, -5.0 / 6.0 * kS, 5.0 / 6.0},
    {1.0, 0.0, -5.0 / 3.0},
    {0.0, 5.0 / 6.0 * kS, 5.0 / 6.0},
}};

/// Filon weights: integral over [-1, 1] of l_j(t) e^{i w t}.
inline std::array<Complex, 3> filon_weights(double w) {
  std::array<Complex, 3> m{};  // moments of t^k e^{iwt}
  if (std::fabs(w) < 2.0) {
    Complex term = 1.0;  // (iw)^n / n!
    for (int n = 0; n < 60; ++n) {
      for (int k = 0; k < 3; ++k)
        if ((k + n) % 2 == 0) m[static_cast<std::size_t>(k)] += term * (2.0 / (k + n + 1));
      term *= Complex(0.0, w) / double(n + 1);
      if (std::abs(term) < 1e-18) break;
    }
  } else {
    const Complex iw(0.0, w);
    const Complex ep(std::cos(w), std::sin(w)), em = std::conj(ep);
    m[0] = (ep - em) / iw;
    for (int k = 1; k < 3; ++k) {
      Complex boundary = (k % 2 ? ep + em : ep - em) / iw;
      m[static_cast<std::size_t>(k)] = boundary - double(k) / iw * m[static_cast<std::size_t>(k - 1)];
    }
  }
  std::array<Complex, 3> wts{};
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k) wts[j] += kLagrange[j][k] * m[k];
  return wts;
}

struct GridSum {
  Complex value;
  double abs_bound;  // integral of |amplitude|, for the triangle inequality
};

/// Phase-linearised Filon rule on an n x n grid over [-w, w]^2: on each cell
/// the phase is split as S(c) + grad S(c).(z - c) + rest, the linear part is
/// integrated exactly against the Lagrange basis and the rest stays in the
/// amplitude.
inline GridSum filon_grid(const DensePoly &S, const DensePoly &Sx, const DensePoly &Sy, double lambda,
                          const CutoffSpec &cut, const TrilinearInputs &in, int n) {
  const double w = cut.half_width, h = 2 * w / n, half = h / 2;
  std::vector<Complex> rows(static_cast<std::size_t>(n));
  std::vector<double> abs_rows(static_cast<std::size_t>(n));

  // Column data shared by every row.
  std::vector<double> ys(static_cast<std::size_t>(3 * n)), ycen(static_cast<std::size_t>(n));
  std::vector<Complex> gy(static_cast<std::size_t>(3 * n));
  for (int j = 0; j < n; ++j) {
    ycen[static_cast<std::size_t>(j)] = -w + (j + 0.5) * h;
    for (int b = 0; b < 3; ++b) {
      double y = ycen[static_cast<std::size_t>(j)] + half * kNodes[static_cast<std::size_t>(b)];
      ys[static_cast<std::size_t>(3 * j + b)] = y;
      Complex v = cut.profile(y);
      if (in.g) v *= in.g(y);
      gy[static_cast<std::size_t>(3 * j + b)] = v;
    }
  }

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const double xc = -w + (static_cast<double>(i) + 0.5) * h;
    double xs[3];
    Complex fx[3];
    std::vector<double> col[3], colc, colx, coly;
    for (int a = 0; a < 3; ++a) {
      xs[a] = xc + half * kNodes[static_cast<std::size_t>(a)];
      fx[a] = cut.profile(xs[a]);
      if (in.f) fx[a] *= in.f(xs[a]);
      S.column(xs[a], col[a]);
    }
    if (fx[0] == 0.0 && fx[1] == 0.0 && fx[2] == 0.0) return;
    S.column(xc, colc);
    Sx.column(xc, colx);
    Sy.column(xc, coly);
    std::array<Complex, 3> wx{};
    Complex row = 0;
    double abs_row = 0;
    for (int j = 0; j < n; ++j) {
      const std::size_t J = static_cast<std::size_t>(j);
      if (gy[3 * J] == 0.0 && gy[3 * J + 1] == 0.0 && gy[3 * J + 2] == 0.0) continue;
      const double yc = ycen[J];
      const double s0 = DensePoly::horner(colc, yc), gx = DensePoly::horner(colx, yc), gyv = DensePoly::horner(coly, yc);
      wx = filon_weights(lambda * gx * half);
      const auto wy = filon_weights(lambda * gyv * half);
      Complex cell = 0;
      double abs_cell = 0;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const double y = ys[3 * J + static_cast<std::size_t>(b)];
          Complex amp = fx[a] * gy[3 * J + static_cast<std::size_t>(b)];
          if (amp == 0.0) continue;
          if (in.h) amp *= in.h(xs[a] + y);
          const double rest = DensePoly::horner(col[a], y) - s0 - gx * (xs[a] - xc) - gyv * (y - yc);
          const double ph = lambda * rest;
          cell += wx[static_cast<std::size_t>(a)] * wy[static_cast<std::size_t>(b)] * amp * Complex(std::cos(ph), std::sin(ph));
          abs_cell += std::abs(amp) * (5.0 / 9.0 + (a == 1) * 3.0 / 9.0) * (5.0 / 9.0 + (b == 1) * 3.0 / 9.0);
        }
      }
      const double p0 = lambda * s0;
      row += cell * Complex(std::cos(p0), std::sin(p0));
      abs_row += abs_cell;
    }
    rows[i] = row * (half * half);
    abs_rows[i] = abs_row * (half * half);
  });

  GridSum out{0.0, 0.0};
  for (std::size_t i = 0; i < rows.size(); ++i) out.value += rows[i], out.abs_bound += abs_rows[i];
  return out;
}

}  // namespace detail

struct QuadResult {
  Complex value;
  double error = 0;  // |I(h) - I(h/2)|
  int cells = 0;     // cells per side of the accepted (finer) grid
  double relative_error() const { return std::abs(value) > 0 ? error / std::abs(value) : error; }
};

/// The form  int int e^{i lambda S} f(x) g(y) h(x+y) phi(x, y) dx dy.
inline QuadResult trilinear_form(const FracPoly &S, double lambda, const TrilinearInputs &in = {},
                                 const CutoffSpec &cut = {}, const QuadConfig &cfg = {}) {
  if (cfg.points_per_period < 10) throw std::invalid_argument("points_per_period must be at least 10");
  if (!(cut.half_width > 0)) throw std::invalid_argument("cutoff half-width must be positive");
  FracPoly phase = S + detail::lift(in.f_phase, 0) + detail::lift(in.g_phase, 1) + detail::lift(in.h_phase, 2);
  const detail::DensePoly P(phase), Px(derivative_x(phase)), Py(derivative_y(phase));

  const double w = cut.half_width;
  const double H = detail::hessian_bound(phase, w);
  // Largest h with lambda H h^2 <= 2 pi / ppp, as a count of cells per side.
  double need = H > 0 ? 2 * w * std::sqrt(std::fabs(lambda) * H * cfg.points_per_period / (2 * M_PI)) : 0;
  int n = std::max(cfg.base_grid, 4);
  while (n < need) n *= 2;
  n = (n + 3) / 4 * 4;

  detail::GridSum coarse{}, fine{};
  bool have_coarse = false;
  for (;;) {
    if (2 * n > cfg.max_cells)
      throw QuadratureError("unresolvable oscillation: grid budget of " + std::to_string(cfg.max_cells) +
                            " cells per side exceeded at lambda = " + std::to_string(lambda));
    if (!have_coarse) coarse = detail::filon_grid(P, Px, Py, lambda, cut, in, n);
    fine = detail::filon_grid(P, Px, Py, lambda, cut, in, 2 * n);
    double diff = std::abs(fine.value - coarse.value);
    if (diff <= cfg.refinement_tolerance * cut.support_area()) {
      // |Lambda| <= int |f g h phi| <= int phi.
      if (std::abs(fine.value) > fine.abs_bound * (1 + 1e-9) + 1e-12)
        throw QuadratureError("quadrature violates the triangle inequality");
      return {fine.value, diff, 2 * n};
    }
    coarse = fine;
    have_coarse = true;
    n *= 2;
  }
}

// ---------------------------------------------------------------------------
// Decay fits

struct DecayFit {
  std::vector<double> lambdas;
  std::vector<Complex> values;
  std::vector<double> magnitudes;
  std::vector<double> quad_errors;  // relative refinement differences
  double predicted_delta = 0;
  int predicted_mu = 0;
  bool degenerate = false;
  double fitted_delta = 0;
  std::optional<double> fitted_mu;  // only fitted when predicted_mu > 0
  double residual = 0;              // RMS of the log-residuals
  std::vector<double> envelope;     // |Lambda| lambda^delta / log(2+lambda)^mu, over its first entry
  double envelope_constant = 0;     // max of envelope
  double envelope_ratio() const { return envelope.empty() ? 0 : envelope.back() / envelope.front(); }
};

inline std::vector<double> log_spaced(double lo, double hi, int points) {
  if (!(lo > 0) || !(hi > lo) || points < 2) throw std::invalid_argument("need 0 < lo < hi and at least 2 points");
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (points - 1)));
  return out;
}

/// Least squares of log|Lambda| on (-log lambda, [log log(2+lambda)], 1).
inline void fit_decay(DecayFit &fit) {
  const auto m = static_cast<Eigen::Index>(fit.lambdas.size());
  const bool with_mu = fit.predicted_mu > 0;
  Eigen::MatrixXd A(m, with_mu ? 3 : 2);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double l = fit.lambdas[static_cast<std::size_t>(i)];
    A(i, 0) = -std::log(l);
    A(i, 1) = 1.0;
    if (with_mu) A(i, 2) = std::log(std::log(2 + l));
    double mag = fit.magnitudes[static_cast<std::size_t>(i)];
    b(i) = std::log(std::max(mag, std::numeric_limits<double>::min()));
  }
  Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  fit.fitted_delta = x(0);
  fit.fitted_mu = with_mu ? std::optional<double>(x(2)) : std::nullopt;
  fit.residual = std::sqrt((A * x - b).squaredNorm() / double(m));
}

/// Evaluates the form on the lambda grid and fits the decay. With no inputs
/// given, f = g = h = 1, except for degenerate phases, where the inputs that
/// cancel the phase are used (with f = g = h = 1 those still decay).
inline DecayFit decay_fit(const FracPoly &S, const std::vector<double> &lambdas, const CutoffSpec &cut = {},
                          const QuadConfig &cfg = {}, const std::optional<TrilinearInputs> &inputs = std::nullopt) {
  if (lambdas.size() < 2) throw std::invalid_argument("decay_fit needs at least two lambdas");
  if (!std::is_sorted(lambdas.begin(), lambdas.end()) || !(lambdas.front() > 0))
    throw std::invalid_argument("lambdas must be positive and increasing");
  DecayFit fit;
  fit.lambdas = lambdas;
  TrilinearInputs in;
  DecayResult inv = decay_report(S, false);
  if (auto *p = std::get_if<PhaseInvariants>(&inv)) {
    fit.predicted_delta = static_cast<double>(to_ld(p->delta));
    fit.predicted_mu = p->mu;
  } else {
    fit.degenerate = true;
    if (!inputs) {
      auto split = split_degenerate(S);
      if (!split) throw std::logic_error("degenerate phase without an exact splitting");
      in = cancelling_inputs(*split);
    }
  }
  if (inputs) in = *inputs;
  for (double l : lambdas) {
    QuadResult q = trilinear_form(S, l, in, cut, cfg);
    fit.values.push_back(q.value);
    fit.magnitudes.push_back(std::abs(q.value));
    fit.quad_errors.push_back(q.relative_error());
  }
  fit_decay(fit);
  double first = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    double e = fit.magnitudes[i] * std::pow(lambdas[i], fit.predicted_delta) /
               std::pow(std::log(2 + lambdas[i]), fit.predicted_mu);
    if (i == 0) first = e;
    fit.envelope.push_back(first > 0 ? e / first : 0.0);
  }
  fit.envelope_constant = *std::max_element(fit.envelope.begin(), fit.envelope.end());
  return fit;
}

// ---------------------------------------------------------------------------
// Sublevel sets

struct SublevelMethod {
  enum class Kind { Grid, MonteCarlo };
  Kind kind = Kind::Grid;
  std::int64_t n = 4096;   // grid cells per side, or Monte Carlo samples
  std::uint64_t seed = 1;  // Monte Carlo only

  static SublevelMethod grid(std::int64_t n) { return {Kind::Grid, n, 0}; }
  static SublevelMethod monte_carlo(std::int64_t m, std::uint64_t seed) { return {Kind::MonteCarlo, m, seed}; }
};

struct SublevelEstimate {
  double measure = 0;
  double stderr_ = 0;  // zero for the grid method
};

struct SublevelReport {
  std::vector<double> epsilons;  // decreasing
  std::vector<SublevelEstimate> measures;
  /// Slope of log measure against log eps for the better of the two models
  /// measure ~ eps^a and measure ~ eps^a log(1/eps).
  double fitted_exponent = 0;
  double power_exponent = 0, power_residual = 0;
  double log_exponent = 0, log_residual = 0;
  bool log_model_preferred = false;
};

namespace detail {

/// |S| at the midpoints of an n x n grid over [-w, w]^2, sorted.
inline std::vector<double> sorted_grid_values(const FracPoly &S, std::int64_t n, double w) {
  if (n < 1) throw std::invalid_argument("grid size must be positive");
  const DensePoly P(S);
  const double h = 2 * w / static_cast<double>(n);
  std::vector<double> v(static_cast<std::size_t>(n * n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    double x = -w + (static_cast<double>(i) + 0.5) * h;
    std::vector<double> col;
    P.column(x, col);
    for (std::int64_t j = 0; j < n; ++j)
      v[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
          std::fabs(DensePoly::horner(col, -w + (static_cast<double>(j) + 0.5) * h));
  });
  std::sort(v.begin(), v.end());
  return v;
}

inline SublevelEstimate monte_carlo_measure(const FracPoly &S, double eps, std::int64_t m, std::uint64_t seed, double w) {
  if (m < 2) throw std::invalid_argument("Monte Carlo needs at least two samples");
  const DensePoly P(S);
  constexpr std::size_t kChunks = 64;
  std::vector<std::int64_t> hits(kChunks, 0);
  parallel_for(kChunks, [&](std::size_t c) {
    auto rng = stream_rng(seed, c);
    std::uniform_real_distribution<double> u(-w, w);
    std::int64_t count = m / static_cast<std::int64_t>(kChunks) + (static_cast<std::int64_t>(c) < m % static_cast<std::int64_t>(kChunks));
    for (std::int64_t k = 0; k < count; ++k) {
      double x = u(rng), y = u(rng);
      if (std::fabs(P(x, y)) < eps) ++hits[c];
    }
  });
  std::int64_t total = 0;
  for (auto h : hits) total += h;
  double area = 4 * w * w, p = double(total) / double(m);
  return {area * p, area * std::sqrt(p * (1 - p) / double(m))};
}

}  // namespace detail

/// Area of {|S| < eps} in [-w, w]^2 (w = 1 by default).
inline SublevelEstimate sublevel_measure(const FracPoly &S, double eps, const SublevelMethod &method = {}, double w = 1.0) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (method.kind == SublevelMethod::Kind::MonteCarlo) return detail::monte_carlo_measure(S, eps, method.n, method.seed, w);
  auto v = detail::sorted_grid_values(S, method.n, w);
  double cell = (2 * w / double(method.n)) * (2 * w / double(method.n));
  auto count = std::lower_bound(v.begin(), v.end(), eps) - v.begin();
  return {double(count) * cell, 0.0};
}

inline SublevelReport sublevel_report(const FracPoly &S, std::vector<double> epsilons, const SublevelMethod &method = {},
                                      double w = 1.0) {
  if (epsilons.size() < 2) throw std::invalid_argument("sublevel_report needs at least two epsilons");
  for (double e : epsilons)
    if (!(e > 0 && e < 1)) throw std::invalid_argument("epsilons must lie in (0, 1)");
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  SublevelReport rep;
  rep.epsilons = epsilons;
  if (method.kind == SublevelMethod::Kind::Grid) {
    auto v = detail::sorted_grid_values(S, method.n, w);
    double cell = (2 * w / double(method.n)) * (2 * w / double(method.n));
    for (double e : epsilons) rep.measures.push_back({double(std::lower_bound(v.begin(), v.end(), e) - v.begin()) * cell, 0.0});
  } else {
    for (double e : epsilons) rep.measures.push_back(detail::monte_carlo_measure(S, e, method.n, method.seed, w));
  }

  auto fit = [&](bool with_log, double &slope, double &resid) {
    const auto m = static_cast<Eigen::Index>(epsilons.size());
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      double e = epsilons[static_cast<std::size_t>(i)];
      double meas = std::max(rep.measures[static_cast<std::size_t>(i)].measure, std::numeric_limits<double>::min());
      A(i, 0) = std::log(e);
      A(i, 1) = 1.0;
      b(i) = std::log(meas) - (with_log ? std::log(std::log(1 / e)) : 0.0);
    }
    Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
    slope = x(0);
    resid = std::sqrt((A * x - b).squaredNorm() / double(m));
  };
  fit(false, rep.power_exponent, rep.power_residual);
  fit(true, rep.log_exponent, rep.log_residual);
  rep.log_model_preferred = rep.log_residual < rep.power_residual;
  rep.fitted_exponent = rep.log_model_preferred ? rep.log_exponent : rep.power_exponent;
  return rep;
}

}  // namespace trilinear
