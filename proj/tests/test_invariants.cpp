#include "oracles.hpp"

#include "trilinear/invariants.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace trilinear;

namespace {

FracPoly P(const char *s) { return parse_poly(s); }

PhaseInvariants get(const char *s, bool as_ds = false) {
  DecayResult r = decay_report(P(s), as_ds);
  EXPECT_TRUE(std::holds_alternative<PhaseInvariants>(r)) << s;
  return std::get<PhaseInvariants>(r);
}

void expect_matches_oracle(const PhaseInvariants &inv, const oracle::Invariants &o, const std::string &what) {
  EXPECT_EQ(inv.n, o.n) << what;
  EXPECT_EQ(inv.alpha, o.alpha) << what;
  EXPECT_EQ(inv.beta, o.beta) << what;
  EXPECT_EQ(inv.gamma, o.gamma) << what;
  EXPECT_EQ(inv.d0, o.d0) << what;
  EXPECT_EQ(inv.d1, o.d1) << what;
  EXPECT_EQ(inv.kappa, o.kappa) << what;
  EXPECT_EQ(inv.delta, o.delta) << what;
}

/// Random nondegenerate phases of total degree <= 9.
std::vector<FracPoly> corpus(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<FracPoly> out;
  while (out.size() < count) {
    FracPoly s = oracle::random_poly(rng, 6, 6);
    FracPoly trimmed;
    for (const auto &[k, c] : s)
      if (k.first + k.second <= Exponent(9)) trimmed.add_term(c, k.first, k.second);
    if (!apply_D(trimmed).is_zero()) out.push_back(trimmed);
  }
  return out;
}

}  // namespace

TEST(RelativeMultiplicity, Examples) {
  EXPECT_EQ(apply_D(P("x^2*y")), P("2"));
  EXPECT_EQ(relative_multiplicity(P("x^2*y")), 3);
  EXPECT_EQ(relative_multiplicity(P("x^2*y^2")), 4);
  EXPECT_FALSE(relative_multiplicity(P("x^3 + y^3 + (x+y)^3")).has_value());
}

TEST(LinearOrders, Examples) {
  LinearOrders a = linear_orders(P("-x^3*y^2"));
  EXPECT_EQ(std::tie(a.alpha, a.beta, a.gamma, a.d0), std::make_tuple(3u, 2u, 0u, 0u));
  LinearOrders b = linear_orders(P("4*y - 4*x"));
  EXPECT_EQ(std::tie(b.alpha, b.beta, b.gamma, b.d0), std::make_tuple(0u, 0u, 0u, 1u));
  LinearOrders c = linear_orders(P("x*y*(x+y)"));
  EXPECT_EQ(std::tie(c.alpha, c.beta, c.gamma, c.d0), std::make_tuple(1u, 1u, 1u, 0u));
  LinearOrders d = linear_orders(P("x^4"));
  EXPECT_EQ(std::tie(d.alpha, d.beta, d.gamma, d.d0), std::make_tuple(4u, 0u, 0u, 0u));
  // complex factors are diagnostics only
  LinearOrders e = linear_orders(P("(x^2 + y^2)^2"));
  EXPECT_EQ(e.d0, 0u);
  EXPECT_EQ(e.d0_complex, 2u);
  EXPECT_THROW(linear_orders(P("x + y^2")), std::invalid_argument);
}

TEST(D1, Examples) {
  EXPECT_EQ(compute_d1(P("4*y - 4*x")), 0u);
  EXPECT_EQ(compute_d1(P("x^5*y - x^3*y^2 + x^2*y^4")), 1u);
  EXPECT_EQ(compute_d1(P("7")), 0u);
}

TEST(DecayReport, ExamplePhases) {
  PhaseInvariants a = get("x^2*y");
  EXPECT_EQ(std::tie(a.n, a.kappa, a.mu), std::make_tuple(3, 1u, 0));
  EXPECT_EQ(a.delta, Rational(1, 4));
  EXPECT_EQ(a.case_label, "2(a) n=3");

  PhaseInvariants b = get("x^2*y^2");
  EXPECT_EQ(std::tie(b.n, b.kappa, b.mu), std::make_tuple(4, 2u, 1));
  EXPECT_EQ(b.delta, Rational(1, 4));

  PhaseInvariants c = get("x^5*y - x^3*y^2 + x^2*y^4", true);
  EXPECT_EQ(std::tie(c.n, c.alpha, c.beta, c.gamma, c.d0, c.d1, c.kappa, c.mu),
            std::make_tuple(8, 3u, 2u, 0u, 0u, 1u, 3u, 2));
  EXPECT_EQ(c.delta, Rational(1, 5));
  EXPECT_EQ(c.case_label, "2(c) n=8");

  PhaseInvariants d = get("x^9 + y^9", true);
  EXPECT_EQ(std::tie(d.n, d.alpha, d.beta, d.gamma, d.d0, d.d1, d.kappa, d.mu),
            std::make_tuple(12, 0u, 0u, 1u, 0u, 0u, 1u, 0));
  EXPECT_EQ(d.delta, Rational(1, 6));
  EXPECT_TRUE(d.sharp);
  EXPECT_EQ(d.case_label, "1(a) κ < n/2−2");

  EXPECT_TRUE(std::holds_alternative<DegenerateReport>(decay_report(P("x^3 + y^3 + (x+y)^3"), false)));
  EXPECT_TRUE(std::holds_alternative<DegenerateReport>(decay_report(P("x*y"), false)));
}

TEST(DecayReport, BruteForceOracleOnExamples) {
  struct Case {
    const char *text;
    bool as_ds;
  };
  for (Case c : {Case{"x^2*y", false}, {"x^2*y^2", false}, {"x^5*y - x^3*y^2 + x^2*y^4", true}, {"x^9 + y^9", true},
                 {"(y - x)^2*(y + 2*x)^3", true}, {"(y - x^2)^2*(y + x^3)", true}}) {
    FracPoly in = P(c.text);
    oracle::Dense ds = c.as_ds ? oracle::from(in) : oracle::D(oracle::from(in));
    expect_matches_oracle(get(c.text, c.as_ds), oracle::invariants(ds), c.text);
  }
}

TEST(DecayReport, OracleAgreesOnRandomPhases) {
  // The oracle only sees rational roots, so its d0 and d1 are lower bounds.
  for (const FracPoly &s : corpus(300, 41)) {
    const PhaseInvariants inv = std::get<PhaseInvariants>(decay_report(s, false));
    oracle::Invariants o = oracle::invariants(oracle::D(oracle::from(s)));
    EXPECT_EQ(inv.n, o.n) << format_poly(s);
    EXPECT_EQ(inv.alpha, o.alpha) << format_poly(s);
    EXPECT_EQ(inv.beta, o.beta) << format_poly(s);
    EXPECT_EQ(inv.gamma, o.gamma) << format_poly(s);
    EXPECT_GE(inv.d0, o.d0) << format_poly(s);
    EXPECT_GE(inv.d1, o.d1) << format_poly(s);
  }
}

TEST(DecayReport, D1BoundedByCoordinateOrders) {
  for (const FracPoly &s : corpus(500, 99)) {
    const PhaseInvariants inv = std::get<PhaseInvariants>(decay_report(s, false));
    EXPECT_LE(inv.d1, std::max({inv.alpha, inv.beta, inv.gamma})) << format_poly(s);
  }
}

TEST(DecayReport, KappaAndDeltaRules) {
  for (const FracPoly &s : corpus(300, 5)) {
    const PhaseInvariants inv = std::get<PhaseInvariants>(decay_report(s, false));
    EXPECT_EQ(inv.kappa, std::max({inv.alpha, inv.beta, inv.gamma, inv.d0 + 1, inv.d1 + 1}));
    EXPECT_LE(inv.delta, Rational(1, 4));
    if (Rational(inv.n, 2) >= std::max(Rational(4), Rational(inv.kappa + 2))) {
      EXPECT_EQ(inv.delta, Rational(2, inv.n));
    }
    EXPECT_FALSE(inv.case_label.empty());
  }
}

TEST(DecayReport, SwapSymmetry) {
  for (const FracPoly &s : corpus(200, 6)) {
    const auto a = std::get<PhaseInvariants>(decay_report(s, false));
    const auto b = std::get<PhaseInvariants>(decay_report(swap_xy(s), false));
    EXPECT_EQ(a.delta, b.delta) << format_poly(s);
    EXPECT_EQ(a.mu, b.mu) << format_poly(s);
    EXPECT_EQ(a.alpha, b.beta);
    EXPECT_EQ(a.beta, b.alpha);
    EXPECT_EQ(std::tie(a.n, a.gamma, a.d0, a.d1, a.kappa), std::tie(b.n, b.gamma, b.d0, b.d1, b.kappa));
  }
}

TEST(DecayReport, PhaseAndDerivativeInputsAgree) {
  for (const FracPoly &s : corpus(200, 7)) {
    const auto a = std::get<PhaseInvariants>(decay_report(s, false));
    const auto b = std::get<PhaseInvariants>(decay_report(apply_D(s), true));
    EXPECT_EQ(std::tie(a.n, a.alpha, a.beta, a.gamma, a.d0, a.d1, a.kappa, a.mu, a.sharp, a.case_label),
              std::tie(b.n, b.alpha, b.beta, b.gamma, b.d0, b.d1, b.kappa, b.mu, b.sharp, b.case_label));
    EXPECT_EQ(a.delta, b.delta);
    EXPECT_EQ(a.P, b.P);
  }
}

TEST(Classify, CaseTable) {
  auto label = [](int n, unsigned kappa, unsigned alpha = 0, unsigned d0 = 0) {
    PhaseInvariants inv;
    inv.n = n, inv.kappa = kappa, inv.alpha = alpha, inv.d0 = d0;
    classify(inv);
    return std::make_tuple(inv.mu, inv.sharp, inv.delta);
  };
  EXPECT_EQ(label(3, 1), std::make_tuple(0, false, Rational(1, 4)));
  EXPECT_EQ(label(6, 1), std::make_tuple(1, false, Rational(1, 4)));
  EXPECT_EQ(label(8, 3), std::make_tuple(2, false, Rational(1, 5)));
  EXPECT_EQ(label(10, 4), std::make_tuple(0, false, Rational(1, 6)));
  EXPECT_EQ(label(12, 1), std::make_tuple(0, true, Rational(1, 6)));
  EXPECT_EQ(label(12, 4, 4), std::make_tuple(1, true, Rational(1, 6)));
  EXPECT_EQ(label(12, 4, 0, 0), std::make_tuple(0, true, Rational(1, 6)));
}
