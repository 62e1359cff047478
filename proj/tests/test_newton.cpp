#include "oracles.hpp"

#include "trilinear/newton.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace trilinear;

namespace {

FracPoly P(const char *s) { return parse_poly(s); }
Point pt(std::int64_t p, std::int64_t q) { return {Exponent(p), Exponent(q)}; }
const char *kThreeVertex = "x^5*y - x^3*y^2 + x^2*y^4";

}  // namespace

TEST(NewtonPolygon, ThreeVertices) {
  NewtonPolygon np = newton_polygon(P(kThreeVertex));
  ASSERT_EQ(np.vertices.size(), 3u);
  EXPECT_EQ(np.vertices[0], pt(2, 4));
  EXPECT_EQ(np.vertices[1], pt(3, 2));
  EXPECT_EQ(np.vertices[2], pt(5, 1));
  ASSERT_EQ(np.edges.size(), 2u);
  EXPECT_EQ(np.edges[0].m, Exponent(1, 2));
  EXPECT_EQ(np.edges[1].m, Exponent(2));
}

TEST(NewtonPolygon, MonomialAndTwoPoints) {
  NewtonPolygon a = newton_polygon(P("x^2*y^3"));
  ASSERT_EQ(a.vertices.size(), 1u);
  EXPECT_EQ(a.vertices[0], pt(2, 3));
  EXPECT_TRUE(a.edges.empty());
  NewtonPolygon b = newton_polygon(P("x^2 + y^2"));
  ASSERT_EQ(b.vertices.size(), 2u);
  EXPECT_EQ(b.vertices[0], pt(0, 2));
  EXPECT_EQ(b.vertices[1], pt(2, 0));
  ASSERT_EQ(b.edges.size(), 1u);
  EXPECT_EQ(b.edges[0].m, Exponent(1));
}

TEST(NewtonPolygon, FractionalSupport) {
  NewtonPolygon np = newton_polygon(P("x^5/2 + y^2 + x*y"));
  ASSERT_EQ(np.vertices.size(), 3u);
  EXPECT_EQ(np.vertices[1], pt(1, 1));
  EXPECT_EQ(np.edges[1].m, Exponent(3, 2));
}

TEST(NewtonPolygon, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    FracPoly p = oracle::random_poly(rng, 20, 12);
    if (p.is_zero()) continue;
    auto expect = oracle::hull_vertices(oracle::support(oracle::from(p)));
    NewtonPolygon np = newton_polygon(p);
    ASSERT_EQ(np.vertices.size(), expect.size()) << format_poly(p);
    for (std::size_t k = 0; k < expect.size(); ++k) EXPECT_EQ(np.vertices[k], pt(expect[k].first, expect[k].second));
  }
}

TEST(NewtonPolygon, SupportAboveEveryLineAndMIncreasing) {
  std::mt19937_64 rng(18);
  for (int i = 0; i < 300; ++i) {
    FracPoly p = oracle::random_poly(rng, 20, 12);
    if (p.is_zero()) continue;
    NewtonPolygon np = newton_polygon(p);
    for (std::size_t k = 0; k < np.edges.size(); ++k) {
      const Edge &e = np.edges[k];
      EXPECT_EQ(e.m, m_value(e));
      if (k > 0) {
        EXPECT_LT(np.edges[k - 1].m, e.m);
      }
      Exponent level = support_value(e.left, e.m);
      for (const auto &[key, c] : p) EXPECT_GE(support_value({key.first, key.second}, e.m), level);
      EXPECT_LE(Exponent(edge_vanishing_order(p, e)), e.left.q - e.right.q);
    }
  }
}

TEST(FaceRestriction, Examples) {
  FracPoly p = P(kThreeVertex);
  NewtonPolygon np = newton_polygon(p);
  EXPECT_EQ(face_restriction(p, np.edges[0]), P("-x^3*y^2 + x^2*y^4"));
  for (const auto &v : np.vertices)
    EXPECT_EQ(face_restriction(p, Face{Face::Kind::Vertex, v, {}}), FracPoly::monomial(p.coeff(v.p, v.q), v.p, v.q));
  FracPoly q = P("x^2 + y^2");
  EXPECT_EQ(face_restriction(q, newton_polygon(q).edges[0]), q);
  EXPECT_THROW(face_restriction(p, Face{Face::Kind::Vertex, pt(4, 4), {}}), std::invalid_argument);
}

TEST(MValue, Examples) {
  EXPECT_EQ(m_value({pt(2, 4), pt(3, 2), {}}), Exponent(1, 2));
  EXPECT_EQ(m_value({pt(3, 2), pt(5, 1), {}}), Exponent(2));
  EXPECT_EQ(m_value({pt(0, 2), pt(2, 0), {}}), Exponent(1));
}

TEST(MainFace, Examples) {
  Face a = main_face(newton_polygon(P("x^2*y^2")));
  EXPECT_EQ(a.kind, Face::Kind::Vertex);
  EXPECT_EQ(a.vertex, pt(2, 2));
  Face b = main_face(newton_polygon(P("x^2 + y^2")));
  EXPECT_EQ(b.kind, Face::Kind::Edge);
  EXPECT_EQ(b.edge.m, Exponent(1));
  Face c = main_face(newton_polygon(P(kThreeVertex)));
  ASSERT_EQ(c.kind, Face::Kind::Edge);
  EXPECT_EQ(c.edge.left, pt(2, 4));
  EXPECT_EQ(c.edge.right, pt(3, 2));
  EXPECT_EQ(main_face(newton_polygon(P("x^3*y"))).kind, Face::Kind::VerticalRay);
  EXPECT_EQ(main_face(newton_polygon(P("x*y^3"))).kind, Face::Kind::HorizontalRay);
}

TEST(Roots, Examples) {
  RootList a = roots_with_multiplicity(UPoly({0, 0, -1, 0, 1}));
  EXPECT_EQ(a.zero_multiplicity, 2u);
  ASSERT_EQ(a.roots.size(), 2u);
  EXPECT_EQ(a.multiplicity_of(1), 1u);
  EXPECT_EQ(a.multiplicity_of(-1), 1u);
  RootList b = roots_with_multiplicity(UPoly({-8, 12, -6, 1}));
  ASSERT_EQ(b.roots.size(), 1u);
  EXPECT_EQ(b.multiplicity_of(2), 3u);
  RootList c = roots_with_multiplicity(UPoly({1, 0, 1}));
  EXPECT_TRUE(c.roots.empty());
  EXPECT_EQ(c.complex_degree, 2u);
}

TEST(Roots, IrrationalIsolated) {
  RootList r = roots_with_multiplicity(UPoly({-2, 0, 1}));
  ASSERT_EQ(r.roots.size(), 2u);
  for (const auto &root : r.roots) {
    EXPECT_FALSE(root.exact);
    EXPECT_LE(root.width(), default_isolation_width());
    EXPECT_NEAR(static_cast<double>(std::fabs(root.approx())), std::sqrt(2.0), 1e-15);
  }
}

TEST(Roots, ProductDividesInput) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> pick(-6, 6), mult(1, 3), count(1, 4);
  for (int i = 0; i < 200; ++i) {
    UPoly p({oracle::random_rational(rng)});
    if (p.is_zero()) p = UPoly({1});
    std::map<Rational, unsigned> want;
    for (int k = count(rng); k > 0; --k) {
      Rational r(pick(rng), 1 + std::abs(pick(rng)) % 3);
      unsigned m = static_cast<unsigned>(mult(rng));
      want[r] += m;
      for (unsigned j = 0; j < m; ++j) p = p * UPoly({-r, 1});
    }
    RootList rl = roots_with_multiplicity(p);
    ASSERT_TRUE(rl.all_rational());
    UPoly prod({1});
    for (unsigned j = 0; j < rl.zero_multiplicity; ++j) prod = prod * UPoly({0, 1});
    for (const auto &root : rl.roots)
      for (unsigned j = 0; j < root.multiplicity; ++j) prod = prod * UPoly({-root.value(), 1});
    UPoly quotient = exact_div(p, prod);
    EXPECT_EQ(quotient.degree(), 0);
    for (const auto &[r, m] : want) EXPECT_EQ(r == 0 ? rl.zero_multiplicity : rl.multiplicity_of(r), m);
  }
}

TEST(VanishingOrder, Examples) {
  FracPoly p = P(kThreeVertex);
  NewtonPolygon np = newton_polygon(p);
  EXPECT_EQ(edge_vanishing_order(p, np.edges[0]), 1u);
  EXPECT_EQ(edge_vanishing_order(p, np.edges[1]), 1u);
  FracPoly q = P("x^2 + y^2");
  EXPECT_EQ(edge_vanishing_order(q, newton_polygon(q).edges[0]), 0u);
  FracPoly r = P("(y - x)^3 + x^4");
  EXPECT_EQ(edge_vanishing_order(r, newton_polygon(r).edges[0]), 3u);
}
