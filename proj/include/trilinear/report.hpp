#pragma once

#include "trilinear/invariants.hpp"
#include "trilinear/newton.hpp"
#include "trilinear/oscquad.hpp"
#include "trilinear/resolve.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace trilinear {

using Json = nlohmann::ordered_json;

inline constexpr const char *kToolName = "trilinear";
inline constexpr const char *kToolVersion = "0.1.0";

// Exact values always travel as "a/b" strings.
inline Json frac(const Rational &r) { return fraction_string(r); }
inline Json frac(const Exponent &e) { return fraction_string(e); }

inline Json point_json(const Point &p) { return Json::array({frac(p.p), frac(p.q)}); }

inline Json polygon_json(const NewtonPolygon &np) {
  Json v = Json::array(), e = Json::array();
  for (const auto &pt : np.vertices) v.push_back(point_json(pt));
  for (const auto &ed : np.edges) e.push_back({{"left", point_json(ed.left)}, {"right", point_json(ed.right)}, {"m", frac(ed.m)}});
  Face f = main_face(np);
  Json face;
  switch (f.kind) {
    case Face::Kind::Vertex: face = {{"kind", "vertex"}, {"vertex", point_json(f.vertex)}}; break;
    case Face::Kind::Edge: face = {{"kind", "edge"}, {"left", point_json(f.edge.left)}, {"right", point_json(f.edge.right)}, {"m", frac(f.edge.m)}}; break;
    case Face::Kind::VerticalRay: face = {{"kind", "vertical_ray"}, {"vertex", point_json(f.vertex)}}; break;
    case Face::Kind::HorizontalRay: face = {{"kind", "horizontal_ray"}, {"vertex", point_json(f.vertex)}}; break;
  }
  return {{"vertices", v}, {"edges", e}, {"main_face", face}};
}

inline Json invariants_json(const DecayResult &r) {
  if (const auto *d = std::get_if<DegenerateReport>(&r)) return {{"kind", "degenerate"}, {"degenerate", true}, {"reason", d->reason}};
  const auto &inv = std::get<PhaseInvariants>(r);
  return {{"kind", "invariants"},
          {"degenerate", false},
          {"n", inv.n},
          {"alpha", inv.alpha},
          {"beta", inv.beta},
          {"gamma", inv.gamma},
          {"d0", inv.d0},
          {"d1", inv.d1},
          {"kappa", inv.kappa},
          {"delta", frac(inv.delta)},
          {"mu", inv.mu},
          {"sharp", inv.sharp},
          {"case_label", inv.case_label},
          {"ds", format_poly(inv.P)},
          {"lowest_part", format_poly(inv.lowest)},
          {"newton_polygon", polygon_json(newton_polygon(inv.P))},
          {"diagnostics", {{"d0_with_complex", inv.d0_complex}, {"d1_with_complex", inv.d1_complex}}}};
}

inline Json root_json(const RealRoot &r) {
  if (r.exact) return {{"exact", true}, {"value", frac(r.lo)}};
  return {{"exact", false}, {"interval", Json::array({frac(r.lo), frac(r.hi)})}};
}

inline Json node_json(const RegionNode &n) {
  Json chain = Json::array();
  for (const auto &st : n.path) chain.push_back({{"m", frac(st.m)}, {"r", frac(st.r)}});
  Json j = {{"kind", kind_name(n.kind)}, {"depth", n.depth}, {"chain", chain}};
  if (n.good()) {
    j["vertex"] = point_json(n.vertex);
    j["m_window"] = Json::array({frac(n.m_left), n.m_right ? frac(*n.m_right) : Json(nullptr)});
    j["series"] = n.series;
    // radius of the branch the leaf lives on; the depth-0 leaves have none
    j["rho"] = n.path.empty() ? Json(nullptr) : frac(n.path.back().rho);
    if (n.kind == RegionKind::GoodEdge)
      j["r_range"] = Json::array({frac(n.r_lo), frac(n.r_hi)});
    else
      j["bounds"] = {{"lower", n.m_right ? frac(n.c_lo) : Json(nullptr)}, {"upper", n.has_upper ? frac(n.c_hi) : Json(nullptr)}};
  } else {
    j["m"] = frac(n.edge_m);
    j["root"] = root_json(n.root);
    j["multiplicity"] = n.multiplicity;
    j["rho"] = frac(n.rho);
    if (!n.reason.empty()) j["reason"] = n.reason;
  }
  j["poly"] = format_poly(n.poly->poly);
  Json kids = Json::array();
  for (const auto &c : n.children) kids.push_back(node_json(c));
  j["children"] = kids;
  return j;
}

inline Json tree_json(const ResolutionTree &t) {
  Json nodes = Json::array();
  for (const auto &n : t.regions) nodes.push_back(node_json(n));
  std::size_t good = 0, truncated = 0;
  int depth = 0;
  for (const RegionNode *l : t.leaves()) {
    (l->good() ? good : truncated)++;
    depth = std::max(depth, l->depth);
  }
  Json violations = Json::array();
  for (const auto &v : verify_chain_identities(t)) violations.push_back({{"path", v.path}, {"message", v.message}});
  return {{"half_plane", t.half_plane == HalfPlane::East ? "east" : "west"},
          {"poly", format_poly(t.P)},
          {"epsilon", frac(t.epsilon)},
          {"margin", frac(t.margin)},
          {"epsilon_halvings", t.epsilon_halvings},
          {"split_constant", frac(t.split_constant)},
          {"summary", {{"good_leaves", good}, {"truncated_leaves", truncated}, {"max_depth", depth}}},
          {"chain_violations", violations},
          {"nodes", nodes}};
}

inline Json decay_json(const DecayFit &f, const CutoffSpec &cut, const QuadConfig &cfg) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < f.lambdas.size(); ++i) {
    double bound = f.magnitudes.front() * std::pow(f.lambdas[i] / f.lambdas.front(), -f.predicted_delta) *
                   std::pow(std::log(2 + f.lambdas[i]) / std::log(2 + f.lambdas.front()), f.predicted_mu);
    pts.push_back({{"lambda", f.lambdas[i]},
                   {"re", f.values[i].real()},
                   {"im", f.values[i].imag()},
                   {"abs", f.magnitudes[i]},
                   {"predicted_bound", bound},
                   {"quadrature_rel_error", f.quad_errors[i]}});
  }
  return {{"kind", "decay_fit"},
          {"degenerate", f.degenerate},
          {"predicted_delta", f.predicted_delta},
          {"predicted_mu", f.predicted_mu},
          {"fitted_delta", f.fitted_delta},
          {"fitted_mu", f.fitted_mu ? Json(*f.fitted_mu) : Json(nullptr)},
          {"residual", f.residual},
          {"envelope_constant", f.envelope_constant},
          {"envelope_ratio", f.envelope_ratio()},
          {"cutoff", {{"shape", shape_name(cut.shape)}, {"half_width", cut.half_width}}},
          {"points_per_period", cfg.points_per_period},
          {"points", pts}};
}

inline Json sublevel_json(const SublevelReport &r, const SublevelMethod &m, std::optional<Rational> predicted) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < r.epsilons.size(); ++i)
    pts.push_back({{"epsilon", r.epsilons[i]}, {"measure", r.measures[i].measure}, {"stderr", r.measures[i].stderr_}});
  Json method = m.kind == SublevelMethod::Kind::Grid ? Json{{"kind", "grid"}, {"n", m.n}}
                                                     : Json{{"kind", "monte_carlo"}, {"samples", m.n}, {"seed", m.seed}};
  return {{"kind", "sublevel"},
          {"method", method},
          {"domain", Json::array({-1.0, 1.0})},
          {"predicted_exponent", predicted ? frac(*predicted) : Json(nullptr)},
          {"fitted_exponent", r.fitted_exponent},
          {"power_model", {{"exponent", r.power_exponent}, {"residual", r.power_residual}}},
          {"log_model", {{"exponent", r.log_exponent}, {"residual", r.log_residual}}},
          {"log_model_preferred", r.log_model_preferred},
          {"points", pts}};
}

inline Json envelope(const Json &input, double seconds, Json result) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"input", input}, {"timing", {{"seconds", seconds}}}, {"result", std::move(result)}};
}

}  // namespace trilinear
