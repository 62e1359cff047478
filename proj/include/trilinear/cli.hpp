#pragma once

#include "trilinear/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace trilinear::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kDegenerate = 3, kNumerical = 4 };

/// Reals on the command line: decimals, "a/b" or "b^e" (e.g. 2^-20).
inline double parse_real(const std::string &text) {
  auto fail = [&] { throw CLI::ValidationError("not a number: '" + text + "'"); };
  try {
    std::size_t used = 0;
    if (auto caret = text.find('^'); caret != std::string::npos) {
      double base = std::stod(text.substr(0, caret), &used);
      if (used != caret) fail();
      std::string e = text.substr(caret + 1);
      double ex = std::stod(e, &used);
      if (used != e.size()) fail();
      return std::pow(base, ex);
    }
    if (text.find('/') != std::string::npos) return static_cast<double>(to_ld(parse_rational(text)));
    double v = std::stod(text, &used);
    if (used != text.size()) fail();
    return v;
  } catch (const std::logic_error &) {
    fail();
  }
  return 0;
}

inline std::uint64_t monte_carlo_seed() {
  if (const char *s = std::getenv("OSC_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::logic_error &) {
      throw CLI::ValidationError("OSC_SEED must be an unsigned integer");
    }
  }
  return 1;
}

struct Options {
  std::string phase;
  bool as_ds = false;
  // analyze
  bool csv = false;
  // decompose
  int max_depth = 24;
  std::string epsilon = "1/16", margin = "2", json_path = "-";
  // verify
  std::string lambda_min = "2^8", lambda_max = "2^20";
  int points = 12, ppp = 10;
  // sublevel
  std::string eps_min = "2^-20", eps_max = "2^-6";
  int grid = 4096, eps_points = 15;
  std::int64_t samples = 0;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void write_json(std::ostream &out, const Json &j) { out << j.dump(2) << "\n"; }

inline int analyze(const Options &o, const Json &input, std::ostream &out) {
  auto t0 = std::chrono::steady_clock::now();
  DecayResult r = decay_report(parse_poly(o.phase), o.as_ds);
  const bool degenerate = std::holds_alternative<DegenerateReport>(r);
  if (o.csv) {
    if (degenerate) {
      out << "degenerate,reason\ntrue," << std::get<DegenerateReport>(r).reason << "\n";
    } else {
      const auto &v = std::get<PhaseInvariants>(r);
      out << "n,alpha,beta,gamma,d0,d1,kappa,delta,mu,sharp,case_label\n"
          << v.n << ',' << v.alpha << ',' << v.beta << ',' << v.gamma << ',' << v.d0 << ',' << v.d1 << ',' << v.kappa << ','
          << fraction_string(v.delta) << ',' << v.mu << ',' << (v.sharp ? "true" : "false") << ",\"" << v.case_label << "\"\n";
    }
  } else {
    write_json(out, envelope(input, seconds_since(t0), invariants_json(r)));
  }
  return degenerate ? kDegenerate : kOk;
}

inline int decompose(const Options &o, const Json &input, std::ostream &out, std::ostream &err) {
  auto t0 = std::chrono::steady_clock::now();
  ResolveOptions ro;
  ro.max_depth = o.max_depth;
  try {
    ro.epsilon0 = parse_rational(o.epsilon);
    ro.margin = parse_rational(o.margin);
  } catch (const std::invalid_argument &e) {
    throw CLI::ValidationError(e.what());
  }
  if (ro.epsilon0 <= 0 || ro.epsilon0 > 1) throw CLI::ValidationError("--epsilon must lie in (0, 1]");
  if (ro.margin <= 1) throw CLI::ValidationError("--margin must exceed 1");
  if (ro.max_depth < 1) throw CLI::ValidationError("--max-depth must be positive");
  FracPoly S = parse_poly(o.phase);
  FracPoly P = o.as_ds ? S : apply_D(S);
  Json result;
  int code = kOk;
  if (P.is_zero()) {
    result = invariants_json(DegenerateReport{});
    code = kDegenerate;
  } else {
    Json trees = Json::array();
    for (HalfPlane hp : {HalfPlane::East, HalfPlane::West}) trees.push_back(tree_json(resolve(P, ro, hp)));
    result = {{"kind", "resolution"}, {"trees", trees}};
  }
  Json doc = envelope(input, seconds_since(t0), result);
  if (o.json_path == "-") {
    write_json(out, doc);
  } else {
    std::ofstream f(o.json_path);
    if (!f) {
      err << "cannot write " << o.json_path << "\n";
      return kNumerical;
    }
    write_json(f, doc);
  }
  return code;
}

inline int verify(const Options &o, const Json &input, std::ostream &out) {
  auto t0 = std::chrono::steady_clock::now();
  double lo = parse_real(o.lambda_min), hi = parse_real(o.lambda_max);
  if (!(lo > 0 && hi > lo)) throw CLI::ValidationError("need 0 < --lambda-min < --lambda-max");
  if (o.points < 2) throw CLI::ValidationError("--points must be at least 2");
  if (o.ppp < 10) throw CLI::ValidationError("--ppp must be at least 10");
  QuadConfig cfg;
  cfg.points_per_period = o.ppp;
  CutoffSpec cut = CutoffSpec::bump();
  DecayFit fit = decay_fit(parse_poly(o.phase), log_spaced(lo, hi, o.points), cut, cfg);
  if (o.csv) {
    Json j = decay_json(fit, cut, cfg);
    out << "lambda,re,im,abs,predicted_bound\n" << std::setprecision(17);
    for (const auto &p : j["points"])
      out << p["lambda"].get<double>() << ',' << p["re"].get<double>() << ',' << p["im"].get<double>() << ','
          << p["abs"].get<double>() << ',' << p["predicted_bound"].get<double>() << "\n";
  } else {
    write_json(out, envelope(input, seconds_since(t0), decay_json(fit, cut, cfg)));
  }
  return kOk;
}

inline int sublevel(const Options &o, const Json &input, std::ostream &out) {
  auto t0 = std::chrono::steady_clock::now();
  double lo = parse_real(o.eps_min), hi = parse_real(o.eps_max);
  if (!(lo > 0 && hi > lo && hi < 1)) throw CLI::ValidationError("need 0 < --eps-min < --eps-max < 1");
  if (o.eps_points < 2) throw CLI::ValidationError("--points must be at least 2");
  if (o.grid < 1) throw CLI::ValidationError("--grid must be positive");
  FracPoly S = parse_poly(o.phase);
  SublevelMethod m = o.samples > 0 ? SublevelMethod::monte_carlo(o.samples, monte_carlo_seed()) : SublevelMethod::grid(o.grid);
  SublevelReport rep = sublevel_report(S, log_spaced(lo, hi, o.eps_points), m);
  std::optional<Rational> predicted;
  if (auto n = relative_multiplicity(S)) predicted = Rational(2, *n);
  if (o.csv) {
    out << "epsilon,measure,stderr\n" << std::setprecision(17);
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
      out << rep.epsilons[i] << ',' << rep.measures[i].measure << ',' << rep.measures[i].stderr_ << "\n";
  } else {
    write_json(out, envelope(input, seconds_since(t0), sublevel_json(rep, m, predicted)));
  }
  return kOk;
}

}  // namespace detail

/// Runs one command line (args excludes the program name). Reports go to out,
/// diagnostics to err; the return value is the process exit code.
inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Decay invariants, resolution trees and numerical checks for trilinear oscillatory forms", kToolName};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  auto common = [&](CLI::App *sub) {
    sub->add_option("--phase", o.phase, "Polynomial phase S, or P = DS with --as-ds")->required();
    sub->add_flag("--as-ds", o.as_ds, "Treat the input as P = DS");
  };

  CLI::App *analyze = app.add_subcommand("analyze", "Decay invariants and exponent");
  common(analyze);
  auto *json_flag = analyze->add_flag("--json", "JSON output (default)");
  auto *csv_flag = analyze->add_flag("--csv", o.csv, "CSV output");
  json_flag->excludes(csv_flag);

  CLI::App *decompose = app.add_subcommand("decompose", "Resolution tree of DS");
  common(decompose);
  decompose->add_option("--max-depth", o.max_depth, "Iteration depth cap")->capture_default_str();
  decompose->add_option("--epsilon", o.epsilon, "Starting epsilon (rational)")->capture_default_str();
  decompose->add_option("--margin", o.margin, "Dominance margin (rational > 1)")->capture_default_str();
  decompose->add_option("--json", o.json_path, "Output path, '-' for standard output")->expected(0, 1)->default_str("-");

  CLI::App *verify = app.add_subcommand("verify", "Quadrature of the form and decay fit");
  common(verify);
  verify->add_option("--lambda-min", o.lambda_min)->capture_default_str();
  verify->add_option("--lambda-max", o.lambda_max)->capture_default_str();
  verify->add_option("--points", o.points, "Number of lambdas")->capture_default_str();
  verify->add_option("--ppp", o.ppp, "Points per period")->capture_default_str();
  verify->add_flag("--csv", o.csv);

  CLI::App *sublevel = app.add_subcommand("sublevel", "Sublevel set measures");
  common(sublevel);
  sublevel->add_option("--eps-min", o.eps_min)->capture_default_str();
  sublevel->add_option("--eps-max", o.eps_max)->capture_default_str();
  sublevel->add_option("--grid", o.grid, "Grid cells per side")->capture_default_str();
  sublevel->add_option("--points", o.eps_points, "Number of epsilons")->capture_default_str();
  sublevel->add_option("--samples", o.samples, "Monte Carlo samples instead of the grid (seed: OSC_SEED)");
  sublevel->add_flag("--csv", o.csv);

  std::vector<const char *> argv{kToolName};
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App *verb = app.get_subcommands().front();
  if (o.as_ds && (verb == verify || verb == sublevel)) {
    err << "error: --as-ds needs the phase itself for " << verb->get_name() << "\n";
    return kUsage;
  }
  Json input = {{"verb", verb->get_name()}, {"phase", o.phase}, {"as_ds", o.as_ds}};
  if (verb == decompose)
    input["options"] = {{"max_depth", o.max_depth}, {"epsilon", o.epsilon}, {"margin", o.margin}};
  else if (verb == verify)
    input["options"] = {{"lambda_min", o.lambda_min}, {"lambda_max", o.lambda_max}, {"points", o.points}, {"ppp", o.ppp}};
  else if (verb == sublevel)
    input["options"] = {{"eps_min", o.eps_min}, {"eps_max", o.eps_max}, {"grid", o.grid}, {"points", o.eps_points}, {"samples", o.samples}};

  try {
    if (verb == analyze) return detail::analyze(o, input, out);
    if (verb == decompose) return detail::decompose(o, input, out, err);
    if (verb == verify) return detail::verify(o, input, out);
    return detail::sublevel(o, input, out);
  } catch (const ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::ValidationError &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace trilinear::cli
