// martinq command-line front end. Every subcommand prints JSON (or CSV for
// `potential --emit csv`) on stdout.
//
// Exit status: 0 success, 1 failed check or runtime error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "martinq/errors.hpp"
#include "martinq/green.hpp"
#include "martinq/htransform.hpp"
#include "martinq/potential.hpp"
#include "martinq/sigma.hpp"
#include "martinq/verify.hpp"

using json = nlohmann::ordered_json;
using namespace martinq;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Doubles go out rounded to 12 significant digits.
json num(double v) {
  if (!std::isfinite(v)) return v > 0 ? json("inf") : v < 0 ? json("-inf") : json("nan");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::stod(buf);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

// Lists of states: comma separated, except on Z^2 where "i,j" pairs are
// separated by ';'.
std::vector<State> parse_states(const Chain& chain, const std::string& text, const std::string& flag) {
  std::vector<State> out;
  try {
    if (chain.name() == "z2") {
      for (const auto& p : split(text, ';')) out.push_back(chain.parse_state(p));
    } else {
      for (const auto& p : split(text, ',')) out.push_back(chain.parse_state(p));
    }
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

State parse_state(const Chain& chain, const std::string& text, const std::string& flag) {
  try {
    return chain.parse_state(text);
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::shared_ptr<const ExampleChain> parse_chain(const std::string& selector) {
  try {
    return make_chain(selector);
  } catch (const Error& e) {
    throw UsageError(std::string("--chain: ") + e.what());
  }
}

BoundaryPoint parse_alpha(const std::string& text, const std::string& flag) {
  try {
    return BoundaryPoint::parse(text);
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::vector<std::size_t> parse_sizes(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> out;
  for (const auto& p : split(text, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(p, &used);
      if (used != p.size()) throw std::invalid_argument(p);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + p + "' is not a nonnegative integer");
    }
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

json pi_json(const PiRational& v) {
  return json{{"exact", v.to_string()}, {"rational", to_string(v.rational_part())},
              {"inv_pi", to_string(v.inv_pi_part())}, {"numeric", num(v.to_double())}};
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

// ---- green -------------------------------------------------------------------

struct GreenArgs {
  std::string chain, x0, x, y, method = "exact", cap_policy = "error";
  int window_radius = 50;
  std::size_t trajectories = 100000;
  std::uint64_t step_cap = 10'000'000;
  std::optional<std::uint64_t> seed;
};

int run_green(const GreenArgs& a) {
  const auto chain = parse_chain(a.chain);
  const State x0 = a.x0.empty() ? chain->base_point() : parse_state(*chain, a.x0, "--x0");
  const State x = parse_state(*chain, a.x, "--x");
  const State y = parse_state(*chain, a.y, "--y");
  json out{{"command", "green"}, {"chain", chain->name()}, {"x0", chain->format_state(x0)},
           {"x", chain->format_state(x)}, {"y", chain->format_state(y)}};
  GreenResult r;
  if (a.method == "exact") {
    Truncation t;
    t.radius = a.window_radius;
    r = green_solve(*chain, x0, {{x, y}}, t)[0];
    out["value"] = num(r.value);
    out["stderr"] = num(0);
    out["method"] = method_name(r.method);
    out["window"] = json{{"radius", r.window_radius},
                         {"policy", chain->default_boundary() == BoundaryPolicy::kill ? "kill" : "reflect"},
                         {"enlargement_delta", num(r.enlargement_delta)}};
  } else if (a.method == "mc") {
    if (!a.seed) throw UsageError("--seed is required with --method mc");
    McConfig cfg;
    cfg.trajectories = a.trajectories;
    cfg.step_cap = a.step_cap;
    if (a.cap_policy == "truncate") {
      cfg.cap_policy = CapPolicy::truncate;
    } else if (a.cap_policy != "error") {
      throw UsageError("--cap-policy: expected error or truncate");
    }
    r = green_mc(*chain, x0, x, y, cfg, *a.seed);
    out["value"] = num(r.value);
    out["stderr"] = num(r.std_error);
    out["method"] = method_name(r.method);
    out["window"] = nullptr;
    out["runs"] = r.runs;
    out["capped_runs"] = r.capped_runs;
    out["seed"] = *a.seed;
  } else {
    throw UsageError("--method: expected exact or mc, got '" + a.method + "'");
  }
  print(out);
  return 0;
}

// ---- martin ------------------------------------------------------------------

struct MartinArgs {
  std::string chain, x0, alpha, mixture, eval;
  int check_radius = 10;
};

HarmonicProfile build_profile(const ExampleChain& chain, const State& x0, const std::string& spec,
                              const std::string& flag) {
  try {
    if (spec.rfind("boundary:", 0) == 0) return profile_from_boundary(chain, x0, BoundaryPoint::parse(spec.substr(9)));
    if (spec.rfind("mixture:", 0) == 0) return mixture_profile(chain, x0, BoundaryMixture::parse(spec.substr(8)));
  } catch (const ParseError& e) {
    throw UsageError(flag + ": " + e.what());
  } catch (const UnsupportedError& e) {
    throw UsageError(flag + ": " + e.what());
  }
  throw UsageError(flag + ": expected boundary:<alpha> or mixture:<spec>");
}

int run_martin(const MartinArgs& a) {
  const auto chain = parse_chain(a.chain);
  const State x0 = a.x0.empty() ? chain->base_point() : parse_state(*chain, a.x0, "--x0");
  if (a.alpha.empty() == a.mixture.empty()) throw UsageError("give exactly one of --alpha and --mixture");
  const auto phi = a.alpha.empty() ? build_profile(*chain, x0, "mixture:" + a.mixture, "--mixture")
                                   : build_profile(*chain, x0, "boundary:" + a.alpha, "--alpha");
  json out{{"command", "martin"}, {"chain", chain->name()}, {"x0", chain->format_state(x0)},
           {"profile", phi.label()}, {"provenance", provenance_name(phi.provenance())}};
  json evals = json::array();
  for (const auto& x : parse_states(*chain, a.eval, "--eval")) {
    json e{{"x", chain->format_state(x)}};
    if (phi.has_exact()) {
      e["phi"] = pi_json(phi(x));
    } else {
      e["phi"] = json{{"exact", nullptr}, {"numeric", num(static_cast<double>(phi.approx(x)))}};
    }
    evals.push_back(e);
  }
  out["evaluations"] = evals;
  const auto rep = check_harmonic_except(*chain, phi, x0, chain->ball(a.check_radius));
  out["harmonicity"] = json{{"window_radius", a.check_radius},
                            {"states_checked", rep.residuals.size()},
                            {"exact", rep.exact},
                            {"nonzero_residuals", rep.nonzero},
                            {"max_abs_residual", num(rep.max_abs_residual)},
                            {"mass", rep.exact ? pi_json(rep.base_balance) : json{{"numeric", num(rep.base_balance_numeric)}}},
                            {"ok", rep.ok(1e-9)}};
  print(out);
  return rep.ok(1e-9) ? 0 : 1;
}

// ---- measure -----------------------------------------------------------------

struct MeasureArgs {
  std::string chain, x0, phi, x, event, horizons;
  bool bracket = false;
  std::size_t trajectories = 100000;
  std::optional<std::uint64_t> seed;
};

json sequence_json(const MeasureValue& v) {
  json seq = json::array();
  for (const auto& p : v.sequence) {
    seq.push_back(json{{"horizon", p.horizon},
                       {"value", num(p.value)},
                       {"exact", p.exact ? json(p.exact->to_string()) : json(nullptr)},
                       {"stderr", num(p.std_error)},
                       {"method", p.method}});
  }
  return seq;
}

int run_measure(const MeasureArgs& a) {
  const auto chain = parse_chain(a.chain);
  const State x0 = a.x0.empty() ? chain->base_point() : parse_state(*chain, a.x0, "--x0");
  const auto phi = build_profile(*chain, x0, a.phi, "--phi");
  const State x = parse_state(*chain, a.x, "--x");
  const auto event = [&] {
    try {
      return parse_event(*chain, a.event);
    } catch (const ParseError& e) {
      throw UsageError(std::string("--event: ") + e.what());
    }
  }();
  const auto horizons = parse_sizes(a.horizons, "--horizons");
  json out{{"command", "measure"}, {"chain", chain->name()}, {"x0", chain->format_state(x0)}, {"phi", a.phi},
           {"x", chain->format_state(x)}, {"event", a.event}};
  if (a.seed) out["seed"] = *a.seed;
  if (a.bracket) {
    if (event.kind() != HorizonFunctional::Kind::avoid) throw UsageError("--bracket needs an avoid:<state> event");
    AvoidanceConfig cfg;
    cfg.horizons = horizons;
    cfg.trajectories = a.seed ? a.trajectories : 0;
    cfg.seed = a.seed.value_or(0);
    const auto v = avoidance_function(*chain, x0, phi, x, event.state(), cfg);
    out["mode"] = mode_name(v.mode);
    out["verdict"] = v.verdict;
    out["value"] = v.exact ? json(v.exact->to_string()) : num(v.value);
    if (v.mode == MeasureMode::bracket) {
      out["lower"] = num(*v.lower);
      out["upper"] = num(*v.upper);
      out["certified_upper"] = num(*v.certified_upper);
      out["upper_certified"] = v.upper_certified;
      out["separated"] = v.separated;
      json br = json::array();
      for (const auto& b : v.bracket) {
        br.push_back(json{{"horizon", b.horizon},
                          {"lower", num(b.lower)},
                          {"upper", num(b.upper)},
                          {"lower_stderr", num(b.lower_std_error)},
                          {"upper_stderr", num(b.upper_std_error)},
                          {"method", b.method}});
      }
      out["bracket"] = br;
    }
    print(out);
    return 0;
  }
  SequenceConfig cfg;
  cfg.trajectories = a.seed ? a.trajectories : 0;
  cfg.seed = a.seed.value_or(0);
  const auto v = cylinder_measure(*chain, x0, phi, x, event, horizons, cfg);
  out["mode"] = mode_name(v.mode);
  out["verdict"] = v.verdict;
  out["infinite"] = v.infinite;
  out["monotone"] = v.monotone;
  out["sequence"] = sequence_json(v);
  print(out);
  return 0;
}

// ---- simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string chain, x0, alpha, r = "1/2", checkpoints;
  std::size_t trajectories = 10000, steps = 1000;
  double threshold = 50;
  std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateArgs& a) {
  const auto chain = parse_chain(a.chain);
  if (!a.seed) throw UsageError("--seed is required");
  TransformParams p;
  p.x0 = a.x0.empty() ? chain->base_point() : parse_state(*chain, a.x0, "--x0");
  p.alpha = parse_alpha(a.alpha, "--alpha");
  try {
    p.r = parse_rational(a.r);
  } catch (const Error& e) {
    throw UsageError(std::string("--r: ") + e.what());
  }
  if (p.r <= 0 || p.r >= 1) throw UsageError("--r must lie strictly between 0 and 1");
  ConvergenceConfig cfg;
  cfg.trajectories = a.trajectories;
  cfg.threshold = a.threshold;
  cfg.checkpoints = a.checkpoints.empty() ? std::vector<std::size_t>{a.steps} : parse_sizes(a.checkpoints, "--checkpoints");
  const auto rep = convergence_stats(*chain, p, cfg, *a.seed);
  json cps = json::array();
  for (const auto& c : rep.checkpoints) {
    cps.push_back(json{{"steps", c.steps},
                       {"fraction_beyond", num(c.fraction_beyond)},
                       {"quantiles", json{{"p10", num(c.quantiles[0])},
                                          {"p25", num(c.quantiles[1])},
                                          {"p50", num(c.quantiles[2])},
                                          {"p75", num(c.quantiles[3])},
                                          {"p90", num(c.quantiles[4])}}},
                       {"median", num(c.median)}});
  }
  print(json{{"command", "simulate"},
             {"chain", chain->name()},
             {"x0", chain->format_state(p.x0)},
             {"alpha", p.alpha.to_string()},
             {"r", to_string(p.r)},
             {"seed", *a.seed},
             {"trajectories", rep.trajectories},
             {"witness", rep.witness},
             {"threshold", num(rep.threshold)},
             {"checkpoints", cps},
             {"mean_returns", num(rep.mean_returns)},
             {"early_last_return_fraction", num(rep.early_last_return_fraction)}});
  return 0;
}

// ---- potential ---------------------------------------------------------------

struct PotentialArgs {
  int radius = 10;
  std::string emit = "json";
  std::vector<std::string> checks;
  std::string x = "1,0", ys = "40,0";
  std::size_t trajectories = 100000;
  int exit_radius = 100;
  std::optional<std::uint64_t> seed;
};

int run_potential(const PotentialArgs& a) {
  if (a.radius < 1) throw UsageError("--radius must be at least 1");
  if (a.emit != "json" && a.emit != "csv") throw UsageError("--emit: expected csv or json");
  const auto z2 = make_chain("z2");
  const auto table = potential_table(a.radius);
  json checks = json::object();
  bool ok = true;
  for (const auto& c : a.checks) {
    if (c == "harmonicity") {
      const auto rep = verify_harmonicity(table);
      checks["harmonicity"] = json{{"interior_checked", rep.interior_checked},
                                   {"violations", rep.violations.size()},
                                   {"symmetry_checked", rep.symmetry_checked},
                                   {"symmetry_violations", rep.symmetry_violations},
                                   {"origin_defect", rep.origin_defect.to_string()},
                                   {"denominators_ok", rep.denominators_ok},
                                   {"ok", rep.ok()}};
      ok = ok && rep.ok();
    } else if (c == "asymptotics") {
      json rows = json::array();
      for (int n = 1; n <= a.radius; ++n) {
        const double res = asymptotic_residual(table, n, 0);
        rows.push_back(json{{"i", n}, {"j", 0}, {"residual", num(res)}, {"scaled", num(res * n * n)}});
      }
      const double from = std::min(10.0, a.radius / 2.0);
      checks["asymptotics"] = json{{"axis", rows},
                                   {"constant_from", num(from)},
                                   {"constant", num(asymptotic_constant(table, from))}};
    } else if (c == "mc") {
      if (!a.seed) throw UsageError("--seed is required with --check mc");
      const State x = parse_state(*z2, a.x, "--x");
      const auto ys = parse_states(*z2, a.ys, "--y");
      PotentialMcConfig cfg;
      cfg.trajectories = a.trajectories;
      cfg.exit_radius = a.exit_radius;
      const auto est = potential_mc(x, ys, cfg, *a.seed);
      json rows = json::array();
      for (const auto& e : est) {
        json row{{"x", z2->format_state(x)}, {"y", z2->format_state(e.y)}, {"value", num(e.value)},
                 {"stderr", num(e.std_error)}, {"runs", e.runs}, {"exited", e.exited}};
        const State d{x[0] - e.y[0], x[1] - e.y[1]};
        if (table.in_range(x[0], x[1]) && table.in_range(e.y[0], e.y[1]) && table.in_range(d[0], d[1])) {
          const double exact = (table.at(x) + table.at(e.y) - table.at(d)).to_double();
          row["table_value"] = num(exact);
          row["within_4_stderr"] = std::abs(e.value - exact) <= 4 * e.std_error;
          ok = ok && std::abs(e.value - exact) <= 4 * e.std_error;
        }
        rows.push_back(row);
      }
      checks["mc"] = json{{"seed", *a.seed}, {"exit_radius", a.exit_radius}, {"estimates", rows}};
    } else {
      throw UsageError("--check: expected asymptotics, harmonicity or mc, got '" + c + "'");
    }
  }
  if (a.emit == "csv") {
    std::cout << "i,j,p,q,numeric\n";
    const auto& oct = table.octant();
    for (int i = 0; i <= a.radius; ++i) {
      for (int j = 0; j <= i; ++j) {
        const auto& v = oct[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        std::cout << i << ',' << j << ',' << to_string(v.rational_part()) << ',' << to_string(v.inv_pi_part()) << ','
                  << v.numeric(12) << '\n';
      }
    }
    if (!checks.empty()) std::cerr << checks.dump(2) << "\n";
  } else {
    json entries = json::array();
    const auto& oct = table.octant();
    for (int i = 0; i <= a.radius; ++i) {
      for (int j = 0; j <= i; ++j) {
        const auto& v = oct[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        entries.push_back(json{{"i", i}, {"j", j}, {"p", to_string(v.rational_part())},
                               {"q", to_string(v.inv_pi_part())}, {"exact", v.to_string()}, {"numeric", v.numeric(12)}});
      }
    }
    json out{{"command", "potential"}, {"radius", a.radius}, {"entries", entries}};
    if (!checks.empty()) out["checks"] = checks;
    print(out);
  }
  return ok ? 0 : 1;
}

// ---- verify ------------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  bool corrupt_phi = false;
  std::optional<std::uint64_t> seed;
};

int run_verify(const VerifyArgs& a) {
  Suite suite;
  try {
    suite = parse_suite(a.suite);
  } catch (const Error& e) {
    throw UsageError(std::string("--suite: ") + e.what());
  }
  if (suite != Suite::exact && !a.seed) throw UsageError("--seed is required for the mc and all suites");
  VerifyOptions opt;
  opt.corrupt_phi = a.corrupt_phi;
  const auto rep = verify_suite(suite, a.seed.value_or(0), opt);
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back(json{{"id", c.id}, {"reference", c.reference}, {"status", status_name(c.status)},
                          {"details", c.details}});
  }
  json out{{"command", "verify"}, {"suite", rep.suite}};
  out["seed"] = a.seed ? json(*a.seed) : json(nullptr);
  out["corrupt_phi"] = a.corrupt_phi;
  out["ok"] = rep.ok();
  out["checks"] = checks;
  print(out);
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"martinq: Green functions, Martin boundaries and h-transforms of recurrent chains"};
  app.require_subcommand(1);

  GreenArgs g;
  auto* green = app.add_subcommand("green", "killed Green function G_{x0}(x, y)");
  green->add_option("--chain", g.chain, "z, z2, bangbang:q=p/q, tree:k=K")->required();
  green->add_option("--x0", g.x0, "base point (default: the chain's)");
  green->add_option("--x", g.x, "start state")->required();
  green->add_option("--y", g.y, "target state")->required();
  green->add_option("--method", g.method, "exact or mc");
  green->add_option("--window-radius", g.window_radius, "solver window radius");
  green->add_option("--trajectories", g.trajectories, "Monte Carlo runs");
  green->add_option("--step-cap", g.step_cap, "Monte Carlo step cap per run");
  green->add_option("--cap-policy", g.cap_policy, "error or truncate");
  green->add_option("--seed", g.seed, "master seed (mc)");

  MartinArgs m;
  auto* martin = app.add_subcommand("martin", "harmonic profiles phi_{x0,alpha} and mixtures");
  martin->add_option("--chain", m.chain)->required();
  martin->add_option("--x0", m.x0);
  martin->add_option("--alpha", m.alpha, "+inf, -inf, inf or a ray such as 0(1)*");
  martin->add_option("--mixture", m.mixture, "w1*a1+w2*a2");
  martin->add_option("--eval", m.eval, "states to evaluate")->required();
  martin->add_option("--check-radius", m.check_radius, "window for the harmonicity report");

  MeasureArgs me;
  auto* measure = app.add_subcommand("measure", "sigma-finite measure of finite-horizon events");
  measure->add_option("--chain", me.chain)->required();
  measure->add_option("--x0", me.x0);
  measure->add_option("--phi", me.phi, "boundary:<alpha> or mixture:<spec>")->required();
  measure->add_option("--x", me.x)->required();
  measure->add_option("--event", me.event, "path:<p0.p1...>, at:<m>=<state> or avoid:<state>")->required();
  measure->add_option("--horizons", me.horizons, "n1,n2,...")->required();
  measure->add_flag("--bracket", me.bracket, "with avoid:<y>, bracket the measure of never visiting y");
  measure->add_option("--trajectories", me.trajectories, "Monte Carlo fallback runs");
  measure->add_option("--seed", me.seed, "seed for the Monte Carlo fallback");

  SimulateArgs s;
  auto* simulate = app.add_subcommand("simulate", "convergence of the h-transformed chain");
  simulate->add_option("--chain", s.chain)->required();
  simulate->add_option("--x0", s.x0);
  simulate->add_option("--alpha", s.alpha)->required();
  simulate->add_option("--r", s.r, "p/q in (0, 1)");
  simulate->add_option("--trajectories", s.trajectories);
  simulate->add_option("--steps", s.steps);
  simulate->add_option("--checkpoints", s.checkpoints, "n1,n2,... (default: --steps)");
  simulate->add_option("--seed", s.seed);
  simulate->add_option("--witness-threshold", s.threshold);

  PotentialArgs p;
  auto* potential = app.add_subcommand("potential", "potential kernel table of the Z^2 walk");
  potential->add_option("--radius", p.radius);
  potential->add_option("--emit", p.emit, "csv or json");
  potential->add_option("--check", p.checks, "asymptotics, harmonicity, mc (repeatable)");
  potential->add_option("--x", p.x, "mc start, i,j");
  potential->add_option("--y", p.ys, "mc targets, i,j;i,j");
  potential->add_option("--trajectories", p.trajectories);
  potential->add_option("--exit-radius", p.exit_radius, "0 disables the exit-disc continuation");
  potential->add_option("--seed", p.seed);

  VerifyArgs v;
  auto* verify = app.add_subcommand("verify", "conformance report");
  verify->add_option("--suite", v.suite, "exact, mc or all");
  verify->add_option("--seed", v.seed);
  verify->add_flag("--corrupt-phi", v.corrupt_phi, "replace the Z profile by x^2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*green) return run_green(g);
    if (*martin) return run_martin(m);
    if (*measure) return run_measure(me);
    if (*simulate) return run_simulate(s);
    if (*potential) return run_potential(p);
    if (*verify) return run_verify(v);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
