// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--seed N] [--allow-fail NAME]...
//
// Exit status is 1 when a criterion fails, unless it was named with
// --allow-fail (it still prints FAIL).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "martinq/green.hpp"
#include "martinq/htransform.hpp"
#include "martinq/potential.hpp"
#include "martinq/rng.hpp"
#include "martinq/sigma.hpp"

using namespace martinq;

namespace {

struct Outcome {
  bool pass = true;
  std::string details;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

State z(long x) { return State{{static_cast<std::int32_t>(x)}}; }
State word(std::vector<std::int32_t> w) { return State{std::move(w)}; }

long two_x_plus(long x) { return x > 0 ? 2 * x : 0; }

// ---- oracles --------------------------------------------------------------
// Closed forms written out directly, plus small hand-coded path enumerators.

double green_z(long x, long y) {
  if (x == 0) return 1.0;
  if (x * y <= 0) return 0.0;
  return 2.0 * static_cast<double>(std::min(std::labs(x), std::labs(y)));
}

// bang-bang q = 1/3: alpha = (1-q)/q = 2.
double green_bb(long x, long y) {
  if (y == 0) return x == 0 ? 1.0 : 0.0;
  if (x == 0) return 3.0 / std::ldexp(1.0, static_cast<int>(y));
  const long m = std::min(x, y);
  return 3.0 * (std::ldexp(1.0, static_cast<int>(m)) - 1) / std::ldexp(1.0, static_cast<int>(y));
}

// binary tree from the root.
double green_tree(const std::vector<std::int32_t>& x, const std::vector<std::int32_t>& y) {
  const auto p = static_cast<int>(y.size());
  if (x.empty()) return y.empty() ? 1.0 : 2.0 / std::ldexp(1.0, p);
  if (y.empty()) return 0.0;
  std::size_t j = 0;
  while (j < x.size() && j < y.size() && x[j] == y[j]) ++j;
  if (j == 0) return 0.0;
  return 2.0 * (std::ldexp(1.0, static_cast<int>(j)) - 1) / std::ldexp(1.0, p - 1);
}

// Base-chain steps of Z, bang-bang q = 1/3 and the binary tree.
std::vector<std::pair<State, Rational>> hand_steps(const std::string& chain, const State& x) {
  if (chain == "z") return {{z(x[0] - 1), Rational(1, 2)}, {z(x[0] + 1), Rational(1, 2)}};
  if (chain == "bb") {
    if (x[0] == 0) return {{z(1), Rational(1)}};
    return {{z(x[0] - 1), Rational(2, 3)}, {z(x[0] + 1), Rational(1, 3)}};
  }
  std::vector<std::pair<State, Rational>> out;
  auto w = x.coords;
  if (!w.empty()) {
    auto parent = w;
    parent.pop_back();
    out.push_back({word(parent), Rational(1, 2)});
  }
  for (int c = 0; c < 2; ++c) {
    auto child = w;
    child.push_back(c);
    out.push_back({word(child), w.empty() ? Rational(1, 2) : Rational(1, 4)});
  }
  return out;
}

void hand_paths(const std::string& chain, std::vector<State>& path, const Rational& prob, std::size_t n,
                const std::function<void(const std::vector<State>&, const Rational&)>& visit) {
  if (path.size() == n + 1) {
    visit(path, prob);
    return;
  }
  for (const auto& [to, p] : hand_steps(chain, path.back())) {
    path.push_back(to);
    hand_paths(chain, path, prob * p, n, visit);
    path.pop_back();
  }
}

// Forward law of the transformed Z walk (alpha = +inf, r = 1/2); P(X_n > t).
double z_transformed_tail(long n, long t) {
  std::vector<double> cur(static_cast<std::size_t>(2 * n + 3), 0.0);
  cur[static_cast<std::size_t>(n + 1)] = 1;
  for (long k = 0; k < n; ++k) {
    std::vector<double> next(cur.size(), 0.0);
    for (long x = -n; x <= n; ++x) {
      const double m = cur[static_cast<std::size_t>(x + n + 1)];
      if (m == 0) continue;
      const double up = x > 0 ? (2.0 * x + 3) / (4.0 * x + 2) : (x == 0 ? 0.75 : 0.5);
      next[static_cast<std::size_t>(x + n + 2)] += m * up;
      next[static_cast<std::size_t>(x + n)] += m * (1 - up);
    }
    cur.swap(next);
  }
  double s = 0;
  for (long x = t + 1; x <= n; ++x) s += cur[static_cast<std::size_t>(x + n + 1)];
  return s;
}

// ---- criteria ---------------------------------------------------------------

Outcome green_closed_forms() {
  double worst = 0;
  std::size_t pairs = 0;
  auto run = [&](const Chain& c, const State& x0, const std::vector<State>& states, int radius,
                 const std::function<double(const State&, const State&)>& oracle) {
    Truncation t;
    t.radius = radius;
    t.enlargement_margin = 0;
    std::vector<GreenQuery> q;
    for (const auto& x : states) {
      for (const auto& y : states) q.push_back({x, y});
    }
    const auto r = green_solve(c, x0, q, t);
    for (std::size_t i = 0; i < q.size(); ++i, ++pairs) {
      worst = std::max(worst, std::abs(r[i].value - oracle(q[i].x, q[i].y)));
    }
  };
  const auto zc = make_chain("z");
  const auto bb = make_chain("bangbang:q=1/3");
  const auto tree = make_chain("tree:k=2");
  std::vector<State> zs;
  for (long x = -8; x <= 8; ++x) zs.push_back(z(x));
  run(*zc, z(0), zs, 50, [](const State& x, const State& y) { return green_z(x[0], y[0]); });
  run(*bb, z(0), bb->ball(8), 50, [](const State& x, const State& y) { return green_bb(x[0], y[0]); });
  run(*tree, word({}), tree->ball(4), 12,
      [](const State& x, const State& y) { return green_tree(x.coords, y.coords); });
  // spot values quoted for these chains
  Truncation t;
  t.enlargement_margin = 0;
  const auto spot = green_solve(*bb, z(0), {{z(1), z(1)}, {z(0), z(2)}}, t);
  worst = std::max({worst, std::abs(spot[0].value - 1.5), std::abs(spot[1].value - 0.75)});
  return {worst <= 1e-10, "pairs " + std::to_string(pairs) + ", max abs error " + fmt(worst) + " (tol 1e-10)"};
}

Outcome green_monte_carlo(std::uint64_t seed) {
  std::ostringstream det;
  bool ok = true;
  std::uint64_t stream = 0;
  auto grid = [&](const std::string& name, const std::vector<State>& xs, const std::vector<State>& ys,
                  std::uint64_t cap, const std::function<double(const State&, const State&)>& oracle) {
    const auto c = make_chain(name);
    McConfig cfg;
    cfg.trajectories = 100000;
    cfg.step_cap = cap;
    cfg.cap_policy = CapPolicy::truncate;
    std::size_t pairs = 0;
    std::size_t outside = 0;
    double worst = 0;
    for (const auto& x : xs) {
      const auto r = green_mc_multi(*c, c->base_point(), x, ys, cfg, Rng::derive(seed, ++stream));
      for (std::size_t i = 0; i < ys.size(); ++i, ++pairs) {
        const double exact = oracle(x, ys[i]);
        const double dev = r[i].std_error > 0 ? std::abs(r[i].value - exact) / r[i].std_error
                                              : (r[i].value == exact ? 0.0 : INFINITY);
        worst = std::max(worst, dev);
        if (dev > 4) ++outside;
      }
    }
    ok = ok && outside == 0 && pairs >= 20;
    det << name << ": " << pairs << " pairs, max |dev|/se " << fmt(worst) << "; ";
  };
  grid("z", {z(1), z(2), z(-1), z(-2)}, {z(-3), z(-1), z(1), z(2), z(4)}, 10'000'000,
       [](const State& x, const State& y) { return green_z(x[0], y[0]); });
  grid("bangbang:q=1/3", {z(0), z(1), z(3), z(5)}, {z(0), z(1), z(2), z(4), z(6)}, 10'000'000,
       [](const State& x, const State& y) { return green_bb(x[0], y[0]); });
  grid("tree:k=2", {word({0}), word({1, 0}), word({0, 0, 1}), word({})},
       {word({0}), word({1}), word({0, 0}), word({1, 0}), word({0, 1, 1})}, 10'000'000,
       [](const State& x, const State& y) { return green_tree(x.coords, y.coords); });
  return {ok, det.str() + "100000 runs each"};
}

Outcome stationary_row() {
  std::size_t exact_checked = 0;
  std::size_t exact_bad = 0;
  double worst = 0;
  for (const auto& [name, r, big] : {std::tuple{"z", 12, 50}, std::tuple{"bangbang:q=1/3", 12, 50},
                                     std::tuple{"tree:k=2", 4, 12}, std::tuple{"tree:k=3", 3, 8}}) {
    const auto c = make_chain(name);
    const State x0 = c->base_point();
    const auto window = c->ball(r);
    std::vector<GreenQuery> q;
    for (const auto& y : window) q.push_back({x0, y});
    const auto values = green_solve_exact(*c, x0, q, window, BoundaryPolicy::reflect);
    for (std::size_t i = 0; i < q.size(); ++i, ++exact_checked) {
      if (values[i] != *c->stationary(q[i].y) / *c->stationary(x0)) ++exact_bad;
    }
    Truncation t;
    t.radius = big;
    t.enlargement_margin = 0;
    const auto fl = green_solve(*c, x0, q, t);
    for (std::size_t i = 0; i < q.size(); ++i) {
      worst = std::max(worst, std::abs(fl[i].value - to_double(*c->stationary(q[i].y) / *c->stationary(x0))));
    }
  }
  return {exact_bad == 0 && worst <= 1e-10, "exact states " + std::to_string(exact_checked) + ", mismatches " +
                                                std::to_string(exact_bad) + "; floating max error " + fmt(worst)};
}

Outcome harmonic_profiles() {
  std::ostringstream det;
  bool ok = true;
  struct Case {
    std::string chain;
    std::string alpha;
    int radius;
    Rational mass;
    std::function<Rational(const State&)> formula;
  };
  const std::vector<Case> cases{
      {"z", "+inf", 50, 1, [](const State& s) { return Rational(two_x_plus(s[0])); }},
      {"bangbang:q=1/3", "inf", 50, 4,
       [](const State& s) -> Rational { return Rational(4) * (pow(Rational(2), static_cast<unsigned long>(s[0])) - 1); }},
      {"tree:k=2", "(0)*", 8, Rational(1, 2),
       [](const State& s) -> Rational {
         std::size_t j = 0;
         while (j < s.coords.size() && s.coords[j] == 0) ++j;
         return pow(Rational(2), static_cast<unsigned long>(j)) - 1;
       }},
  };
  for (const auto& c : cases) {
    const auto chain = make_chain(c.chain);
    const State x0 = chain->base_point();
    const auto phi = profile_from_boundary(*chain, x0, BoundaryPoint::parse(c.alpha));
    const auto window = chain->ball(c.radius);
    std::size_t formula_bad = 0;
    for (const auto& x : window) {
      if (!(phi(x) == PiRational(c.formula(x)))) ++formula_bad;
    }
    const auto rep = check_harmonic_except(*chain, phi, x0, window);
    const bool mass_ok = rep.base_balance == PiRational(c.mass);
    ok = ok && formula_bad == 0 && rep.ok() && mass_ok;
    det << c.chain << ": formula mismatches " << formula_bad << ", nonzero residuals " << rep.nonzero << ", mass "
        << rep.base_balance.to_string() << "; ";
  }
  return {ok, det.str()};
}

Outcome sigma_identities() {
  std::ostringstream det;
  bool ok = true;

  // restricted measure against hand enumeration, every path indicator n <= 6
  {
    std::size_t checked = 0;
    std::size_t bad = 0;
    struct Case {
      std::string hand;
      std::string chain;
      std::string alpha;
      State x;
      std::function<Rational(const State&)> phi;
    };
    const std::vector<Case> cases{
        {"z", "z", "+inf", z(1), [](const State& s) { return Rational(two_x_plus(s[0])); }},
        {"bb", "bangbang:q=1/3", "inf", z(1),
         [](const State& s) -> Rational { return Rational(4) * (pow(Rational(2), static_cast<unsigned long>(s[0])) - 1); }},
        {"tree", "tree:k=2", "(0)*", word({0}),
         [](const State& s) -> Rational {
           std::size_t j = 0;
           while (j < s.coords.size() && s.coords[j] == 0) ++j;
           return pow(Rational(2), static_cast<unsigned long>(j)) - 1;
         }},
    };
    for (const auto& c : cases) {
      const auto chain = make_chain(c.chain);
      const auto phi = profile_from_boundary(*chain, chain->base_point(), BoundaryPoint::parse(c.alpha));
      for (std::size_t n = 0; n <= 6; ++n) {
        std::vector<State> start{c.x};
        hand_paths(c.hand, start, Rational(1), n, [&](const std::vector<State>& path, const Rational& p) {
          const auto v = restricted_measure(*chain, chain->base_point(), phi, c.x,
                                            HorizonFunctional::path_indicator(path));
          ++checked;
          if (!v.exact || !(*v.exact == PiRational(p * c.phi(path.back())))) ++bad;
        });
      }
    }
    ok = ok && bad == 0;
    det << "restricted: " << checked << " indicators, mismatches " << bad << "; ";
  }

  // concatenation at (n, p) in {(1,3), (2,4)}
  {
    const auto zc = make_chain("z");
    const auto tree = make_chain("tree:k=2");
    const auto zphi = profile_from_boundary(*zc, z(0), BoundaryPoint::plus_inf());
    const auto tphi = profile_from_boundary(*tree, word({}), BoundaryPoint::parse("(0)*"));
    std::size_t indicators = 0;
    std::size_t bad = 0;
    double worst = 0;
    for (const auto& [n, p] : {std::pair{1, 3}, std::pair{2, 4}}) {
      for (long x = -2; x <= 2; ++x) {
        for (long y = -2; y <= 3; ++y) {
          const auto r = verify_concatenation(*zc, z(0), zphi, z(x), z(y), n, p);
          indicators += r.indicators;
          bad += r.mismatches;
          worst = std::max(worst, r.max_discrepancy);
        }
      }
      for (const auto& x : tree->ball(1)) {
        for (const auto& y : tree->ball(2)) {
          const auto r = verify_concatenation(*tree, word({}), tphi, x, y, n, p);
          indicators += r.indicators;
          bad += r.mismatches;
          worst = std::max(worst, r.max_discrepancy);
        }
      }
    }
    ok = ok && bad == 0 && worst == 0;
    det << "concatenation: " << indicators << " indicators, max discrepancy " << fmt(worst) << "; ";
  }

  // Z cylinder {X_0 = 0, X_1 = 1, X_2 = 2}
  {
    const auto zc = make_chain("z");
    const auto phi = profile_from_boundary(*zc, z(0), BoundaryPoint::plus_inf());
    const auto a = HorizonFunctional::path_indicator({z(0), z(1), z(2)});
    const std::vector<std::size_t> horizons{4, 6, 8, 10, 12};
    const auto v = cylinder_measure(*zc, z(0), phi, z(0), a, horizons);
    // oracle: (1/4) E_2[2 (X_{n-2})_+] over the free walk, by binomial sums
    bool increasing = true;
    bool matches = v.sequence.size() == horizons.size();
    std::ostringstream seq;
    for (std::size_t i = 0; i < v.sequence.size(); ++i) {
      const long m = static_cast<long>(horizons[i]) - 2;
      Rational expect = 0;
      Rational binom = 1;
      for (long k = 0; k <= m; ++k) {
        expect += binom * two_x_plus(2 + 2 * k - m);
        binom = binom * (m - k) / (k + 1);
      }
      expect /= Rational(4) * pow(Rational(2), static_cast<unsigned long>(m));
      if (!v.sequence[i].exact || !(*v.sequence[i].exact == PiRational(expect))) matches = false;
      if (i > 0 && !(v.sequence[i - 1].value < v.sequence[i].value)) increasing = false;
      seq << (i ? "," : "") << (v.sequence[i].exact ? v.sequence[i].exact->to_string() : fmt(v.sequence[i].value));
    }
    const auto restricted = restricted_measure(*zc, z(0), phi, z(0), a);
    const bool one = restricted.exact && *restricted.exact == PiRational(1);
    ok = ok && increasing && matches && v.verdict == "diverges" && one;
    det << "cylinder 0,1,2: " << seq.str() << " (" << v.verdict << "), restricted "
        << (restricted.exact ? restricted.exact->to_string() : "?");
  }
  return {ok, det.str()};
}

// Radius-50 window; on the tree the tube of depth 50 around the ray plus the
// full ball of depth 8.
std::vector<State> row_window(const ExampleChain& chain, const BoundaryPoint& alpha) {
  const auto* tree = dynamic_cast<const TreeWalk*>(&chain);
  if (tree == nullptr) return chain.ball(50);
  auto out = chain.ball(8);
  for (std::size_t d = 0; d <= 50; ++d) {
    State s{alpha.ray.take(d)};
    for (int c = 0; c < tree->arity(); ++c) {
      State child = s;
      child.coords.push_back(c);
      out.push_back(std::move(child));
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Outcome h_transform_suite() {
  std::ostringstream det;
  bool ok = true;
  const std::vector<std::pair<std::string, std::string>> chains{
      {"z", "+inf"}, {"bangbang:q=1/3", "inf"}, {"tree:k=2", "(0)*"}, {"z2", "inf"}};

  std::size_t rows = 0;
  std::size_t bad_rows = 0;
  for (const auto& [name, a] : chains) {
    const auto c = make_chain(name);
    const auto alpha = BoundaryPoint::parse(a);
    const auto window = row_window(*c, alpha);
    for (const Rational& r : {Rational(1, 4), Rational(1, 2), Rational(3, 4)}) {
      const auto rep = verify_row_sums(*transformed_chain(*c, {c->base_point(), alpha, r}), window);
      rows += rep.checked;
      bad_rows += rep.violations.size();
    }
  }
  ok = ok && bad_rows == 0;
  det << "row sums: " << rows << " rows, violations " << bad_rows << "; ";

  std::size_t paths = 0;
  std::size_t bad_rn = 0;
  for (const auto& [name, a] : chains) {
    if (name == "z2") continue;
    const auto c = make_chain(name);
    const auto q = transformed_chain(*c, {c->base_point(), BoundaryPoint::parse(a), Rational(1, 2)});
    for (std::size_t n = 0; n <= 6; ++n) {
      for (const auto& x : c->ball(1)) {
        const auto rep = rn_identity_check(*q, x, n);
        paths += rep.paths;
        if (!rep.ok()) ++bad_rn;
      }
    }
  }
  ok = ok && bad_rn == 0;
  det << "RN identity: " << paths << " paths, failing cases " << bad_rn << "; ";

  const auto zc = make_chain("z");
  const TransformParams p{z(0), BoundaryPoint::plus_inf(), Rational(1, 2)};
  std::size_t bad_k = 0;
  for (long x = -20; x <= 20; ++x) {
    if (!(k_kernel_boundary(*zc, p, z(x)) == PiRational(1))) ++bad_k;
  }
  ok = ok && bad_k == 0;
  det << "K(x,+inf) != 1 at " << bad_k << " of 41; ";

  const auto q = transformed_chain(*zc, p);
  const auto window = zc->ball(30);
  const ExactFunction phi2 = [](const State& s) { return PiRational(Rational(two_x_plus(s[0]))); };
  const auto h = r_map(*q, phi2, window);
  std::size_t bad_one = 0;
  for (const auto& x : window) {
    if (!(h.f(x) == PiRational(1))) ++bad_one;
  }
  std::size_t bad_trip = 0;
  for (long a = 0; a <= 3; ++a) {
    for (long b = 0; b <= 3; ++b) {
      const ExactFunction f = [a, b](const State& s) {
        const long x = s[0];
        return PiRational(Rational(x > 0 ? a * x : -b * x));
      };
      const auto fwd = r_map(*q, f, window);
      const auto inv = r_map_inverse(*q, fwd.f, window);
      const auto back = r_map(*q, inv.f, window);
      for (const auto& x : window) {
        if (!(inv.f(x) == f(x)) || !(back.f(x) == fwd.f(x))) ++bad_trip;
      }
    }
  }
  ok = ok && h.precondition_ok && bad_one == 0 && bad_trip == 0;
  det << "R(2x_+) != 1 at " << bad_one << ", round-trip mismatches " << bad_trip;
  return {ok, det.str()};
}

Outcome convergence(std::uint64_t seed) {
  std::ostringstream det;
  ConvergenceConfig cz;
  cz.trajectories = 10000;
  cz.checkpoints = {1000};
  cz.threshold = 50;
  const auto rz =
      convergence_stats(*make_chain("z"), {z(0), BoundaryPoint::plus_inf(), Rational(1, 2)}, cz, Rng::derive(seed, 1));
  const double fz = rz.checkpoints[0].fraction_beyond;
  const bool z_ok = fz >= 0.99;
  det << "Z P(X_1000 > 50) " << fmt(fz) << " (need >= 0.99; forward law of the transformed walk gives "
      << fmt(z_transformed_tail(1000, 50)) << "); ";

  const auto rb = convergence_stats(*make_chain("bangbang:q=1/3"), {z(0), BoundaryPoint::inf(), Rational(1, 2)}, cz,
                                    Rng::derive(seed, 2));
  const double fb = rb.checkpoints[0].fraction_beyond;
  const bool b_ok = fb >= 0.99;
  det << "bang-bang P(X_1000 > 50) " << fmt(fb) << "; ";

  ConvergenceConfig ct;
  ct.trajectories = 10000;
  ct.checkpoints = {100, 1000, 10000};
  const auto rt = convergence_stats(*make_chain("tree:k=2"), {word({}), BoundaryPoint::parse("(0)*"), Rational(1, 2)},
                                    ct, Rng::derive(seed, 3));
  const auto& c = rt.checkpoints;
  const bool t_ok = c[0].median < c[1].median && c[1].median < c[2].median;
  det << "tree median agreement " << fmt(c[0].median) << " < " << fmt(c[1].median) << " < " << fmt(c[2].median);
  return {z_ok && b_ok && t_ok, det.str()};
}

Outcome potential_kernel(std::uint64_t seed) {
  std::ostringstream det;
  const auto start = std::chrono::steady_clock::now();
  const auto table = potential_table(50);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto rep = verify_harmonicity(table);
  const bool values = table.at(1, 1) == PiRational::inv_pi(4) &&
                      table.at(2, 0) == PiRational(4) - PiRational::inv_pi(8) &&
                      table.at(2, 1) == PiRational::inv_pi(8) - PiRational(1);
  bool ok = secs < 60 && rep.ok() && values;
  det << "radius 50 in " << fmt(secs) << " s, violations " << rep.violations.size() << ", symmetry violations "
      << rep.symmetry_violations << ", a(1,1) a(2,0) a(2,1) " << (values ? "exact" : "WRONG") << "; ";

  const double c25 = asymptotic_constant(potential_table(25));
  const double c50 = asymptotic_constant(table);
  const double drift = std::abs(c50 - c25) / c25;
  ok = ok && drift < 0.05;
  det << "residual |x|^2 constant N=25 " << fmt(c25) << ", N=50 " << fmt(c50) << "; ";

  PotentialMcConfig cfg;
  cfg.trajectories = 100000;
  cfg.exit_radius = 100;
  const auto est = potential_mc(State{{1, 0}}, {State{{40, 0}}}, cfg, Rng::derive(seed, 4))[0];
  const double target = (table.at(1, 0) + table.at(40, 0) - table.at(39, 0)).to_double();
  const double dev = std::abs(est.value - target) / est.std_error;
  ok = ok && dev <= 4;
  det << "E_(1,0)[visits to (40,0)] " << fmt(est.value) << " +- " << fmt(est.std_error) << " vs table " << fmt(target);
  return {ok, det.str()};
}

Outcome avoidance() {
  std::ostringstream det;
  bool ok = true;
  const auto zc = make_chain("z");
  const auto phi = profile_from_boundary(*zc, z(0), BoundaryPoint::plus_inf());
  for (long x = 2; x <= 4; ++x) {
    const auto v = avoidance_function(*zc, z(0), phi, z(x), z(1));
    const double target = 2.0 * static_cast<double>(x - 1);
    const double eps = 1e-9 * target;
    const double width = (*v.upper - *v.lower) / target;
    ok = ok && *v.lower <= target + eps && *v.upper >= target - eps && width < 0.05;
    det << "x=" << x << " [" << fmt(*v.lower) << ", " << fmt(*v.upper) << "] width " << fmt(100 * width) << "%; ";
  }
  return {ok, det.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 20240601;
  std::set<std::string> allowed;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc) {
      seed = std::stoull(argv[++i]);
    } else if (a == "--allow-fail" && i + 1 < argc) {
      allowed.insert(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--seed N] [--allow-fail NAME]...\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"green-closed-forms", green_closed_forms},
      {"green-monte-carlo", [seed] { return green_monte_carlo(seed); }},
      {"stationary-row", stationary_row},
      {"harmonic-profiles", harmonic_profiles},
      {"sigma-identities", sigma_identities},
      {"h-transform", h_transform_suite},
      {"convergence", [seed] { return convergence(seed); }},
      {"potential-kernel", [seed] { return potential_kernel(seed); }},
      {"avoidance-bracket", avoidance},
  };

  int unexpected = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string tag = o.pass ? "PASS" : "FAIL";
    if (!o.pass && allowed.count(name) != 0) tag += " (allowed)";
    if (!o.pass && allowed.count(name) == 0) ++unexpected;
    std::cout << tag << "  " << name << "  [" << fmt(secs) << " s]  " << o.details << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}
