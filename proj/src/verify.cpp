#include "martinq/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "martinq/errors.hpp"
#include "martinq/green.hpp"
#include "martinq/htransform.hpp"
#include "martinq/potential.hpp"
#include "martinq/sigma.hpp"

namespace martinq {

std::string status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::soft: return "soft";
  }
  return "?";
}

bool ConformanceReport::ok() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

Suite parse_suite(const std::string& text) {
  if (text == "exact") return Suite::exact;
  if (text == "mc") return Suite::mc;
  if (text == "all") return Suite::all;
  throw ParseError("unknown suite '" + text + "' (expected exact, mc or all)");
}

std::string suite_name(Suite s) {
  switch (s) {
    case Suite::exact: return "exact";
    case Suite::mc: return "mc";
    case Suite::all: return "all";
  }
  return "?";
}

std::vector<std::pair<std::string, std::string>> check_catalog() {
  return {
      {"chain.stationary", "stationary measure beta is invariant"},
      {"green.closed_form", "killed Green function matches the closed forms"},
      {"green.stationary_row", "G_{x0}(x0, y) = beta(y)/beta(x0)"},
      {"martin.profiles", "boundary profiles are harmonic off x0 with total mass 1/beta(x0)"},
      {"martin.change_of_base", "boundary profile at a moved base point"},
      {"sigma.restricted", "Q(F_n 1_{no x0 after n}) = E_x[F_n phi(X_n)]"},
      {"sigma.concatenation", "concatenation identity of the measure family"},
      {"sigma.cylinder", "plain cylinders can carry infinite mass; restricted ones are finite"},
      {"sigma.avoidance", "avoidance function equals the profile at the moved base point"},
      {"htransform.row_sums", "transformed kernel is stochastic"},
      {"htransform.rn_identity", "path law of the transformed chain against the base chain"},
      {"htransform.k_kernel", "Martin kernel of the transformed chain"},
      {"htransform.r_map", "profiles and harmonic functions of the transformed chain correspond"},
      {"potential.table", "potential kernel table: harmonic off 0, symmetric, known values"},
      {"potential.asymptotics", "remainder of the logarithmic expansion is O(1/|x|^2)"},
      {"green.mc", "Monte Carlo Green values agree with exact ones"},
      {"potential.mc", "Monte Carlo occupation agrees with a(x) + a(y) - a(x - y)"},
      {"htransform.convergence", "transformed chain converges to its boundary point"},
      {"htransform.convergence_threshold", "fixed-threshold convergence fraction on Z"},
      {"htransform.transience", "returns to x0 under the transformed chain are finite"},
  };
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

State z(long long x) { return State{{static_cast<std::int32_t>(x)}}; }

class Recorder {
 public:
  explicit Recorder(ConformanceReport& report) : report_(report) {
    for (auto& [id, ref] : check_catalog()) refs_.emplace_back(id, ref);
  }

  void add(const std::string& id, CheckStatus status, std::string details) {
    std::string ref;
    for (const auto& [i, r] : refs_) {
      if (i == id) ref = r;
    }
    report_.checks.push_back({id, ref, status, std::move(details)});
  }

  // Runs `body`; exceptions become failures.
  void run(const std::string& id, const std::function<std::pair<bool, std::string>()>& body) {
    try {
      auto [ok, details] = body();
      add(id, ok ? CheckStatus::pass : CheckStatus::fail, std::move(details));
    } catch (const std::exception& e) {
      add(id, CheckStatus::fail, std::string("error: ") + e.what());
    }
  }

 private:
  ConformanceReport& report_;
  std::vector<std::pair<std::string, std::string>> refs_;
};

BoundaryPoint default_alpha(const ExampleChain& chain) {
  const auto n = chain.name();
  if (n == "z") return BoundaryPoint::plus_inf();
  if (n.rfind("tree", 0) == 0) return BoundaryPoint::parse("(0)*");
  return BoundaryPoint::inf();
}

// Radius-50 window; the tree uses the tube of depth 50 around its ray plus
// the full ball of depth 8.
std::vector<State> row_sum_window(const ExampleChain& chain, const BoundaryPoint& alpha) {
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

// Forward law of the transformed Z walk (alpha = +inf, r = 1/2) at time n:
// P(X_n > threshold).
double z_transformed_tail(long long n, long long threshold) {
  std::vector<double> cur(static_cast<std::size_t>(2 * n + 3), 0.0);
  cur[static_cast<std::size_t>(n + 1)] = 1;
  for (long long k = 0; k < n; ++k) {
    std::vector<double> next(cur.size(), 0.0);
    for (long long x = -n; x <= n; ++x) {
      const double m = cur[static_cast<std::size_t>(x + n + 1)];
      if (m == 0) continue;
      const double up = x > 0 ? (2.0 * x + 3) / (4.0 * x + 2) : (x == 0 ? 0.75 : 0.5);
      next[static_cast<std::size_t>(x + n + 2)] += m * up;
      next[static_cast<std::size_t>(x + n)] += m * (1 - up);
    }
    cur.swap(next);
  }
  double s = 0;
  for (long long x = threshold + 1; x <= n; ++x) s += cur[static_cast<std::size_t>(x + n + 1)];
  return s;
}

void exact_checks(Recorder& rec, const VerifyOptions& options) {
  const auto zc = make_chain("z");
  const auto bb = make_chain("bangbang:q=1/3");
  const auto tree = make_chain("tree:k=2");
  const auto z2 = make_chain("z2");

  rec.run("chain.stationary", [&] {
    std::size_t checked = 0;
    std::size_t bad = 0;
    for (const auto& [c, r] : {std::pair{zc, 50}, std::pair{bb, 50}, std::pair{tree, 8}}) {
      const auto rep = verify_stationary(*c, c->ball(r));
      checked += rep.checked;
      bad += rep.violations.size();
    }
    const auto k3 = make_chain("tree:k=3");
    const auto rep = verify_stationary(*k3, k3->ball(5));
    checked += rep.checked;
    bad += rep.violations.size();
    return std::pair{bad == 0, "states " + std::to_string(checked) + ", violations " + std::to_string(bad)};
  });

  rec.run("green.closed_form", [&] {
    double worst = 0;
    std::size_t n = 0;
    auto run = [&](const ExampleChain& c, const std::vector<State>& states, int radius) {
      Truncation t;
      t.radius = radius;
      t.enlargement_margin = 0;
      std::vector<GreenQuery> q;
      for (const auto& x : states) {
        for (const auto& y : states) q.push_back({x, y});
      }
      const auto r = green_solve(c, c.base_point(), q, t);
      for (std::size_t i = 0; i < q.size(); ++i) {
        worst = std::max(worst, std::abs(r[i].value - to_double(exact_green(c, c.base_point(), q[i].x, q[i].y))));
        ++n;
      }
    };
    std::vector<State> zs;
    for (long long x = -6; x <= 6; ++x) zs.push_back(z(x));
    run(*zc, zs, 50);
    run(*bb, bb->ball(8), 50);
    run(*tree, tree->ball(4), 12);
    return std::pair{worst <= 1e-10, "pairs " + std::to_string(n) + ", max abs error " + num(worst)};
  });

  rec.run("green.stationary_row", [&] {
    std::size_t n = 0;
    std::size_t bad = 0;
    for (const auto& [c, r] : {std::pair{zc, 10}, std::pair{bb, 10}, std::pair{tree, 3}}) {
      const auto window = c->ball(r);
      std::vector<GreenQuery> q;
      for (const auto& y : window) q.push_back({c->base_point(), y});
      const auto values = green_solve_exact(*c, c->base_point(), q, window, BoundaryPolicy::reflect);
      for (std::size_t i = 0; i < q.size(); ++i, ++n) {
        if (values[i] != *c->stationary(q[i].y) / *c->stationary(c->base_point())) ++bad;
      }
    }
    return std::pair{bad == 0, "states " + std::to_string(n) + ", mismatches " + std::to_string(bad)};
  });

  rec.run("martin.profiles", [&] {
    std::ostringstream det;
    bool ok = true;
    struct Case {
      std::shared_ptr<const ExampleChain> chain;
      int radius;
      Rational mass;
    };
    for (const auto& c : {Case{zc, 50, 1}, Case{bb, 50, 4}, Case{tree, 8, Rational(1, 2)}, Case{z2, 20, 1}}) {
      const State x0 = c.chain->base_point();
      HarmonicProfile phi = profile_from_boundary(*c.chain, x0, default_alpha(*c.chain));
      if (options.corrupt_phi && c.chain->name() == "z") {
        phi = HarmonicProfile::user(
            x0, [](const State& s) { return PiRational(Rational(static_cast<long>(s[0]) * static_cast<long>(s[0]))); },
            "x^2");
      }
      const auto rep = check_harmonic_except(*c.chain, phi, x0, c.chain->ball(c.radius));
      const bool mass_ok = rep.base_balance == PiRational(c.mass);
      double worst = 0;
      for (const auto& r : rep.residuals) worst = std::max(worst, std::abs(r.exact.to_double()));
      ok = ok && rep.ok() && mass_ok;
      det << c.chain->name() << ":" << phi.label() << " nonzero residuals " << rep.nonzero << " max residual "
          << num(worst) << " mass " << rep.base_balance.to_string() << "; ";
    }
    return std::pair{ok, det.str()};
  });

  rec.run("martin.change_of_base", [&] {
    const auto phi = profile_from_boundary(*zc, z(1), BoundaryPoint::plus_inf());
    std::size_t bad = 0;
    for (long long x = -20; x <= 20; ++x) {
      if (!(phi(z(x)) == PiRational(Rational(2 * std::max(0L, static_cast<long>(x - 1)))))) ++bad;
    }
    return std::pair{bad == 0, "Z base 1 toward +inf against 2(x-1)_+ on [-20, 20], mismatches " + std::to_string(bad)};
  });

  const auto zphi = profile_from_boundary(*zc, z(0), BoundaryPoint::plus_inf());

  rec.run("sigma.restricted", [&] {
    std::size_t n_checked = 0;
    std::size_t bad = 0;
    for (std::size_t n = 0; n <= 6; ++n) {
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<State> path{z(1)};
        long long pos = 1;
        for (std::size_t k = 0; k < n; ++k) {
          pos += (mask >> k) & 1u ? 1 : -1;
          path.push_back(z(pos));
        }
        const auto v = restricted_measure(*zc, z(0), zphi, z(1), HorizonFunctional::path_indicator(path));
        const Rational expected = Rational(2 * std::max(0L, static_cast<long>(pos))) / pow(Rational(2), n);
        ++n_checked;
        if (!(*v.exact == PiRational(expected))) ++bad;
      }
    }
    return std::pair{bad == 0, "Z path indicators n <= 6: " + std::to_string(n_checked) + ", mismatches " +
                                   std::to_string(bad)};
  });

  rec.run("sigma.concatenation", [&] {
    std::size_t indicators = 0;
    std::size_t bad = 0;
    double worst = 0;
    const auto tphi = profile_from_boundary(*tree, State{}, BoundaryPoint::parse("(0)*"));
    for (const auto& [n, p] : {std::pair{1, 3}, std::pair{2, 4}}) {
      for (long long x = -2; x <= 2; ++x) {
        for (long long y = -2; y <= 3; ++y) {
          const auto r = verify_concatenation(*zc, z(0), zphi, z(x), z(y), n, p);
          indicators += r.indicators;
          bad += r.mismatches;
          worst = std::max(worst, r.max_discrepancy);
        }
      }
      for (const auto& y : tree->ball(2)) {
        const auto r = verify_concatenation(*tree, State{}, tphi, State{}, y, n, p);
        indicators += r.indicators;
        bad += r.mismatches;
        worst = std::max(worst, r.max_discrepancy);
      }
    }
    return std::pair{bad == 0, "indicators " + std::to_string(indicators) + ", mismatches " + std::to_string(bad) +
                                   ", max discrepancy " + num(worst)};
  });

  rec.run("sigma.cylinder", [&] {
    const auto a = HorizonFunctional::path_indicator({z(0), z(1), z(2)});
    const auto v = cylinder_measure(*zc, z(0), zphi, z(0), a, {4, 6, 8, 10, 12});
    bool increasing = true;
    std::ostringstream seq;
    for (std::size_t i = 0; i < v.sequence.size(); ++i) {
      if (i > 0 && !(v.sequence[i - 1].value < v.sequence[i].value)) increasing = false;
      seq << (i ? "," : "") << v.sequence[i].exact->to_string();
    }
    const auto restricted = restricted_measure(*zc, z(0), zphi, z(0), a);
    const bool ok = increasing && v.verdict == "diverges" && *restricted.exact == PiRational(1);
    return std::pair{ok, "cylinder 0,1,2 at horizons 4..12: " + seq.str() + " verdict " + v.verdict +
                             "; restricted value " + restricted.exact->to_string()};
  });

  rec.run("sigma.avoidance", [&] {
    bool ok = true;
    std::ostringstream det;
    for (long long x = 2; x <= 4; ++x) {
      const auto v = avoidance_function(*zc, z(0), zphi, z(x), z(1));
      const double target = 2.0 * static_cast<double>(x - 1);
      const double eps = 1e-9 * target;
      const double width = (*v.upper - *v.lower) / target;
      ok = ok && *v.lower <= target + eps && *v.upper >= target - eps && width < 0.05;
      det << "x=" << x << " [" << num(*v.lower) << ", " << num(*v.upper) << "] width " << num(width) << "; ";
    }
    return std::pair{ok, det.str()};
  });

  rec.run("htransform.row_sums", [&] {
    std::size_t checked = 0;
    std::size_t bad = 0;
    for (const auto& c : {zc, bb, tree, z2}) {
      const auto alpha = default_alpha(*c);
      const auto window = row_sum_window(*c, alpha);
      for (const Rational& r : {Rational(1, 4), Rational(1, 2), Rational(3, 4)}) {
        const auto q = transformed_chain(*c, {c->base_point(), alpha, r});
        const auto rep = verify_row_sums(*q, window);
        checked += rep.checked;
        bad += rep.violations.size();
      }
    }
    return std::pair{bad == 0, "rows " + std::to_string(checked) + ", violations " + std::to_string(bad)};
  });

  rec.run("htransform.rn_identity", [&] {
    std::size_t paths = 0;
    std::size_t bad = 0;
    for (const auto& c : {zc, bb, tree}) {
      const auto q = transformed_chain(*c, {c->base_point(), default_alpha(*c), Rational(1, 2)});
      for (std::size_t n = 0; n <= 6; ++n) {
        for (const auto& x : c->ball(1)) {
          const auto rep = rn_identity_check(*q, x, n);
          paths += rep.paths;
          if (!rep.ok()) ++bad;
        }
      }
    }
    return std::pair{bad == 0, "paths " + std::to_string(paths) + ", failing cases " + std::to_string(bad)};
  });

  rec.run("htransform.k_kernel", [&] {
    const TransformParams p{z(0), BoundaryPoint::plus_inf(), Rational(1, 2)};
    std::size_t bad = 0;
    for (long long x = -20; x <= 20; ++x) {
      if (!(k_kernel_boundary(*zc, p, z(x)) == PiRational(1))) ++bad;
    }
    const bool spot = k_kernel(*zc, p, z(2), z(5)) == PiRational(1);
    return std::pair{bad == 0 && spot, "K(x,+inf) != 1 at " + std::to_string(bad) + " of 41 states; K(2,5) = " +
                                           k_kernel(*zc, p, z(2), z(5)).to_string()};
  });

  rec.run("htransform.r_map", [&] {
    const auto q = transformed_chain(*zc, {z(0), BoundaryPoint::plus_inf(), Rational(1, 2)});
    const auto window = zc->ball(30);
    const ExactFunction two_x_plus = [](const State& s) {
      return PiRational(Rational(2 * std::max(0L, static_cast<long>(s[0]))));
    };
    const auto h = r_map(*q, two_x_plus, window);
    const auto back = r_map_inverse(*q, [](const State&) { return PiRational(1); }, window);
    std::size_t bad_one = 0;
    std::size_t bad_inv = 0;
    for (const auto& x : window) {
      if (!(h.f(x) == PiRational(1))) ++bad_one;
      if (!(back.f(x) == two_x_plus(x))) ++bad_inv;
    }
    // round trip on a x_+ + b x_-
    std::size_t bad_trip = 0;
    for (long a = 0; a <= 2; ++a) {
      for (long b = 0; b <= 2; ++b) {
        const ExactFunction phi = [a, b](const State& s) {
          const long x = s[0];
          return PiRational(Rational(x > 0 ? a * x : -b * x));
        };
        const auto fwd = r_map(*q, phi, window);
        const auto inv = r_map_inverse(*q, fwd.f, window);
        for (const auto& x : window) {
          if (!(inv.f(x) == phi(x))) ++bad_trip;
        }
      }
    }
    const bool ok = h.precondition_ok && back.precondition_ok && bad_one + bad_inv + bad_trip == 0;
    return std::pair{ok, "R(2x_+) != 1 at " + std::to_string(bad_one) + ", R^-1(1) != 2x_+ at " +
                             std::to_string(bad_inv) + ", round-trip mismatches " + std::to_string(bad_trip)};
  });

  rec.run("potential.table", [&] {
    const auto start = std::chrono::steady_clock::now();
    const auto table = potential_table(50);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto rep = verify_harmonicity(table);
    const bool values = table.at(1, 1) == PiRational::inv_pi(4) &&
                        table.at(2, 0) == PiRational(4) - PiRational::inv_pi(8) &&
                        table.at(2, 1) == PiRational::inv_pi(8) - PiRational(1) && table.at(1, 0) == PiRational(1);
    const bool ok = rep.ok() && values && secs < 60;
    return std::pair{ok, std::string(secs < 60 ? "radius 50 built within 60 s" : "radius 50 build exceeded 60 s") +
                             ", interior " + std::to_string(rep.interior_checked) +
                             ", violations " + std::to_string(rep.violations.size()) + ", symmetry violations " +
                             std::to_string(rep.symmetry_violations) + ", a(2,1) = " + table.at(2, 1).to_string()};
  });

  rec.run("potential.asymptotics", [&] {
    const double c25 = asymptotic_constant(potential_table(25));
    const double c50 = asymptotic_constant(shared_potential_table(50));
    const double rel = std::abs(c50 - c25) / c25;
    return std::pair{rel < 0.05 && c50 < 1, "max |residual| |x|^2 over |x| >= 10: N=25 " + num(c25) + ", N=50 " +
                                                num(c50)};
  });
}

void mc_checks(Recorder& rec, std::uint64_t seed) {
  const auto zc = make_chain("z");
  const auto bb = make_chain("bangbang:q=1/3");
  const auto tree = make_chain("tree:k=2");

  rec.run("green.mc", [&] {
    std::size_t pairs = 0;
    std::size_t outside = 0;
    double worst = 0;
    std::uint64_t stream = 0;
    auto grid = [&](const ExampleChain& c, const std::vector<State>& xs, const std::vector<State>& ys,
                    std::uint64_t cap) {
      McConfig cfg;
      cfg.trajectories = 10000;
      cfg.step_cap = cap;
      cfg.cap_policy = CapPolicy::truncate;
      for (const auto& x : xs) {
        const auto r = green_mc_multi(c, c.base_point(), x, ys, cfg, Rng::derive(seed, ++stream));
        for (std::size_t i = 0; i < ys.size(); ++i) {
          const double exact = to_double(exact_green(c, c.base_point(), x, ys[i]));
          const double dev = r[i].std_error > 0 ? std::abs(r[i].value - exact) / r[i].std_error
                                                : (r[i].value == exact ? 0.0 : INFINITY);
          worst = std::max(worst, dev);
          if (dev > 4) ++outside;
          ++pairs;
        }
      }
    };
    grid(*zc, {z(1), z(2), z(3), z(-2)}, {z(-3), z(-1), z(1), z(2), z(4), z(6)}, 1'000'000);
    grid(*bb, {z(0), z(1), z(3), z(5)}, {z(0), z(1), z(2), z(4), z(6)}, 1'000'000);
    grid(*tree, {State{{0}}, State{{1, 0}}, State{{0, 0, 1}}, State{}},
         {State{{0}}, State{{1}}, State{{0, 0}}, State{{1, 0}}, State{{0, 1, 1}}}, 100'000);
    return std::pair{outside == 0, "pairs " + std::to_string(pairs) + ", outside 4 sigma " + std::to_string(outside) +
                                       ", max |dev|/se " + num(worst)};
  });

  rec.run("potential.mc", [&] {
    PotentialMcConfig cfg;
    cfg.trajectories = 10000;
    cfg.exit_radius = 100;
    const State x{{1, 0}};
    const State y{{40, 0}};
    const auto est = potential_mc(x, {y}, cfg, Rng::derive(seed, 101))[0];
    const auto& t = shared_potential_table(50);
    const double target = (t.at(1, 0) + t.at(40, 0) - t.at(39, 0)).to_double();
    const double dev = std::abs(est.value - target) / est.std_error;
    return std::pair{dev <= 4, "E_(1,0)[visits to (40,0)] " + num(est.value) + " +- " + num(est.std_error) +
                                   " against " + num(target)};
  });

  rec.run("htransform.convergence", [&] {
    std::ostringstream det;
    ConvergenceConfig cz;
    cz.trajectories = 4000;
    cz.checkpoints = {1000};
    cz.threshold = 50;
    const auto rz = convergence_stats(*zc, {z(0), BoundaryPoint::plus_inf(), Rational(1, 2)}, cz, Rng::derive(seed, 201));
    const double law = z_transformed_tail(1000, 50);
    const double se = std::sqrt(law * (1 - law) / static_cast<double>(cz.trajectories));
    const bool z_ok = std::abs(rz.checkpoints[0].fraction_beyond - law) <= 4 * se;
    det << "Z P(X_1000 > 50): sampled " << num(rz.checkpoints[0].fraction_beyond) << ", forward law " << num(law)
        << "; ";

    ConvergenceConfig cb = cz;
    cb.trajectories = 2000;
    cb.threshold = 100;
    const auto rb = convergence_stats(*bb, {z(0), BoundaryPoint::inf(), Rational(1, 2)}, cb, Rng::derive(seed, 202));
    const bool b_ok = rb.checkpoints[0].fraction_beyond >= 0.99;
    det << "bang-bang P(X_1000 > 100) " << num(rb.checkpoints[0].fraction_beyond) << "; ";

    ConvergenceConfig ct;
    ct.trajectories = 2000;
    ct.checkpoints = {100, 1000, 10000};
    ct.threshold = 10;
    const auto rt = convergence_stats(*tree, {State{}, BoundaryPoint::parse("(0)*"), Rational(1, 2)}, ct,
                                      Rng::derive(seed, 203));
    const bool t_ok =
        rt.checkpoints[0].median < rt.checkpoints[1].median && rt.checkpoints[1].median < rt.checkpoints[2].median;
    det << "tree median agreement " << num(rt.checkpoints[0].median) << ", " << num(rt.checkpoints[1].median) << ", "
        << num(rt.checkpoints[2].median);
    return std::pair{z_ok && b_ok && t_ok, det.str()};
  });

  try {
    ConvergenceConfig cz;
    cz.trajectories = 4000;
    cz.checkpoints = {1000};
    cz.threshold = 50;
    const auto rz = convergence_stats(*zc, {z(0), BoundaryPoint::plus_inf(), Rational(1, 2)}, cz, Rng::derive(seed, 201));
    rec.add("htransform.convergence_threshold", CheckStatus::soft,
            "Z fraction with X_1000 > 50 is " + num(rz.checkpoints[0].fraction_beyond) +
                " (fixed target 0.99); the walk grows like sqrt(n), forward law gives " +
                num(z_transformed_tail(1000, 50)));
  } catch (const std::exception& e) {
    rec.add("htransform.convergence_threshold", CheckStatus::fail, std::string("error: ") + e.what());
  }

  try {
    ConvergenceConfig c;
    c.trajectories = 1000;
    c.checkpoints = {10000};
    const auto r = convergence_stats(*zc, {z(0), BoundaryPoint::plus_inf(), Rational(1, 2)}, c, Rng::derive(seed, 301));
    rec.add("htransform.transience", CheckStatus::soft,
            "mean returns to 0 over 10^4 steps " + num(r.mean_returns) + " (1 over an infinite horizon); runs with last "
            "return before step 1000: " + num(r.early_last_return_fraction));
  } catch (const std::exception& e) {
    rec.add("htransform.transience", CheckStatus::fail, std::string("error: ") + e.what());
  }
}

}  // namespace

ConformanceReport verify_suite(Suite suite, std::uint64_t seed, const VerifyOptions& options) {
  ConformanceReport report;
  report.suite = suite_name(suite);
  report.seed = seed;
  Recorder rec(report);
  if (suite != Suite::mc) exact_checks(rec, options);
  if (suite != Suite::exact) mc_checks(rec, seed);
  return report;
}

}  // namespace martinq
