// Python bindings. States are passed as strings in the CLI syntax ("3",
// "1,2", "0.1.1" or "@" for the tree root); results come back as dicts.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "martinq/errors.hpp"
#include "martinq/green.hpp"
#include "martinq/htransform.hpp"
#include "martinq/potential.hpp"
#include "martinq/sigma.hpp"
#include "martinq/verify.hpp"

namespace py = pybind11;
using namespace martinq;

namespace {

// pybind11 holders cannot be pointers to const; nothing mutating is exposed.
using ChainPtr = std::shared_ptr<ExampleChain>;

struct Profile {
  ChainPtr chain;
  HarmonicProfile phi;
};

State state(const Chain& c, const std::string& s) { return c.parse_state(s); }

State base_or(const ExampleChain& c, const std::optional<std::string>& x0) {
  return x0 ? c.parse_state(*x0) : c.base_point();
}

std::vector<State> states(const Chain& c, const std::vector<std::string>& xs) {
  std::vector<State> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(c.parse_state(x));
  return out;
}

py::dict pi_dict(const PiRational& v) {
  py::dict d;
  d["exact"] = v.to_string();
  d["rational"] = to_string(v.rational_part());
  d["inv_pi"] = to_string(v.inv_pi_part());
  d["numeric"] = v.to_double();
  return d;
}

py::dict green_dict(const GreenResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["stderr"] = r.std_error;
  d["method"] = method_name(r.method);
  if (r.method == GreenMethod::monte_carlo) {
    d["runs"] = r.runs;
    d["capped_runs"] = r.capped_runs;
  } else {
    d["window_radius"] = r.window_radius;
    d["enlargement_delta"] = r.enlargement_delta;
  }
  return d;
}

py::dict measure_dict(const MeasureValue& v) {
  py::dict d;
  d["mode"] = mode_name(v.mode);
  d["verdict"] = v.verdict;
  d["value"] = v.value;
  d["infinite"] = v.infinite;
  d["exact"] = v.exact ? py::object(py::str(v.exact->to_string())) : py::object(py::none());
  d["stderr"] = v.std_error;
  py::list seq;
  for (const auto& p : v.sequence) {
    py::dict e;
    e["horizon"] = p.horizon;
    e["value"] = p.value;
    e["exact"] = p.exact ? py::object(py::str(p.exact->to_string())) : py::object(py::none());
    e["stderr"] = p.std_error;
    e["method"] = p.method;
    seq.append(e);
  }
  d["sequence"] = seq;
  d["monotone"] = v.monotone;
  if (v.mode == MeasureMode::bracket) {
    py::list br;
    for (const auto& b : v.bracket) {
      py::dict e;
      e["horizon"] = b.horizon;
      e["lower"] = b.lower;
      e["upper"] = b.upper;
      e["lower_stderr"] = b.lower_std_error;
      e["upper_stderr"] = b.upper_std_error;
      e["method"] = b.method;
      br.append(e);
    }
    d["bracket"] = br;
    d["lower"] = v.lower ? py::object(py::float_(*v.lower)) : py::object(py::none());
    d["upper"] = v.upper ? py::object(py::float_(*v.upper)) : py::object(py::none());
    d["certified_upper"] = v.certified_upper ? py::object(py::float_(*v.certified_upper)) : py::object(py::none());
    d["upper_certified"] = v.upper_certified;
    d["separated"] = v.separated;
  }
  return d;
}

TransformParams params(const ExampleChain& c, const std::string& alpha, const std::string& r,
                       const std::optional<std::string>& x0) {
  TransformParams p;
  p.x0 = base_or(c, x0);
  p.alpha = BoundaryPoint::parse(alpha);
  p.r = parse_rational(r);
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Killed Green functions, Martin profiles and h-transforms on example chains";

  auto base_error = py::register_exception<Error>(m, "MartinqError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base_error.ptr());
  py::register_exception<UnknownStateError>(m, "UnknownStateError", base_error.ptr());
  py::register_exception<BudgetExceededError>(m, "BudgetExceededError", base_error.ptr());
  py::register_exception<RunawayRunError>(m, "RunawayRunError", base_error.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base_error.ptr());
  py::register_exception<NotInConeError>(m, "NotInConeError", base_error.ptr());
  py::register_exception<OutOfRangeError>(m, "OutOfRangeError", base_error.ptr());
  py::register_exception<InexactError>(m, "InexactError", base_error.ptr());

  py::class_<ExampleChain, ChainPtr>(m, "Chain")
      .def_property_readonly("name", &ExampleChain::name)
      .def_property_readonly("base_point", [](const ExampleChain& c) { return c.format_state(c.base_point()); })
      .def("successors",
           [](const ExampleChain& c, const std::string& x) {
             std::vector<std::pair<std::string, std::string>> out;
             for (const auto& t : c.successors(state(c, x))) out.emplace_back(c.format_state(t.to), to_string(t.probability));
             return out;
           })
      .def("stationary",
           [](const ExampleChain& c, const std::string& x) -> std::optional<std::string> {
             const auto b = c.stationary(state(c, x));
             if (!b) return std::nullopt;
             return to_string(*b);
           })
      .def("ball",
           [](const ExampleChain& c, int radius) {
             std::vector<std::string> out;
             for (const auto& s : c.ball(radius)) out.push_back(c.format_state(s));
             return out;
           })
      .def("__repr__", [](const ExampleChain& c) { return "<martinq.Chain " + c.name() + ">"; });

  m.def("chain", [](const std::string& selector) { return std::const_pointer_cast<ExampleChain>(make_chain(selector)); }, py::arg("selector"),
        "Chain from a selector: z, z2, bangbang:q=<p>, tree:k=<k>.");

  // ---- Green functions ----
  m.def(
      "green_exact",
      [](const ChainPtr& c, const std::string& x, const std::string& y, std::optional<std::string> x0) {
        return to_string(exact_green(*c, base_or(*c, x0), state(*c, x), state(*c, y)));
      },
      py::arg("chain"), py::arg("x"), py::arg("y"), py::arg("x0") = py::none(), "Closed-form G_{x0}(x, y).");

  m.def(
      "green_solve",
      [](const ChainPtr& c, const std::vector<std::pair<std::string, std::string>>& pairs, std::optional<std::string> x0,
         int window_radius, std::optional<std::string> policy) {
        std::vector<GreenQuery> q;
        for (const auto& [x, y] : pairs) q.push_back({state(*c, x), state(*c, y)});
        Truncation t;
        t.radius = window_radius;
        if (policy) {
          if (*policy == "kill") {
            t.policy = BoundaryPolicy::kill;
          } else if (*policy == "reflect") {
            t.policy = BoundaryPolicy::reflect;
          } else {
            throw ParseError("policy: expected kill or reflect");
          }
        }
        py::list out;
        for (const auto& r : green_solve(*c, base_or(*c, x0), q, t)) out.append(green_dict(r));
        return out;
      },
      py::arg("chain"), py::arg("pairs"), py::arg("x0") = py::none(), py::arg("window_radius") = 50,
      py::arg("policy") = py::none(), "Sparse killed solve for a list of (x, y) pairs.");

  m.def(
      "green_mc",
      [](const ChainPtr& c, const std::string& x, const std::vector<std::string>& ys, std::uint64_t seed,
         std::size_t trajectories, std::uint64_t step_cap, bool truncate, std::optional<std::string> x0) {
        McConfig cfg;
        cfg.trajectories = trajectories;
        cfg.step_cap = step_cap;
        cfg.cap_policy = truncate ? CapPolicy::truncate : CapPolicy::error;
        py::list out;
        std::vector<GreenResult> res;
        {
          py::gil_scoped_release release;
          res = green_mc_multi(*c, base_or(*c, x0), state(*c, x), states(*c, ys), cfg, seed);
        }
        for (const auto& r : res) out.append(green_dict(r));
        return out;
      },
      py::arg("chain"), py::arg("x"), py::arg("ys"), py::arg("seed"), py::arg("trajectories") = 100000,
      py::arg("step_cap") = 10'000'000, py::arg("truncate") = false, py::arg("x0") = py::none(),
      "Monte Carlo occupation counts of each y before the first return to x0.");

  // ---- profiles ----
  py::class_<Profile>(m, "Profile")
      .def_property_readonly("label", [](const Profile& p) { return p.phi.label(); })
      .def_property_readonly("provenance", [](const Profile& p) { return provenance_name(p.phi.provenance()); })
      .def_property_readonly("x0", [](const Profile& p) { return p.chain->format_state(p.phi.base()); })
      .def_property_readonly("exact", [](const Profile& p) { return p.phi.has_exact(); })
      .def("__call__", [](const Profile& p, const std::string& x) { return pi_dict(p.phi(state(*p.chain, x))); })
      .def("approx", [](const Profile& p, const std::string& x) {
        return static_cast<double>(p.phi.approx(state(*p.chain, x)));
      });

  m.def(
      "profile",
      [](const ChainPtr& c, const std::string& alpha, std::optional<std::string> x0) {
        return Profile{c, profile_from_boundary(*c, base_or(*c, x0), BoundaryPoint::parse(alpha))};
      },
      py::arg("chain"), py::arg("alpha"), py::arg("x0") = py::none(), "phi_{x0,alpha} for a boundary point.");

  m.def(
      "mixture",
      [](const ChainPtr& c, const std::string& spec, std::optional<std::string> x0) {
        return Profile{c, mixture_profile(*c, base_or(*c, x0), BoundaryMixture::parse(spec))};
      },
      py::arg("chain"), py::arg("spec"), py::arg("x0") = py::none(), "Profile of an atomic mixture 'w1*a1+w2*a2'.");

  m.def(
      "check_harmonic",
      [](const Profile& p, int radius) {
        const auto rep = check_harmonic_except(*p.chain, p.phi, p.phi.base(), p.chain->ball(radius));
        py::dict d;
        d["ok"] = rep.ok(1e-9);
        d["exact"] = rep.exact;
        d["states_checked"] = rep.residuals.size();
        d["nonzero"] = rep.nonzero;
        d["max_abs_residual"] = rep.max_abs_residual;
        d["mass"] = rep.exact ? py::object(pi_dict(rep.base_balance)) : py::object(py::float_(rep.base_balance_numeric));
        return d;
      },
      py::arg("profile"), py::arg("radius") = 10, "Harmonicity off x0 on a ball, and the mass E_{x0}[phi(X_1)].");

  // ---- measures ----
  m.def(
      "restricted_measure",
      [](const Profile& p, const std::string& x, const std::string& event) {
        return measure_dict(restricted_measure(*p.chain, p.phi.base(), p.phi, state(*p.chain, x),
                                                         parse_event(*p.chain, event)));
      },
      py::arg("profile"), py::arg("x"), py::arg("event"), "Q_x(F 1{no visit to x0 after the horizon}).");

  m.def(
      "cylinder_measure",
      [](const Profile& p, const std::string& x, const std::string& event, const std::vector<std::size_t>& horizons,
         std::optional<std::uint64_t> seed, std::size_t trajectories) {
        SequenceConfig cfg;
        cfg.trajectories = seed ? trajectories : 0;
        cfg.seed = seed.value_or(0);
        return measure_dict(cylinder_measure(*p.chain, p.phi.base(), p.phi, state(*p.chain, x),
                                                       parse_event(*p.chain, event), horizons, cfg));
      },
      py::arg("profile"), py::arg("x"), py::arg("event"), py::arg("horizons"), py::arg("seed") = py::none(),
      py::arg("trajectories") = 100000, "Increasing sequence E_x[1_A phi(X_n)] and its verdict.");

  m.def(
      "avoidance",
      [](const Profile& p, const std::string& x, const std::string& y, std::vector<std::size_t> horizons,
         double tolerance, std::uint64_t seed, std::size_t trajectories) {
        AvoidanceConfig cfg;
        cfg.horizons = std::move(horizons);
        cfg.tolerance = tolerance;
        cfg.seed = seed;
        cfg.trajectories = trajectories;
        MeasureValue v;
        {
          py::gil_scoped_release release;
          v = avoidance_function(*p.chain, p.phi.base(), p.phi, state(*p.chain, x), state(*p.chain, y), cfg);
        }
        return measure_dict(v);
      },
      py::arg("profile"), py::arg("x"), py::arg("y"), py::arg("horizons") = std::vector<std::size_t>{128, 512, 2048},
      py::arg("tolerance") = 0.05, py::arg("seed") = 0, py::arg("trajectories") = 20000,
      "Bracket for Q_x(never visit y).");

  m.def(
      "verify_concatenation",
      [](const Profile& p, const std::string& x, const std::string& y, std::size_t n, std::size_t horizon) {
        const auto r = verify_concatenation(*p.chain, p.phi.base(), p.phi, state(*p.chain, x), state(*p.chain, y), n,
                                            horizon);
        py::dict d;
        d["ok"] = r.ok();
        d["indicators"] = r.indicators;
        d["nonzero"] = r.nonzero;
        d["mismatches"] = r.mismatches;
        d["max_discrepancy"] = r.max_discrepancy;
        return d;
      },
      py::arg("profile"), py::arg("x"), py::arg("y"), py::arg("n"), py::arg("horizon"));

  // ---- h-transform ----
  m.def(
      "psi",
      [](const ChainPtr& c, const std::string& x, const std::string& alpha, const std::string& r,
         std::optional<std::string> x0) { return pi_dict(psi_weight(*c, params(*c, alpha, r, x0), state(*c, x))); },
      py::arg("chain"), py::arg("x"), py::arg("alpha"), py::arg("r") = "1/2", py::arg("x0") = py::none());

  m.def(
      "transformed_successors",
      [](const ChainPtr& c, const std::string& x, const std::string& alpha, const std::string& r,
         std::optional<std::string> x0) {
        const auto q = transformed_chain(*c, params(*c, alpha, r, x0));
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& t : q->successors(state(*c, x))) out.emplace_back(c->format_state(t.to), to_string(t.probability));
        return out;
      },
      py::arg("chain"), py::arg("x"), py::arg("alpha"), py::arg("r") = "1/2", py::arg("x0") = py::none(),
      "Exact row of the transformed kernel q.");

  m.def(
      "check_row_sums",
      [](const ChainPtr& c, const std::string& alpha, const std::string& r, int radius, std::optional<std::string> x0) {
        const auto q = transformed_chain(*c, params(*c, alpha, r, x0));
        const auto rep = verify_row_sums(*q, c->ball(radius));
        py::dict d;
        d["ok"] = rep.ok();
        d["checked"] = rep.checked;
        std::vector<std::string> bad;
        for (const auto& s : rep.violations) bad.push_back(c->format_state(s));
        d["violations"] = bad;
        return d;
      },
      py::arg("chain"), py::arg("alpha"), py::arg("r") = "1/2", py::arg("radius") = 20, py::arg("x0") = py::none());

  m.def(
      "check_rn_identity",
      [](const ChainPtr& c, const std::string& x, std::size_t n, const std::string& alpha, const std::string& r,
         std::optional<std::string> x0) {
        const auto q = transformed_chain(*c, params(*c, alpha, r, x0));
        const auto rep = rn_identity_check(*q, state(*c, x), n);
        py::dict d;
        d["ok"] = rep.ok();
        d["paths"] = rep.paths;
        d["mismatches"] = rep.mismatches;
        d["transformed_total"] = to_string(rep.transformed_total);
        return d;
      },
      py::arg("chain"), py::arg("x"), py::arg("n"), py::arg("alpha"), py::arg("r") = "1/2", py::arg("x0") = py::none(),
      "Path-by-path likelihood ratio identity for all paths of length n.");

  m.def(
      "k_kernel",
      [](const ChainPtr& c, const std::string& x, const std::optional<std::string>& y, const std::string& alpha,
         const std::string& r, std::optional<std::string> x0) {
        const auto p = params(*c, alpha, r, x0);
        return pi_dict(y ? k_kernel(*c, p, state(*c, x), state(*c, *y)) : k_kernel_boundary(*c, p, state(*c, x)));
      },
      py::arg("chain"), py::arg("x"), py::arg("y"), py::arg("alpha"), py::arg("r") = "1/2", py::arg("x0") = py::none(),
      "Martin kernel of the transformed chain; y=None gives the boundary value at alpha.");

  m.def(
      "convergence",
      [](const ChainPtr& c, const std::string& alpha, std::uint64_t seed, const std::string& r,
         std::size_t trajectories, std::vector<std::size_t> checkpoints, double threshold,
         std::optional<std::string> x0) {
        const auto p = params(*c, alpha, r, x0);
        ConvergenceConfig cfg;
        cfg.trajectories = trajectories;
        cfg.checkpoints = std::move(checkpoints);
        cfg.threshold = threshold;
        ConvergenceReport rep;
        {
          py::gil_scoped_release release;
          rep = convergence_stats(*c, p, cfg, seed);
        }
        py::dict d;
        d["witness"] = rep.witness;
        d["threshold"] = rep.threshold;
        d["trajectories"] = rep.trajectories;
        py::list cps;
        for (const auto& cp : rep.checkpoints) {
          py::dict e;
          e["steps"] = cp.steps;
          e["fraction_beyond"] = cp.fraction_beyond;
          e["quantiles"] = cp.quantiles;
          e["median"] = cp.median;
          cps.append(e);
        }
        d["checkpoints"] = cps;
        d["mean_returns"] = rep.mean_returns;
        d["early_last_return_fraction"] = rep.early_last_return_fraction;
        return d;
      },
      py::arg("chain"), py::arg("alpha"), py::arg("seed"), py::arg("r") = "1/2", py::arg("trajectories") = 10000,
      py::arg("checkpoints") = std::vector<std::size_t>{1000}, py::arg("threshold") = 50.0, py::arg("x0") = py::none(),
      "Simulate the transformed chain and summarise the boundary witness.");

  // ---- potential kernel ----
  m.def(
      "potential_table",
      [](int radius) {
        const auto t = potential_table(radius);
        py::list rows;
        for (int i = 0; i <= radius; ++i) {
          for (int j = 0; j <= i; ++j) {
            const auto& v = t.at(i, j);
            rows.append(py::make_tuple(i, j, to_string(v.rational_part()), to_string(v.inv_pi_part()), v.to_double()));
          }
        }
        return rows;
      },
      py::arg("radius"), "Octant rows (i, j, p, q, numeric) with a(i, j) = p + q/pi.");

  m.def(
      "potential_value", [](int i, int j) { return pi_dict(shared_potential_table(std::max(std::abs(i), std::abs(j))).at(i, j)); },
      py::arg("i"), py::arg("j"));

  m.def(
      "check_potential",
      [](int radius) {
        const auto t = potential_table(radius);
        const auto rep = verify_harmonicity(t);
        py::dict d;
        d["ok"] = rep.ok();
        d["interior_checked"] = rep.interior_checked;
        d["violations"] = rep.violations.size();
        d["symmetry_violations"] = rep.symmetry_violations;
        d["origin_defect"] = rep.origin_defect.to_string();
        d["asymptotic_constant"] = asymptotic_constant(t);
        return d;
      },
      py::arg("radius"));

  m.def(
      "potential_mc",
      [](const std::string& x, const std::vector<std::string>& ys, std::uint64_t seed, std::size_t trajectories,
         int exit_radius) {
        auto z2 = make_chain("z2");
        PotentialMcConfig cfg;
        cfg.trajectories = trajectories;
        cfg.exit_radius = exit_radius;
        std::vector<PotentialEstimate> est;
        {
          py::gil_scoped_release release;
          est = potential_mc(z2->parse_state(x), states(*z2, ys), cfg, seed);
        }
        py::list out;
        for (const auto& e : est) {
          py::dict d;
          d["y"] = z2->format_state(e.y);
          d["value"] = e.value;
          d["stderr"] = e.std_error;
          d["runs"] = e.runs;
          d["exited"] = e.exited;
          out.append(d);
        }
        return out;
      },
      py::arg("x"), py::arg("ys"), py::arg("seed"), py::arg("trajectories") = 100000, py::arg("exit_radius") = 0,
      "Monte Carlo estimate of a(y - x) on Z^2.");

  // ---- conformance ----
  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t seed, bool corrupt_phi) {
        VerifyOptions opt;
        opt.corrupt_phi = corrupt_phi;
        ConformanceReport rep;
        const auto s = parse_suite(suite);
        {
          py::gil_scoped_release release;
          rep = verify_suite(s, seed, opt);
        }
        py::dict d;
        d["suite"] = rep.suite;
        d["seed"] = rep.seed;
        d["ok"] = rep.ok();
        py::list checks;
        for (const auto& c : rep.checks) {
          py::dict e;
          e["id"] = c.id;
          e["reference"] = c.reference;
          e["status"] = status_name(c.status);
          e["details"] = c.details;
          checks.append(e);
        }
        d["checks"] = checks;
        return d;
      },
      py::arg("suite") = "exact", py::arg("seed") = 0, py::arg("corrupt_phi") = false);

  m.def("check_catalog", &check_catalog);
}
