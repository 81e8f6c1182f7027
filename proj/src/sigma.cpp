#include "martinq/sigma.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <unordered_map>

#include "martinq/errors.hpp"
#include "martinq/green.hpp"
#include "martinq/htransform.hpp"

namespace martinq {

// ---- functionals -----------------------------------------------------------

HorizonFunctional HorizonFunctional::one(std::size_t horizon) {
  HorizonFunctional f;
  f.kind_ = Kind::constant;
  f.horizon_ = horizon;
  f.description_ = "1";
  return f;
}

HorizonFunctional HorizonFunctional::path_indicator(std::vector<State> path) {
  if (path.empty()) throw Error("path indicator needs at least one state");
  HorizonFunctional f;
  f.kind_ = Kind::path;
  f.horizon_ = path.size() - 1;
  f.path_ = std::move(path);
  f.description_ = "path";
  return f;
}

HorizonFunctional HorizonFunctional::state_at(std::size_t m, State s, std::size_t horizon) {
  HorizonFunctional f;
  f.kind_ = Kind::at;
  f.time_ = m;
  f.state_ = std::move(s);
  f.horizon_ = std::max(m, horizon);
  f.description_ = "at";
  return f;
}

HorizonFunctional HorizonFunctional::avoid(State y, std::size_t horizon) {
  HorizonFunctional f;
  f.kind_ = Kind::avoid;
  f.state_ = std::move(y);
  f.horizon_ = horizon;
  f.description_ = "avoid";
  return f;
}

HorizonFunctional HorizonFunctional::custom(std::size_t horizon, Eval eval, std::string description, bool indicator) {
  HorizonFunctional f;
  f.kind_ = Kind::custom;
  f.horizon_ = horizon;
  f.eval_ = std::move(eval);
  f.description_ = std::move(description);
  f.indicator_ = indicator;
  return f;
}

std::size_t HorizonFunctional::event_time() const {
  switch (kind_) {
    case Kind::constant: return 0;
    case Kind::path: return path_.size() - 1;
    case Kind::at: return time_;
    case Kind::avoid:
    case Kind::custom: return horizon_;
  }
  return horizon_;
}

HorizonFunctional HorizonFunctional::with_horizon(std::size_t n) const {
  const std::size_t need = kind_ == Kind::avoid ? 0 : event_time();
  if (n < need) {
    throw Error("horizon " + std::to_string(n) + " is before the event time " + std::to_string(need));
  }
  HorizonFunctional f = *this;
  if (kind_ == Kind::custom) {
    // read on the prefix of length horizon + 1
    const std::size_t own = horizon_;
    auto eval = eval_;
    f.eval_ = [own, eval](const std::vector<State>& path) {
      return eval(std::vector<State>(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(own + 1)));
    };
  }
  f.horizon_ = n;
  return f;
}

Rational HorizonFunctional::operator()(const std::vector<State>& path) const {
  if (path.size() != horizon_ + 1) throw Error("functional expects a path of length " + std::to_string(horizon_ + 1));
  switch (kind_) {
    case Kind::constant: return 1;
    case Kind::path: return std::equal(path_.begin(), path_.end(), path.begin()) ? 1 : 0;
    case Kind::at: return path[time_] == state_ ? 1 : 0;
    case Kind::avoid: return std::find(path.begin(), path.end(), state_) == path.end() ? 1 : 0;
    case Kind::custom: return eval_(path);
  }
  return 0;
}

HorizonFunctional parse_event(const Chain& chain, std::string_view text) {
  auto state = [&](std::string_view t) {
    try {
      return chain.parse_state(t);
    } catch (const Error& e) {
      throw ParseError("event '" + std::string(text) + "': " + e.what());
    }
  };
  if (text.starts_with("path:")) {
    const auto body = text.substr(5);
    const char sep = body.find('/') != std::string_view::npos || chain.name().starts_with("tree") ? '/' : '.';
    std::vector<State> path;
    std::size_t pos = 0;
    while (true) {
      const auto end = body.find(sep, pos);
      path.push_back(state(body.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos)));
      if (end == std::string_view::npos) break;
      pos = end + 1;
    }
    return HorizonFunctional::path_indicator(std::move(path));
  }
  if (text.starts_with("at:")) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError("event '" + std::string(text) + "': expected at:<m>=<state>");
    const auto m = text.substr(3, eq - 3);
    std::size_t time = 0;
    const auto [ptr, ec] = std::from_chars(m.data(), m.data() + m.size(), time);
    if (ec != std::errc() || ptr != m.data() + m.size()) throw ParseError("event '" + std::string(text) + "': bad time");
    return HorizonFunctional::state_at(time, state(text.substr(eq + 1)));
  }
  if (text.starts_with("avoid:")) return HorizonFunctional::avoid(state(text.substr(6)), 0);
  throw ParseError("event '" + std::string(text) + "': expected path:..., at:<m>=<state> or avoid:<state>");
}

std::string mode_name(MeasureMode mode) {
  switch (mode) {
    case MeasureMode::exact: return "exact";
    case MeasureMode::monotone_sequence: return "monotone-sequence";
    case MeasureMode::monte_carlo: return "monte-carlo";
    case MeasureMode::bracket: return "bracket";
  }
  return "?";
}

namespace {

void require_base(const HarmonicProfile& phi, const State& x0) {
  if (phi.base() != x0) throw Error("profile base point does not match x0");
}

}  // namespace

// ---- restricted measure ----------------------------------------------------

MeasureValue restricted_measure(const Chain& chain, const State& x0, const HarmonicProfile& phi, const State& x,
                                const HorizonFunctional& f, std::size_t cap) {
  require_base(phi, x0);
  chain.require(x);
  MeasureValue out;
  const std::size_t n = f.horizon();
  if (phi.has_exact()) {
    PiRational total;
    for_each_path(
        chain, x, n,
        [&](const std::vector<State>& path, const Rational& p) {
          const Rational w = f(path);
          if (w != 0) total += phi(path.back()) * Rational(p * w);
        },
        cap);
    out.exact = total;
    out.value = total.to_double();
  } else {
    long double total = 0;
    for_each_path(
        chain, x, n,
        [&](const std::vector<State>& path, const Rational& p) {
          const Rational w = f(path);
          if (w != 0) total += phi.approx(path.back()) * static_cast<long double>(to_double(p * w));
        },
        cap);
    out.value = static_cast<double>(total);
    out.verdict = "numeric";
  }
  out.sequence.push_back({n, out.value, out.exact, 0, "enumeration"});
  return out;
}

// ---- cylinder sequences ----------------------------------------------------

std::string sequence_verdict(const std::vector<double>& values, double ratio, double tol) {
  const auto n = values.size();
  if (n < 2) return "undecided";
  const double last = values[n - 1] - values[n - 2];
  if (std::abs(last) < tol * std::abs(values[n - 1]) || (last == 0 && values[n - 1] == 0)) return "converged";
  if (n >= 4) {
    const double d1 = values[n - 3] - values[n - 4];
    const double d2 = values[n - 2] - values[n - 3];
    const double d3 = last;
    if (d1 > 0 && d2 > 0 && d3 > 0 && d2 / d1 > ratio && d3 / d2 > ratio) return "diverges";
  }
  return "undecided";
}

namespace {

// Conditioning applied to the distribution at time t.
template <class T>
void condition(Distribution<T>& dist, const HorizonFunctional& a, std::size_t t) {
  using Kind = HorizonFunctional::Kind;
  auto keep_only = [&](const State& s) {
    for (auto it = dist.begin(); it != dist.end();) it = it->first == s ? std::next(it) : dist.erase(it);
  };
  if (a.kind() == Kind::path && t < a.path().size()) keep_only(a.path()[t]);
  if (a.kind() == Kind::at && t == a.time()) keep_only(a.state());
  if (a.kind() == Kind::avoid) dist.erase(a.state());
}

bool wants(const HorizonFunctional& a, std::size_t n) {
  return a.kind() == HorizonFunctional::Kind::avoid || n >= a.event_time();
}

}  // namespace

MeasureValue cylinder_measure(const Chain& chain, const State& x0, const HarmonicProfile& phi, const State& x,
                              const HorizonFunctional& a, const std::vector<std::size_t>& horizons,
                              const SequenceConfig& config) {
  require_base(phi, x0);
  chain.require(x);
  if (horizons.empty()) throw Error("cylinder_measure needs at least one horizon");
  if (!std::is_sorted(horizons.begin(), horizons.end()) ||
      std::adjacent_find(horizons.begin(), horizons.end()) != horizons.end()) {
    throw Error("horizons must be strictly increasing");
  }
  for (auto n : horizons) {
    if (!wants(a, n)) throw Error("horizon " + std::to_string(n) + " is before the event time");
  }

  MeasureValue out;
  out.mode = MeasureMode::monotone_sequence;
  std::size_t next = 0;  // next horizon index to fill

  if (a.kind() == HorizonFunctional::Kind::custom) {
    // general functionals: enumeration per horizon
    try {
      for (; next < horizons.size(); ++next) {
        const auto r = restricted_measure(chain, x0, phi, x, a.with_horizon(horizons[next]));
        out.sequence.push_back({horizons[next], r.value, r.exact, 0, "enumeration"});
      }
    } catch (const BudgetExceededError&) {
    }
  } else {
    const std::size_t last = horizons.back();
    bool exact = phi.has_exact();
    Distribution<Rational> qd;
    Distribution<double> dd;
    if (exact) {
      qd.emplace(x, Rational(1));
    } else {
      dd.emplace(x, 1.0);
    }
    for (std::size_t t = 0; next < horizons.size(); ++t) {
      if (exact) {
        condition(qd, a, t);
      } else {
        condition(dd, a, t);
      }
      if (t == horizons[next]) {
        if (exact) {
          PiRational v;
          for (const auto& [s, m] : qd) v += phi(s) * m;
          out.sequence.push_back({t, v.to_double(), v, 0, "propagation"});
        } else {
          long double v = 0;
          for (const auto& [s, m] : dd) v += phi.approx(s) * m;
          out.sequence.push_back({t, static_cast<double>(v), std::nullopt, 0, "propagation"});
        }
        ++next;
      }
      if (t == last) break;
      if (exact) {
        qd = advance_exact(chain, qd, [](const State&) { return false; });
        if (qd.size() > config.exact_support) {
          exact = false;
          for (const auto& [s, m] : qd) dd.emplace(s, to_double(m));
          qd.clear();
        }
      } else {
        dd = advance_approx(chain, dd, [](const State&) { return false; });
      }
      if (dd.size() > config.max_support) break;
    }
  }

  if (next < horizons.size()) {
    // Monte Carlo for the remaining horizons
    if (config.trajectories == 0) throw BudgetExceededError("propagation support exceeded; Monte Carlo needs trajectories");
    const std::size_t first = next;
    std::vector<double> sum(horizons.size(), 0.0), sum2(horizons.size(), 0.0);
    std::vector<State> path;
    for (std::size_t i = 0; i < config.trajectories; ++i) {
      Rng rng = Rng::stream(config.seed, i);
      path.assign(1, x);
      std::size_t h = first;
      while (h < horizons.size()) {
        while (path.size() < horizons[h] + 1) {
          State s = path.back();
          chain.step(s, rng);
          path.push_back(std::move(s));
        }
        const double w = to_double(a.with_horizon(horizons[h])(path));
        const double v = w == 0 ? 0.0 : w * static_cast<double>(phi.approx(path.back()));
        sum[h] += v;
        sum2[h] += v * v;
        ++h;
      }
    }
    const double n = static_cast<double>(config.trajectories);
    for (std::size_t h = first; h < horizons.size(); ++h) {
      const double mean = sum[h] / n;
      const double var = std::max(0.0, sum2[h] / n - mean * mean);
      out.sequence.push_back({horizons[h], mean, std::nullopt, std::sqrt(var / n), "monte-carlo"});
    }
    out.mode = MeasureMode::monte_carlo;
  }

  std::vector<double> values;
  for (const auto& p : out.sequence) values.push_back(p.value);
  for (std::size_t i = 1; i < out.sequence.size(); ++i) {
    const auto& p = out.sequence[i - 1];
    const auto& q = out.sequence[i];
    if (p.exact && q.exact) {
      if (*q.exact < *p.exact) out.monotone = false;
    } else if (q.value < p.value - 4 * (p.std_error + q.std_error) - 1e-12 * std::abs(p.value)) {
      out.monotone = false;
    }
  }
  out.verdict = sequence_verdict(values, config.divergence_ratio, config.convergence_tolerance);
  out.infinite = out.verdict == "diverges";
  out.value = values.back();
  out.exact = out.sequence.back().exact;
  out.std_error = out.sequence.back().std_error;
  return out;
}

// ---- concatenation ---------------------------------------------------------

ConcatenationReport verify_concatenation(const Chain& chain, const State& x0, const HarmonicProfile& phi,
                                         const State& x, const State& y, std::size_t n, std::size_t p,
                                         std::size_t cap) {
  require_base(phi, x0);
  if (p < n) throw Error("concatenation needs p >= n");
  chain.require(x);
  chain.require(y);
  std::map<std::vector<State>, Rational> prefixes;
  for_each_path(
      chain, x, n,
      [&](const std::vector<State>& path, const Rational& w) {
        if (path.back() == y) prefixes.emplace(path, w);
      },
      cap);
  std::map<std::vector<State>, PiRational> suffixes;
  for_each_path(
      chain, y, p - n, [&](const std::vector<State>& path, const Rational& w) { suffixes.emplace(path, phi(path.back()) * w); },
      cap);

  ConcatenationReport report;
  for_each_path(
      chain, x, p,
      [&](const std::vector<State>& path, const Rational& w) {
        ++report.indicators;
        PiRational lhs;
        PiRational rhs;
        if (path[n] == y) {
          lhs = phi(path.back()) * w;
          const std::vector<State> head(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(n + 1));
          const std::vector<State> tail(path.begin() + static_cast<std::ptrdiff_t>(n), path.end());
          auto ph = prefixes.find(head);
          auto st = suffixes.find(tail);
          if (ph != prefixes.end() && st != suffixes.end()) rhs = st->second * ph->second;
        }
        if (!lhs.is_zero()) ++report.nonzero;
        if (!(lhs == rhs)) {
          ++report.mismatches;
          report.max_discrepancy = std::max(report.max_discrepancy, std::abs((lhs - rhs).to_double()));
        }
      },
      cap);
  return report;
}

// ---- avoidance -------------------------------------------------------------

bool separates(const Chain& chain, const State& x0, const State& y, const State& x) {
  if (y == x || y == x0) return false;
  const auto* ex = dynamic_cast<const ExampleChain*>(&chain);
  if (ex == nullptr) return false;
  if (dynamic_cast<const ZWalk*>(ex) != nullptr || dynamic_cast<const BangBangWalk*>(ex) != nullptr) {
    return (x[0] < y[0] && y[0] < x0[0]) || (x0[0] < y[0] && y[0] < x[0]);
  }
  if (dynamic_cast<const TreeWalk*>(ex) != nullptr) {
    const auto lca = common_prefix(x.coords, x0.coords);
    const auto on_x = common_prefix(y.coords, x.coords) == y.size();
    const auto on_x0 = common_prefix(y.coords, x0.coords) == y.size();
    return (on_x || on_x0) && y.size() >= lca;
  }
  return false;
}

MeasureValue avoidance_function(const Chain& chain, const State& x0, const HarmonicProfile& phi, const State& x,
                                const State& y, const AvoidanceConfig& config) {
  require_base(phi, x0);
  chain.require(x);
  chain.require(y);
  MeasureValue out;
  if (x == y) {
    out.exact = PiRational(0);
    return out;
  }
  if (y == x0) {
    // the avoid event of x0 has measure phi(x)
    if (phi.has_exact()) {
      out.exact = phi(x);
      out.value = out.exact->to_double();
    } else {
      out.value = static_cast<double>(phi.approx(x));
      out.verdict = "numeric";
    }
    return out;
  }

  if (config.horizons.empty() || !std::is_sorted(config.horizons.begin(), config.horizons.end())) {
    throw Error("avoidance_function needs increasing horizons");
  }
  out.mode = MeasureMode::bracket;
  out.separated = separates(chain, x0, y, x);
  long double k = 0;
  for (const auto& t : chain.approx_successors(x0)) k += phi.approx(t.to) * static_cast<long double>(t.probability);
  const long double phi_y = phi.approx(y);

  // G^{(y)}(., x0): zero on the side of y away from x0
  std::unordered_map<State, double, StateHash> green;
  if (!out.separated) {
    const auto& ex = as_example(chain);
    int radius = ex.radius_of(x) + config.green_margin;
    if (dynamic_cast<const ZWalk*>(&ex) != nullptr || dynamic_cast<const BangBangWalk*>(&ex) != nullptr) {
      // a line is cheap: cover every state the propagation can reach
      radius = std::max(radius, ex.radius_of(x) + static_cast<int>(*std::max_element(config.horizons.begin(),
                                                                                      config.horizons.end())) + 1);
    }
    if (dynamic_cast<const TreeWalk*>(&ex) != nullptr) radius = std::min(radius, 12);
    KilledSolver solver(chain, y, ex.ball(radius), ex.default_boundary());
    const auto col = solver.column(x0);
    for (std::size_t i = 0; i < solver.size(); ++i) green.emplace(solver.window()[i], col[i]);
    if (ex.default_boundary() == BoundaryPolicy::kill) out.upper_certified = false;
  }
  auto green_at = [&](const State& s, bool& outside) -> double {
    if (out.separated) return 0.0;
    auto it = green.find(s);
    if (it == green.end()) {
      outside = true;
      return 0.0;
    }
    return it->second;
  };
  {
    bool outside = false;
    out.certified_upper = static_cast<double>(phi.approx(x) + k * green_at(x, outside));
  }

  auto record = [&](std::size_t n, double lo, double up, double lo_se, double up_se, const char* method) {
    up = std::min(up, *out.certified_upper);
    out.bracket.push_back({n, lo, up, lo_se, up_se, method});
    out.lower = lo;
    out.upper = up;
  };
  auto closed = [&]() { return out.upper && *out.upper - *out.lower <= config.tolerance * *out.upper; };

  std::size_t next = 0;
  const auto& hs = config.horizons;
  Distribution<double> dist{{x, 1.0}};
  std::size_t t = 0;
  for (; next < hs.size() && !closed(); ++t) {
    if (t == hs[next]) {
      long double lo = 0;
      long double up = 0;
      bool outside = false;
      for (const auto& [s, m] : dist) {
        const long double f = phi.approx(s);
        lo += m * std::max(0.0L, f - phi_y);
        up += m * (f + k * green_at(s, outside));
      }
      if (outside) out.upper_certified = false;
      record(t, static_cast<double>(lo), static_cast<double>(up), 0, 0, "propagation");
      ++next;
      if (next == hs.size() || closed()) break;
    }
    dist = advance_approx(chain, dist, [&](const State& s) { return s == y; });
    if (dist.size() > config.max_support) break;
  }

  if (next < hs.size() && !closed()) {
    // importance sampling through the transformed chain
    if (config.trajectories == 0) throw BudgetExceededError("propagation support exceeded; sampling needs trajectories");
    const TransformedChain q(make_chain(chain.name()), phi, Rational(1, 2));
    const long double psi_x = q.psi_approx(x);
    const std::size_t first = next;
    const std::size_t n_traj = config.trajectories;
    std::vector<long double> slo(hs.size(), 0), slo2(hs.size(), 0), sup(hs.size(), 0), sup2(hs.size(), 0);
    bool outside = false;
    for (std::size_t i = 0; i < n_traj; ++i) {
      Rng rng = Rng::stream(config.seed, i);
      State s = x;
      long double weight = psi_x;  // psi(x) r^{-L_{t-1}}, L counting visits to x0
      std::size_t h = first;
      bool killed = false;
      for (std::size_t step = 0; h < hs.size(); ++step) {
        if (step == hs[h]) {
          if (!killed) {
            const long double w = weight / q.psi_approx(s);
            const long double f = phi.approx(s);
            const long double lo = w * std::max(0.0L, f - phi_y);
            const long double up = w * (f + k * green_at(s, outside));
            slo[h] += lo;
            slo2[h] += lo * lo;
            sup[h] += up;
            sup2[h] += up * up;
          }
          ++h;
          if (h == hs.size()) break;
        }
        if (killed) continue;
        if (s == x0) weight *= 2;
        q.step(s, rng);
        if (s == y) killed = true;
      }
    }
    if (outside) out.upper_certified = false;
    const long double n = static_cast<long double>(n_traj);
    for (std::size_t h = first; h < hs.size(); ++h) {
      const long double ml = slo[h] / n;
      const long double mu = sup[h] / n;
      const long double vl = std::max(0.0L, slo2[h] / n - ml * ml);
      const long double vu = std::max(0.0L, sup2[h] / n - mu * mu);
      record(hs[h], static_cast<double>(ml), static_cast<double>(mu), static_cast<double>(std::sqrt(vl / n)),
             static_cast<double>(std::sqrt(vu / n)), "importance-sampling");
      if (closed()) break;
    }
  }

  out.verdict = closed() ? "bracket-closed" : "inconclusive";
  out.value = 0.5 * (*out.lower + *out.upper);
  return out;
}

}  // namespace martinq
