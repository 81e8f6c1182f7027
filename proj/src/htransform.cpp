#include "martinq/htransform.hpp"

#include <algorithm>
#include <cmath>

#include "martinq/errors.hpp"

namespace martinq {

TransformedChain::TransformedChain(std::shared_ptr<const Chain> base, HarmonicProfile phi, Rational r)
    : base_(std::move(base)), phi_(std::move(phi)), r_(std::move(r)) {
  if (r_ <= 0 || r_ >= 1) throw UnsupportedError("r must lie in (0, 1), got " + to_string(r_));
  long double mass_approx = 0;
  for (const auto& t : step_distribution(*base_, x0())) {
    if (phi_.has_exact()) mass_ += phi_(t.to) * t.probability;
    mass_approx += phi_.approx(t.to) * static_cast<long double>(to_double(t.probability));
  }
  if (phi_.has_exact()) {
    if (mass_.sign() <= 0) throw UnsupportedError("profile has zero mass at the base point");
    offset_ = mass_ * Rational(r_ / (1 - r_));
    offset_approx_ = offset_.to_long_double();
  } else {
    offset_approx_ = mass_approx * static_cast<long double>(to_double(r_ / (1 - r_)));
  }
}

std::shared_ptr<const TransformedChain> TransformedChain::from_params(const Chain& chain, const TransformParams& params) {
  return std::make_shared<TransformedChain>(make_chain(chain.name()), profile_from_boundary(chain, params.x0, params.alpha),
                                            params.r);
}

std::shared_ptr<const TransformedChain> transformed_chain(const Chain& chain, const TransformParams& params) {
  return TransformedChain::from_params(chain, params);
}

std::string TransformedChain::name() const {
  return "h(" + base_->name() + ";" + phi_.label() + ";r=" + to_string(r_) + ")";
}

PiRational TransformedChain::psi(const State& x) const {
  if (!phi_.has_exact()) throw InexactError("psi needs an exact profile");
  return x == x0() ? offset_ : offset_ + phi_(x);
}

long double TransformedChain::psi_approx(const State& x) const {
  return x == x0() ? offset_approx_ : offset_approx_ + phi_.approx(x);
}

std::vector<Transition> TransformedChain::successors(const State& x) const {
  const PiRational px = psi(x);
  if (!px.is_rational()) throw InexactError("psi(" + format_state(x) + ") is irrational; use approx_successors");
  const Rational scale = (x == x0() ? r_ : Rational(1)) / px.as_rational();
  std::vector<Transition> out;
  for (auto& t : step_distribution(*base_, x)) {
    const PiRational py = psi(t.to);
    if (!py.is_rational()) throw InexactError("psi(" + format_state(t.to) + ") is irrational");
    Rational q = t.probability * py.as_rational() * scale;
    out.push_back({std::move(t.to), std::move(q)});
  }
  return out;
}

std::vector<ApproxTransition> TransformedChain::approx_successors(const State& x) const {
  const long double px = psi_approx(x);
  const long double scale = (x == x0() ? static_cast<long double>(to_double(r_)) : 1.0L) / px;
  std::vector<ApproxTransition> out;
  long double total = 0;
  std::vector<long double> w;
  auto base = base_->approx_successors(x);
  for (const auto& t : base) {
    w.push_back(static_cast<long double>(t.probability) * psi_approx(t.to) * scale);
    total += w.back();
  }
  for (std::size_t i = 0; i < base.size(); ++i) out.push_back({std::move(base[i].to), static_cast<double>(w[i] / total)});
  return out;
}

PiRational psi_weight(const Chain& chain, const TransformParams& params, const State& x) {
  const auto& ex = as_example(chain);
  ex.require(x);
  const auto beta = ex.stationary(params.x0);
  const Rational c = params.r / (1 - params.r);
  PiRational l;
  if (x != params.x0) {
    if (params.x0 == ex.base_point()) {
      l = ex.martin_boundary(params.x0, x, params.alpha);
    } else {
      // L_{x0}(x, alpha) = beta(x0) phi_{x0,alpha}(x) off x0
      l = profile_from_boundary(chain, params.x0, params.alpha)(x) * *beta;
    }
  }
  return (PiRational(c) + l) / *beta;
}

RowSumReport verify_row_sums(const TransformedChain& q, const std::vector<State>& window) {
  RowSumReport report;
  for (const auto& x : window) {
    PiRational s;
    for (const auto& t : step_distribution(q.base(), x)) s += q.psi(t.to) * t.probability;
    if (x == q.x0()) s *= q.r();
    ++report.checked;
    if (!(s == q.psi(x))) report.violations.push_back(x);
  }
  return report;
}

RnReport rn_identity_check(const TransformedChain& q, const State& x, std::size_t n, std::size_t cap) {
  RnReport report;
  const Rational psi_x = q.psi(x).as_rational();
  for_each_path(
      q.base(), x, n,
      [&](const std::vector<State>& path, const Rational& p) {
        Rational lhs = 1;
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
          Rational step = 0;
          for (const auto& t : q.successors(path[k])) {
            if (t.to == path[k + 1]) step += t.probability;
          }
          lhs *= step;
        }
        const auto visits = static_cast<unsigned long>(std::count(path.begin(), path.end() - 1, q.x0()));
        const Rational rhs = p * q.psi(path.back()).as_rational() / psi_x * pow(q.r(), visits);
        ++report.paths;
        report.transformed_total += lhs;
        if (lhs != rhs) {
          ++report.mismatches;
          report.max_discrepancy = std::max(report.max_discrepancy, Rational(abs(lhs - rhs)));
        }
      },
      cap);
  return report;
}

PiRational k_kernel(const Chain& chain, const TransformParams& params, const State& x, const State& y) {
  const PiRational psi_x0 = psi_weight(chain, params, params.x0);
  const PiRational psi_x = psi_weight(chain, params, x);
  PiRational inner = 1;
  if (x != params.x0) {
    const Rational l = exact_green(chain, params.x0, x, y) / exact_green(chain, params.x0, params.x0, y);
    inner += PiRational((1 - params.r) / params.r * l);
  }
  return inner * psi_x0 / psi_x;
}

PiRational k_kernel_boundary(const Chain& chain, const TransformParams& params, const State& x) {
  const PiRational psi_x0 = psi_weight(chain, params, params.x0);
  const PiRational psi_x = psi_weight(chain, params, x);
  PiRational inner = 1;
  if (x != params.x0) {
    inner += exact_martin_boundary(chain, params.x0, x, params.alpha) * Rational((1 - params.r) / params.r);
  }
  return inner * psi_x0 / psi_x;
}

MappedFunction r_map(const TransformedChain& q, const ExactFunction& phi, const std::vector<State>& window) {
  MappedFunction out;
  const State x0 = q.x0();
  if (!phi(x0).is_zero()) {
    out.precondition_ok = false;
    out.violations.push_back("phi(x0) = " + phi(x0).to_string());
  }
  PiRational balance;
  for (const auto& t : step_distribution(q.base(), x0)) balance += phi(t.to) * t.probability;
  for (const auto& x : window) {
    if (x == x0) continue;
    PiRational s;
    for (const auto& t : step_distribution(q.base(), x)) s += phi(t.to) * t.probability;
    if (!(s == phi(x))) {
      out.precondition_ok = false;
      out.violations.push_back("phi not harmonic at " + q.format_state(x));
    }
  }
  const PiRational shift = balance * Rational(q.r() / (1 - q.r()));
  const auto* qp = &q;
  out.f = [phi, shift, qp](const State& x) { return (phi(x) + shift) / qp->psi(x); };
  return out;
}

MappedFunction r_map_inverse(const TransformedChain& q, const ExactFunction& h, const std::vector<State>& window) {
  MappedFunction out;
  const State x0 = q.x0();
  for (const auto& x : window) {
    PiRational s;
    for (const auto& t : step_distribution(q.base(), x)) s += q.psi(t.to) * h(t.to) * t.probability;
    if (x == x0) s *= q.r();
    if (!(s == q.psi(x) * h(x))) {
      out.precondition_ok = false;
      out.violations.push_back("h not harmonic for the transformed chain at " + q.format_state(x));
    }
  }
  PiRational mean;
  for (const auto& t : step_distribution(q.base(), x0)) mean += q.psi(t.to) * h(t.to) * t.probability;
  const PiRational shift = mean * q.r();
  const auto* qp = &q;
  out.f = [h, shift, qp](const State& x) { return qp->psi(x) * h(x) - shift; };
  return out;
}

// ---- convergence experiments -----------------------------------------------

namespace {

void summarise(std::vector<double>& values, double threshold, ConvergenceCheckpoint& cp) {
  const auto n = values.size();
  cp.fraction_beyond =
      static_cast<double>(std::count_if(values.begin(), values.end(), [&](double v) { return v > threshold; })) /
      static_cast<double>(n);
  std::sort(values.begin(), values.end());
  for (double p : {0.10, 0.25, 0.50, 0.75, 0.90}) {
    cp.quantiles.push_back(values[std::min(n - 1, static_cast<std::size_t>(p * static_cast<double>(n)))]);
  }
  cp.median = cp.quantiles[2];
}

// Tree walk seen through (depth, agreement with the ray). With base point at
// the root, psi only depends on the agreement j: psi_j = c + k^j - 1.
ConvergenceReport tree_projection(const TreeWalk& tree, const TransformParams& params, const ConvergenceConfig& config,
                                  std::uint64_t seed) {
  const int k = tree.arity();
  const long double r = to_double(params.r);
  const long double c = static_cast<long double>(k - 1) / k * r / (1 - r);
  // ratio psi_{j+d}/psi_j computed as (c k^-j + k^d - k^-j) / (c k^-j + 1 - k^-j)
  auto ratio = [&](long long j, int d) {
    const long double s = std::pow(static_cast<long double>(k), -static_cast<long double>(j));
    return (c * s + std::pow(static_cast<long double>(k), d) - s) / (c * s + 1 - s);
  };
  const std::size_t horizon = *std::max_element(config.checkpoints.begin(), config.checkpoints.end());
  std::vector<std::vector<double>> witness(config.checkpoints.size(), std::vector<double>(config.trajectories));
  double returns = 0;
  std::size_t early = 0;
  for (std::size_t t = 0; t < config.trajectories; ++t) {
    Rng rng = Rng::stream(seed, t);
    long long d = 0;
    long long j = 0;
    std::size_t last_return = 0;
    for (std::size_t step = 1; step <= horizon; ++step) {
      const double u = rng.uniform();
      if (d == 0) {
        const long double on_ray = r / k * ratio(0, 1);
        d = 1;
        j = u < on_ray ? 1 : 0;
      } else if (j == d) {
        const long double up = 1.0L / (2 * k) * ratio(j, 1);
        const long double parent = 0.5L * ratio(j, -1);
        if (u < up) {
          ++d;
          ++j;
        } else if (u < up + parent) {
          --d;
          --j;
        } else {
          ++d;
        }
      } else {
        d += u < 0.5 ? -1 : 1;
      }
      if (d == 0) {
        returns += 1;
        last_return = step;
      }
      for (std::size_t c2 = 0; c2 < config.checkpoints.size(); ++c2) {
        if (config.checkpoints[c2] == step) witness[c2][t] = static_cast<double>(j);
      }
    }
    if (last_return * 10 < horizon) ++early;
  }
  ConvergenceReport report;
  report.witness = "agreement-length";
  report.threshold = config.threshold;
  report.trajectories = config.trajectories;
  for (std::size_t c2 = 0; c2 < config.checkpoints.size(); ++c2) {
    ConvergenceCheckpoint cp;
    cp.steps = config.checkpoints[c2];
    summarise(witness[c2], config.threshold, cp);
    report.checkpoints.push_back(std::move(cp));
  }
  report.mean_returns = returns / static_cast<double>(config.trajectories);
  report.early_last_return_fraction = static_cast<double>(early) / static_cast<double>(config.trajectories);
  return report;
}

}  // namespace

ConvergenceReport convergence_stats(const Chain& chain, const TransformParams& params, const ConvergenceConfig& config,
                                    std::uint64_t seed) {
  if (config.trajectories == 0 || config.checkpoints.empty()) throw Error("convergence_stats needs trajectories and checkpoints");
  const auto& ex = as_example(chain);
  ex.require_boundary(params.alpha);
  if (const auto* tree = dynamic_cast<const TreeWalk*>(&ex); tree != nullptr && params.x0 == ex.base_point()) {
    return tree_projection(*tree, params, config, seed);
  }
  const auto q = transformed_chain(chain, params);
  const bool is_z2 = dynamic_cast<const Z2Walk*>(&ex) != nullptr;
  const bool is_tree = dynamic_cast<const TreeWalk*>(&ex) != nullptr;
  const double sign = params.alpha.kind == BoundaryPoint::Kind::minus_infinity ? -1.0 : 1.0;
  auto witness_of = [&](const State& s) -> double {
    if (is_z2) return std::hypot(static_cast<double>(s[0]), static_cast<double>(s[1]));
    if (is_tree) return static_cast<double>(params.alpha.ray.agreement(s.coords));
    return sign * s[0];
  };
  const std::size_t horizon = *std::max_element(config.checkpoints.begin(), config.checkpoints.end());
  std::vector<std::vector<double>> witness(config.checkpoints.size(), std::vector<double>(config.trajectories));
  double returns = 0;
  std::size_t early = 0;
  for (std::size_t t = 0; t < config.trajectories; ++t) {
    Rng rng = Rng::stream(seed, t);
    State s = params.x0;
    std::size_t last_return = 0;
    for (std::size_t step = 1; step <= horizon; ++step) {
      q->step(s, rng);
      if (s == params.x0) {
        returns += 1;
        last_return = step;
      }
      for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
        if (config.checkpoints[c] == step) witness[c][t] = witness_of(s);
      }
    }
    if (last_return * 10 < horizon) ++early;
  }
  ConvergenceReport report;
  report.witness = is_z2 ? "norm" : (is_tree ? "agreement-length" : "signed-position");
  report.threshold = config.threshold;
  report.trajectories = config.trajectories;
  for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
    ConvergenceCheckpoint cp;
    cp.steps = config.checkpoints[c];
    summarise(witness[c], config.threshold, cp);
    report.checkpoints.push_back(std::move(cp));
  }
  report.mean_returns = returns / static_cast<double>(config.trajectories);
  report.early_last_return_fraction = static_cast<double>(early) / static_cast<double>(config.trajectories);
  return report;
}

}  // namespace martinq
