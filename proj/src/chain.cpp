#include "martinq/chain.hpp"

#include <algorithm>

#include "martinq/errors.hpp"

namespace martinq {

std::vector<ApproxTransition> Chain::approx_successors(const State& x) const {
  std::vector<ApproxTransition> out;
  for (auto& t : successors(x)) out.push_back({std::move(t.to), to_double(t.probability)});
  return out;
}

std::vector<Transition> Chain::predecessors(const State& x) const {
  throw MissingPredecessorsError("chain " + name() + " provides no predecessor lists (state " + format_state(x) + ")");
}

std::optional<Rational> Chain::stationary(const State&) const { return std::nullopt; }

void Chain::step(State& x, Rng& rng) const {
  const auto succ = approx_successors(x);
  double u = rng.uniform();
  for (const auto& t : succ) {
    if (u < t.probability) {
      x = t.to;
      return;
    }
    u -= t.probability;
  }
  x = succ.back().to;
}

void Chain::require(const State& x) const {
  if (!contains(x)) throw UnknownStateError("state " + format_state(x) + " is not a state of " + name());
}

Trajectory::Trajectory(std::vector<State> states) : states_(std::move(states)) {
  if (states_.empty()) throw Error("a trajectory needs at least its starting state");
}

std::size_t Trajectory::occupation(const State& y, std::size_t n) const {
  const auto end = states_.begin() + static_cast<std::ptrdiff_t>(std::min(n + 1, states_.size()));
  return static_cast<std::size_t>(std::count(states_.begin(), end, y));
}

std::optional<std::size_t> Trajectory::first_hit(const State& y) const { return hit_time(y, 1); }

std::optional<std::size_t> Trajectory::first_return(const State& y) const {
  for (std::size_t k = 1; k < states_.size(); ++k) {
    if (states_[k] == y) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> Trajectory::hit_time(const State& y, std::size_t p) const {
  std::size_t seen = 0;
  for (std::size_t k = 0; k < states_.size(); ++k) {
    if (states_[k] == y && ++seen == p) return k;
  }
  return std::nullopt;
}

bool Trajectory::is_valid(const Chain& chain) const {
  for (std::size_t k = 0; k + 1 < states_.size(); ++k) {
    const auto succ = chain.successors(states_[k]);
    const bool found = std::any_of(succ.begin(), succ.end(),
                                   [&](const Transition& t) { return t.to == states_[k + 1] && t.probability > 0; });
    if (!found) return false;
  }
  return true;
}

std::vector<Transition> step_distribution(const Chain& chain, const State& x) {
  chain.require(x);
  auto succ = chain.successors(x);
  Rational total = 0;
  for (const auto& t : succ) {
    if (t.probability <= 0) throw Error("non-positive transition probability out of " + chain.format_state(x));
    total += t.probability;
  }
  if (total != 1) {
    throw RowSumError("transition probabilities out of " + chain.format_state(x) + " sum to " + to_string(total));
  }
  return succ;
}

void for_each_path(const Chain& chain, const State& x, std::size_t n,
                   const std::function<void(const std::vector<State>&, const Rational&)>& visit, std::size_t cap) {
  chain.require(x);
  std::vector<State> path{x};
  std::vector<Rational> weight{Rational(1)};
  std::size_t emitted = 0;

  std::function<void()> recurse = [&]() {
    if (path.size() == n + 1) {
      if (++emitted > cap) {
        throw BudgetExceededError("path enumeration exceeded the cap of " + std::to_string(cap) + " paths");
      }
      visit(path, weight.back());
      return;
    }
    for (auto& t : chain.successors(path.back())) {
      path.push_back(std::move(t.to));
      weight.push_back(weight.back() * t.probability);
      recurse();
      path.pop_back();
      weight.pop_back();
    }
  };
  recurse();
}

std::vector<PathWeight> enumerate_paths(const Chain& chain, const State& x, std::size_t n, std::size_t cap) {
  std::vector<PathWeight> out;
  for_each_path(
      chain, x, n, [&](const std::vector<State>& p, const Rational& w) { out.push_back({Trajectory(p), w}); }, cap);
  return out;
}

Trajectory simulate(const Chain& chain, const State& x, std::size_t steps, Rng& rng) {
  chain.require(x);
  Trajectory traj(x);
  State cur = x;
  for (std::size_t i = 0; i < steps; ++i) {
    chain.step(cur, rng);
    traj.push(cur);
  }
  return traj;
}

StationaryReport verify_stationary(const Chain& chain, const std::vector<State>& window) {
  if (!chain.has_predecessors()) {
    throw MissingPredecessorsError("chain " + chain.name() + " provides no predecessor lists");
  }
  StationaryReport report;
  for (const auto& y : window) {
    const auto beta_y = chain.stationary(y);
    if (!beta_y) throw UnsupportedError("chain " + chain.name() + " has no stationary measure");
    Rational inflow = 0;
    for (const auto& [z, p] : chain.predecessors(y)) {
      inflow += p * *chain.stationary(z);
    }
    ++report.checked;
    if (inflow != *beta_y) report.violations.push_back({y, *beta_y, inflow});
  }
  return report;
}

Distribution<Rational> advance_exact(const Chain& chain, const Distribution<Rational>& dist,
                                     const std::function<bool(const State&)>& killed) {
  Distribution<Rational> next;
  next.reserve(dist.size() * 2);
  for (const auto& [x, mass] : dist) {
    for (auto& t : chain.successors(x)) {
      if (killed && killed(t.to)) continue;
      next[std::move(t.to)] += mass * t.probability;
    }
  }
  return next;
}

Distribution<double> advance_approx(const Chain& chain, const Distribution<double>& dist,
                                    const std::function<bool(const State&)>& killed) {
  Distribution<double> next;
  next.reserve(dist.size() * 2);
  for (const auto& [x, mass] : dist) {
    for (auto& t : chain.approx_successors(x)) {
      if (killed && killed(t.to)) continue;
      next[std::move(t.to)] += mass * t.probability;
    }
  }
  return next;
}

}  // namespace martinq
