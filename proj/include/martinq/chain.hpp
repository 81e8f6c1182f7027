#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "martinq/rational.hpp"
#include "martinq/rng.hpp"
#include "martinq/state.hpp"

namespace martinq {

struct Transition {
  State to;
  Rational probability;
};

struct ApproxTransition {
  State to;
  double probability;
};

/// What a finite solver window does with transitions that leave it.
enum class BoundaryPolicy {
  kill,     ///< exits are absorbed: solver values are lower bounds
  reflect,  ///< exits become self-loops: exact when boundary states are cut vertices
};

/// A countable-state Markov chain with finite-support transitions.
///
/// Implementations are immutable after construction and may be shared
/// across threads.
class Chain {
 public:
  virtual ~Chain() = default;

  /// Selector string that reconstructs this chain (see make_chain).
  virtual std::string name() const = 0;

  virtual bool contains(const State& x) const = 0;

  /// Exact transition probabilities out of x; they sum to 1.
  virtual std::vector<Transition> successors(const State& x) const = 0;

  /// Floating-point view of successors(); chains override it for speed.
  virtual std::vector<ApproxTransition> approx_successors(const State& x) const;

  virtual bool has_predecessors() const { return false; }

  /// Exact (z, p_{z,x}) pairs; throws MissingPredecessorsError by default.
  virtual std::vector<Transition> predecessors(const State& x) const;

  /// Stationary measure beta(x), when the chain provides one.
  virtual std::optional<Rational> stationary(const State& x) const;

  /// Advances x by one transition in place.
  virtual void step(State& x, Rng& rng) const;

  virtual State parse_state(std::string_view text) const = 0;
  virtual std::string format_state(const State& x) const = 0;

  /// States within `radius` of the reference point, in canonical order.
  virtual std::vector<State> ball(int radius) const = 0;

  /// Window policy under which finite solves are exact (or best available).
  virtual BoundaryPolicy default_boundary() const { return BoundaryPolicy::kill; }

  /// Throws UnknownStateError unless contains(x).
  void require(const State& x) const;
};

/// Realised path X_0..X_n.
class Trajectory {
 public:
  explicit Trajectory(State start) { states_.push_back(std::move(start)); }
  explicit Trajectory(std::vector<State> states);

  const State& start() const { return states_.front(); }
  const std::vector<State>& states() const { return states_; }
  const State& at(std::size_t k) const { return states_.at(k); }
  std::size_t length() const { return states_.size() - 1; }

  void push(State s) { states_.push_back(std::move(s)); }

  /// L^y_n = #{0 <= k <= n : X_k = y}.
  std::size_t occupation(const State& y, std::size_t n) const;
  /// T_y = inf{k >= 0 : X_k = y}, if y is visited.
  std::optional<std::size_t> first_hit(const State& y) const;
  /// T'_y = inf{k >= 1 : X_k = y}, if y is visited after time 0.
  std::optional<std::size_t> first_return(const State& y) const;
  /// Time of the p-th visit to y (p >= 1, time 0 included).
  std::optional<std::size_t> hit_time(const State& y, std::size_t p) const;

  /// True when every consecutive pair has positive transition probability.
  bool is_valid(const Chain& chain) const;

 private:
  std::vector<State> states_;
};

struct PathWeight {
  Trajectory path;
  Rational probability;
};

inline constexpr std::size_t kDefaultPathCap = 10'000'000;

/// Validated step distribution: positive probabilities summing exactly to 1.
std::vector<Transition> step_distribution(const Chain& chain, const State& x);

/// Visits every length-n path from x with its exact probability, in the
/// canonical successor order. Throws BudgetExceededError past `cap` paths.
void for_each_path(const Chain& chain, const State& x, std::size_t n,
                   const std::function<void(const std::vector<State>&, const Rational&)>& visit,
                   std::size_t cap = kDefaultPathCap);

std::vector<PathWeight> enumerate_paths(const Chain& chain, const State& x, std::size_t n,
                                        std::size_t cap = kDefaultPathCap);

Trajectory simulate(const Chain& chain, const State& x, std::size_t steps, Rng& rng);

struct StationaryViolation {
  State state;
  Rational beta;
  Rational inflow;
};

struct StationaryReport {
  std::size_t checked = 0;
  std::vector<StationaryViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks beta(y) = sum_x p_{x,y} beta(x) exactly for y in the window.
StationaryReport verify_stationary(const Chain& chain, const std::vector<State>& window);

/// Sub-probability distribution over states.
template <class T>
using Distribution = std::unordered_map<State, T, StateHash>;

/// One step of forward propagation. Mass landing on a state for which
/// `killed` returns true is dropped.
Distribution<Rational> advance_exact(const Chain& chain, const Distribution<Rational>& dist,
                                     const std::function<bool(const State&)>& killed);
Distribution<double> advance_approx(const Chain& chain, const Distribution<double>& dist,
                                    const std::function<bool(const State&)>& killed);

}  // namespace martinq
