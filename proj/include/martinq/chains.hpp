#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "martinq/chain.hpp"
#include "martinq/pi_rational.hpp"

namespace martinq {

/// Infinite word over {0..k-1}: a finite prefix followed by a repeated cycle.
/// Only finite prefixes are ever materialised.
struct Ray {
  std::vector<std::int32_t> prefix;
  std::vector<std::int32_t> cycle;

  std::int32_t digit(std::size_t i) const;
  /// First m letters; the prefix of length m+1 extends this one.
  std::vector<std::int32_t> take(std::size_t m) const;
  /// Length of the longest common prefix with a finite word.
  std::size_t agreement(const std::vector<std::int32_t>& word) const;

  friend bool operator==(const Ray&, const Ray&) = default;
};

/// A point of the Martin boundary of one of the example chains.
struct BoundaryPoint {
  enum class Kind { plus_infinity, minus_infinity, infinity, ray };

  Kind kind = Kind::infinity;
  Ray ray;

  static BoundaryPoint plus_inf() { return {Kind::plus_infinity, {}}; }
  static BoundaryPoint minus_inf() { return {Kind::minus_infinity, {}}; }
  static BoundaryPoint inf() { return {Kind::infinity, {}}; }
  static BoundaryPoint of_ray(Ray r) { return {Kind::ray, std::move(r)}; }

  /// Parses "+inf", "-inf", "inf" or a ray such as "0.1(0)*".
  static BoundaryPoint parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;
};

/// The four chains with closed-form boundary theory.
///
/// Every closed form is stated for the chain's own base point; other base
/// points raise UnsupportedError.
class ExampleChain : public Chain {
 public:
  virtual State base_point() const = 0;

  /// Throws UnsupportedError when alpha is not a boundary point of this chain.
  virtual void require_boundary(const BoundaryPoint& alpha) const = 0;

  /// Killed Green function G_{x0}(x, y).
  virtual Rational green(const State& x0, const State& x, const State& y) const = 0;

  /// Martin kernel L_{x0}(x, alpha) at a boundary point.
  virtual PiRational martin_boundary(const State& x0, const State& x, const BoundaryPoint& alpha) const = 0;

  /// Floating-point L_{x0}(x, alpha) for the base point, cheap enough for
  /// simulation inner loops.
  virtual long double martin_boundary_approx(const State& x, const BoundaryPoint& alpha) const = 0;

  /// Distance from the base point in the sense used by ball().
  virtual int radius_of(const State& x) const = 0;

  void require_base(const State& x0) const;
};

class ZWalk final : public ExampleChain {
 public:
  std::string name() const override { return "z"; }
  bool contains(const State& x) const override { return x.size() == 1; }
  std::vector<Transition> successors(const State& x) const override;
  std::vector<ApproxTransition> approx_successors(const State& x) const override;
  bool has_predecessors() const override { return true; }
  std::vector<Transition> predecessors(const State& x) const override { return successors(x); }
  std::optional<Rational> stationary(const State&) const override { return Rational(1); }
  void step(State& x, Rng& rng) const override { x[0] += (rng() >> 63) != 0U ? 1 : -1; }
  State parse_state(std::string_view text) const override;
  std::string format_state(const State& x) const override;
  std::vector<State> ball(int radius) const override;
  BoundaryPolicy default_boundary() const override { return BoundaryPolicy::reflect; }

  State base_point() const override { return State{0}; }
  int radius_of(const State& x) const override { return x[0] < 0 ? -x[0] : x[0]; }
  void require_boundary(const BoundaryPoint& alpha) const override;
  Rational green(const State& x0, const State& x, const State& y) const override;
  PiRational martin_boundary(const State& x0, const State& x, const BoundaryPoint& alpha) const override;
  long double martin_boundary_approx(const State& x, const BoundaryPoint& alpha) const override;
};

class Z2Walk final : public ExampleChain {
 public:
  std::string name() const override { return "z2"; }
  bool contains(const State& x) const override { return x.size() == 2; }
  std::vector<Transition> successors(const State& x) const override;
  std::vector<ApproxTransition> approx_successors(const State& x) const override;
  bool has_predecessors() const override { return true; }
  std::vector<Transition> predecessors(const State& x) const override { return successors(x); }
  std::optional<Rational> stationary(const State&) const override { return Rational(1); }
  void step(State& x, Rng& rng) const override;
  State parse_state(std::string_view text) const override;
  std::string format_state(const State& x) const override;
  std::vector<State> ball(int radius) const override;

  State base_point() const override { return State{0, 0}; }
  int radius_of(const State& x) const override { return std::max(x[0] < 0 ? -x[0] : x[0], x[1] < 0 ? -x[1] : x[1]); }
  void require_boundary(const BoundaryPoint& alpha) const override;
  /// No closed form exists; always throws UnsupportedError.
  Rational green(const State& x0, const State& x, const State& y) const override;
  /// L_0(x, inf) = a(x) for x != 0 (the potential kernel), 1 at the origin.
  PiRational martin_boundary(const State& x0, const State& x, const BoundaryPoint& alpha) const override;
  long double martin_boundary_approx(const State& x, const BoundaryPoint& alpha) const override;
};

/// Walk on N_0 with p_{0,1} = 1 and up/down probabilities q / 1-q elsewhere.
class BangBangWalk final : public ExampleChain {
 public:
  /// q must lie in (0, 1/2).
  explicit BangBangWalk(Rational q = Rational(1, 3));

  const Rational& q() const { return q_; }
  /// alpha = (1-q)/q > 1.
  const Rational& ratio() const { return ratio_; }

  std::string name() const override;
  bool contains(const State& x) const override { return x.size() == 1 && x[0] >= 0; }
  std::vector<Transition> successors(const State& x) const override;
  std::vector<ApproxTransition> approx_successors(const State& x) const override;
  bool has_predecessors() const override { return true; }
  std::vector<Transition> predecessors(const State& x) const override;
  std::optional<Rational> stationary(const State& x) const override;
  void step(State& x, Rng& rng) const override;
  State parse_state(std::string_view text) const override;
  std::string format_state(const State& x) const override;
  std::vector<State> ball(int radius) const override;
  BoundaryPolicy default_boundary() const override { return BoundaryPolicy::reflect; }

  State base_point() const override { return State{0}; }
  int radius_of(const State& x) const override { return x[0]; }
  void require_boundary(const BoundaryPoint& alpha) const override;
  Rational green(const State& x0, const State& x, const State& y) const override;
  PiRational martin_boundary(const State& x0, const State& x, const BoundaryPoint& alpha) const override;
  long double martin_boundary_approx(const State& x, const BoundaryPoint& alpha) const override;

 private:
  Rational q_;
  Rational ratio_;
  double q_approx_;
};

/// Nearest-neighbour walk on the infinite k-ary tree: from the root each
/// son with 1/k, elsewhere the father with 1/2 and each son with 1/(2k).
class TreeWalk final : public ExampleChain {
 public:
  explicit TreeWalk(int k = 2);

  int arity() const { return k_; }

  std::string name() const override;
  bool contains(const State& x) const override;
  std::vector<Transition> successors(const State& x) const override;
  std::vector<ApproxTransition> approx_successors(const State& x) const override;
  bool has_predecessors() const override { return true; }
  std::vector<Transition> predecessors(const State& x) const override;
  /// beta(root) = k/(k-1), beta(depth d >= 1) = 2 k^{1-d} / (k-1).
  std::optional<Rational> stationary(const State& x) const override;
  void step(State& x, Rng& rng) const override;
  State parse_state(std::string_view text) const override;
  std::string format_state(const State& x) const override;
  std::vector<State> ball(int radius) const override;
  BoundaryPolicy default_boundary() const override { return BoundaryPolicy::reflect; }

  State base_point() const override { return State{}; }
  int radius_of(const State& x) const override { return static_cast<int>(x.size()); }
  void require_boundary(const BoundaryPoint& alpha) const override;
  Rational green(const State& x0, const State& x, const State& y) const override;
  PiRational martin_boundary(const State& x0, const State& x, const BoundaryPoint& alpha) const override;
  long double martin_boundary_approx(const State& x, const BoundaryPoint& alpha) const override;

 private:
  int k_;
};

/// Builds a chain from "z", "z2", "bangbang:q=<p>/<q>" or "tree:k=<k>".
std::shared_ptr<const ExampleChain> make_chain(std::string_view selector);

/// Length of the longest common prefix of two tree words.
std::size_t common_prefix(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b);

/// Closed-form G_{x0}(x, y). Throws UnsupportedError for chains without a
/// closed form or when x0 is not the chain's base point.
Rational exact_green(const Chain& chain, const State& x0, const State& x, const State& y);

/// Closed-form L_{x0}(x, alpha).
PiRational exact_martin_boundary(const Chain& chain, const State& x0, const State& x, const BoundaryPoint& alpha);

/// phi_{x0,alpha}(x) = L_{x0}(x, alpha) / beta(x0) for x != x0, 0 at x0.
PiRational exact_phi(const Chain& chain, const State& x0, const BoundaryPoint& alpha, const State& x);

/// Downcast helper; throws UnsupportedError for chains without closed forms.
const ExampleChain& as_example(const Chain& chain);

}  // namespace martinq
