#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "martinq/martin.hpp"

namespace martinq {

/// Nonnegative functional of X_0..X_n.
class HorizonFunctional {
 public:
  enum class Kind { constant, path, at, avoid, custom };
  using Eval = std::function<Rational(const std::vector<State>&)>;

  /// F = 1 at horizon n.
  static HorizonFunctional one(std::size_t horizon);
  /// 1_{X_0 = p_0, ..., X_m = p_m}; horizon m.
  static HorizonFunctional path_indicator(std::vector<State> path);
  /// 1_{X_m = s}; horizon max(m, horizon).
  static HorizonFunctional state_at(std::size_t m, State s, std::size_t horizon = 0);
  /// 1_{X_k != y for k in [0, n]}.
  static HorizonFunctional avoid(State y, std::size_t horizon);
  static HorizonFunctional custom(std::size_t horizon, Eval eval, std::string description, bool indicator = false);

  Kind kind() const { return kind_; }
  std::size_t horizon() const { return horizon_; }
  /// Last time the event looks at; the avoid window grows with the horizon.
  std::size_t event_time() const;
  bool is_indicator() const { return indicator_; }
  const std::string& description() const { return description_; }
  const std::vector<State>& path() const { return path_; }
  const State& state() const { return state_; }
  std::size_t time() const { return time_; }

  /// Same event read at horizon n >= event_time(); avoid windows become [0, n].
  HorizonFunctional with_horizon(std::size_t n) const;

  /// path.size() must be horizon() + 1.
  Rational operator()(const std::vector<State>& path) const;

 private:
  Kind kind_ = Kind::constant;
  std::size_t horizon_ = 0;
  std::vector<State> path_;
  State state_;
  std::size_t time_ = 0;
  Eval eval_;
  std::string description_;
  bool indicator_ = true;
};

/// "path:<p0.p1...>" (states separated by '/' on the tree, whose words use
/// dots), "at:<m>=<state>" or "avoid:<state>". Throws ParseError.
HorizonFunctional parse_event(const Chain& chain, std::string_view text);

enum class MeasureMode { exact, monotone_sequence, monte_carlo, bracket };
std::string mode_name(MeasureMode mode);

struct SequencePoint {
  std::size_t horizon = 0;
  double value = 0;
  std::optional<PiRational> exact;
  double std_error = 0;  ///< zero for exact and distribution-propagation values
  std::string method;    ///< "enumeration", "propagation", "monte-carlo"
};

struct BracketPoint {
  std::size_t horizon = 0;
  double lower = 0;
  double upper = 0;
  double lower_std_error = 0;
  double upper_std_error = 0;
  std::string method;  ///< "propagation" or "importance-sampling"
};

struct MeasureValue {
  MeasureMode mode = MeasureMode::exact;
  double value = 0;
  bool infinite = false;
  std::optional<PiRational> exact;
  double std_error = 0;
  /// "exact", "converged", "diverges", "undecided", "bracket-closed", "inconclusive"
  std::string verdict = "exact";
  std::vector<SequencePoint> sequence;
  bool monotone = true;

  // avoidance brackets
  std::vector<BracketPoint> bracket;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> certified_upper;
  bool upper_certified = true;
  bool separated = false;
};

/// Q^{x0,phi}_x(F_n 1_{X_k != x0 for all k >= n}) = E_x[F_n phi(X_n)] by path
/// enumeration. Exact when phi has an exact evaluator.
MeasureValue restricted_measure(const Chain& chain, const State& x0, const HarmonicProfile& phi, const State& x,
                                const HorizonFunctional& f, std::size_t cap = kDefaultPathCap);

struct SequenceConfig {
  std::size_t exact_support = 20000;    ///< rational propagation up to this many live states
  std::size_t max_support = 2'000'000;  ///< floating propagation up to this many
  std::size_t trajectories = 100000;    ///< Monte Carlo fallback
  std::uint64_t seed = 0;
  // Verdict thresholds (engineering constants).
  double divergence_ratio = 0.9;
  double convergence_tolerance = 1e-9;
};

/// value(n) = E_x[1_A phi(X_n)] for each horizon n, i.e. the increasing
/// approximations Q(A ∩ {X_k != x0 for k >= n}) of Q(A).
MeasureValue cylinder_measure(const Chain& chain, const State& x0, const HarmonicProfile& phi, const State& x,
                              const HorizonFunctional& a, const std::vector<std::size_t>& horizons,
                              const SequenceConfig& config = {});

/// Verdict on a nondecreasing sequence: "diverges" when the last three
/// increments are positive with successive ratios above `ratio`, "converged"
/// when the last increment is below tol * value, else "undecided".
std::string sequence_verdict(const std::vector<double>& values, double ratio = 0.9, double tol = 1e-9);

struct ConcatenationReport {
  std::size_t indicators = 0;   ///< length-p path indicators compared
  std::size_t nonzero = 0;      ///< indicators with a nonzero left side
  std::size_t mismatches = 0;
  double max_discrepancy = 0;
  bool ok() const { return mismatches == 0; }
};

/// Compares E_x[F_p 1_{X_n = y} phi(X_p)] with the prefix/suffix split through
/// y at time n, for every path indicator F_p. Exact arithmetic.
ConcatenationReport verify_concatenation(const Chain& chain, const State& x0, const HarmonicProfile& phi,
                                         const State& x, const State& y, std::size_t n, std::size_t p,
                                         std::size_t cap = kDefaultPathCap);

struct AvoidanceConfig {
  std::vector<std::size_t> horizons{128, 512, 2048};
  double tolerance = 0.05;              ///< relative bracket width that closes the bracket
  std::size_t max_support = 200000;     ///< above this, importance sampling
  std::size_t trajectories = 20000;
  std::uint64_t seed = 0;
  int green_margin = 60;                ///< window margin for G^{(y)}(., x0) when needed
};

/// Q^{x0,phi}_x(X_k != y for all k >= 0) bracketed by
///   lower_n = E_x[1_{T_y > n} (phi(X_n) - phi(y))_+]        (nondecreasing)
///   upper_n = E_x[1_{T_y > n} (phi(X_n) + K G^{(y)}(X_n, x0))]  (nonincreasing)
/// with K = E_{x0}[phi(X_1)]; upper_0 is the certified bound. When y separates
/// x from x0 the Green term vanishes.
MeasureValue avoidance_function(const Chain& chain, const State& x0, const HarmonicProfile& phi, const State& x,
                                const State& y, const AvoidanceConfig& config = {});

/// True when every path from x to x0 passes through y (example chains).
bool separates(const Chain& chain, const State& x0, const State& y, const State& x);

}  // namespace martinq
