#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "martinq/chain.hpp"

namespace martinq {

enum class GreenMethod { exact_solve, monte_carlo, closed_form };

std::string method_name(GreenMethod m);

struct GreenResult {
  double value = 0;
  GreenMethod method = GreenMethod::exact_solve;
  double std_error = 0;
  int window_radius = -1;         ///< exact solves only
  double enlargement_delta = 0;   ///< |value(radius + margin) - value(radius)|
  std::size_t runs = 0;           ///< Monte Carlo only
  std::size_t capped_runs = 0;    ///< runs stopped by the step cap (truncate policy)
};

/// Finite window for the linear solves. An explicit `window` overrides
/// `chain.ball(radius)`; the enlargement diagnostic only applies to balls.
struct Truncation {
  int radius = 50;
  std::optional<BoundaryPolicy> policy;  ///< defaults to chain.default_boundary()
  int enlargement_margin = 2;            ///< 0 skips the diagnostic
  std::vector<State> window;
};

/// What a Monte Carlo run does when it reaches the step cap.
enum class CapPolicy {
  error,     ///< raise RunawayRunError
  truncate,  ///< keep the visits counted so far and report the run as capped
};

struct McConfig {
  std::size_t trajectories = 100000;
  std::uint64_t step_cap = 10'000'000;
  CapPolicy cap_policy = CapPolicy::error;
};

struct GreenQuery {
  State x;
  State y;
};

/// Factorised system (I - p_hat) on a finite window, where p_hat drops every
/// transition into the killed state. Columns g_y solve (I - p_hat) g_y = e_y.
///
/// Dense LU below 2000 states, ILUT-preconditioned BiCGSTAB above.
class KilledSolver {
 public:
  KilledSolver(const Chain& chain, std::optional<State> killed, std::vector<State> window, BoundaryPolicy policy);
  ~KilledSolver();
  KilledSolver(KilledSolver&&) noexcept;
  KilledSolver& operator=(KilledSolver&&) noexcept;

  const std::vector<State>& window() const { return window_; }
  std::size_t size() const { return window_.size(); }
  bool contains(const State& x) const;
  std::size_t index(const State& x) const;

  /// g_y over the window, in window order.
  std::vector<double> column(const State& y) const;
  double value(const State& x, const State& y) const { return column(y)[index(x)]; }

 private:
  struct Impl;
  std::vector<State> window_;
  std::unique_ptr<Impl> impl_;
};

std::vector<GreenResult> green_solve(const Chain& chain, const State& x0, const std::vector<GreenQuery>& queries,
                                     const Truncation& trunc = {});

/// Same system in exact rational arithmetic (dense Gaussian elimination);
/// meant for windows of at most a few hundred states.
std::vector<Rational> green_solve_exact(const Chain& chain, const State& x0, const std::vector<GreenQuery>& queries,
                                        const std::vector<State>& window, BoundaryPolicy policy);

/// Mean of L^y_{T'_{x0} - 1} over independent runs from x.
GreenResult green_mc(const Chain& chain, const State& x0, const State& x, const State& y, const McConfig& config,
                     std::uint64_t seed);

/// One ensemble from x, counting visits to every y at once.
std::vector<GreenResult> green_mc_multi(const Chain& chain, const State& x0, const State& x, const std::vector<State>& ys,
                                        const McConfig& config, std::uint64_t seed);

struct MartinKernelOptions {
  GreenMethod method = GreenMethod::exact_solve;
  Truncation truncation;
  McConfig mc;
  std::uint64_t seed = 0;
  double zero_tolerance = 1e-12;
};

/// L_{x0}(x, y) = G_{x0}(x, y) / G_{x0}(x0, y). Monte Carlo inputs come from
/// independent ensembles and their relative errors are combined in quadrature.
GreenResult martin_kernel(const Chain& chain, const State& x0, const State& x, const State& y,
                          const MartinKernelOptions& options = {});

}  // namespace martinq
