#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "martinq/martin.hpp"

namespace martinq {

struct TransformParams {
  State x0;
  BoundaryPoint alpha;
  Rational r{1, 2};
};

/// Doob transform of a recurrent chain by psi = K r/(1-r) + phi, where phi is
/// harmonic off x0 with E_{x0}[phi(X_1)] = K:
///   q_{x,y} = psi(y)/psi(x) p_{x,y}     (x != x0)
///   q_{x0,y} = r psi(y)/psi(x0) p_{x0,y}.
/// For phi = phi_{x0,alpha}, K = 1/beta(x0) and psi is psi_{x0,alpha,r}.
///
/// Exact successors need psi rational; simulation uses long double ratios.
class TransformedChain final : public Chain {
 public:
  TransformedChain(std::shared_ptr<const Chain> base, HarmonicProfile phi, Rational r);

  static std::shared_ptr<const TransformedChain> from_params(const Chain& chain, const TransformParams& params);

  const Chain& base() const { return *base_; }
  const State& x0() const { return phi_.base(); }
  const HarmonicProfile& phi() const { return phi_; }
  const Rational& r() const { return r_; }
  /// K = E_{x0}[phi(X_1)].
  const PiRational& mass() const { return mass_; }

  PiRational psi(const State& x) const;
  long double psi_approx(const State& x) const;

  std::string name() const override;
  bool contains(const State& x) const override { return base_->contains(x); }
  std::vector<Transition> successors(const State& x) const override;
  std::vector<ApproxTransition> approx_successors(const State& x) const override;
  State parse_state(std::string_view text) const override { return base_->parse_state(text); }
  std::string format_state(const State& x) const override { return base_->format_state(x); }
  std::vector<State> ball(int radius) const override { return base_->ball(radius); }

 private:
  std::shared_ptr<const Chain> base_;
  HarmonicProfile phi_;
  Rational r_;
  PiRational mass_;
  PiRational offset_;  // K r / (1 - r)
  long double offset_approx_;
};

/// psi_{x0,alpha,r}(x) = (1/beta(x0)) [r/(1-r) + L_{x0}(x, alpha) 1_{x != x0}].
PiRational psi_weight(const Chain& chain, const TransformParams& params, const State& x);

std::shared_ptr<const TransformedChain> transformed_chain(const Chain& chain, const TransformParams& params);

struct RowSumReport {
  std::size_t checked = 0;
  std::vector<State> violations;
  bool ok() const { return violations.empty(); }
};

/// Exact row sums in the linear form sum_y p_{x,y} psi(y) = psi(x) (and
/// r sum_y p_{x0,y} psi(y) = psi(x0)), valid even when psi is irrational.
RowSumReport verify_row_sums(const TransformedChain& q, const std::vector<State>& window);

struct RnReport {
  std::size_t paths = 0;
  std::size_t mismatches = 0;
  Rational max_discrepancy = 0;
  Rational transformed_total = 0;  ///< total transformed probability; 1
  bool ok() const { return mismatches == 0 && transformed_total == 1; }
};

/// Compares q-path probabilities with E_x[(psi(X_n)/psi(x)) r^{L^{x0}_{n-1}} F_n]
/// over all path indicators F_n, exactly.
RnReport rn_identity_check(const TransformedChain& q, const State& x, std::size_t n,
                           std::size_t cap = kDefaultPathCap);

/// K_{x0,alpha,r}(x, y) = (psi(x0)/psi(x)) (1 + ((1-r)/r) L_{x0}(x, y) 1_{x != x0})
/// with L from closed-form Green values.
PiRational k_kernel(const Chain& chain, const TransformParams& params, const State& x, const State& y);
/// Same at a boundary point, using L_{x0}(x, alpha).
PiRational k_kernel_boundary(const Chain& chain, const TransformParams& params, const State& x);

using ExactFunction = std::function<PiRational(const State&)>;

struct MappedFunction {
  ExactFunction f;
  bool precondition_ok = true;
  std::vector<std::string> violations;
};

/// R(phi)(x) = (phi(x) + (r/(1-r)) E_{x0}[phi(X_1)]) / psi(x). Checks that phi
/// vanishes at x0 and is harmonic off x0 on the window.
MappedFunction r_map(const TransformedChain& q, const ExactFunction& phi, const std::vector<State>& window);

/// R^{-1}(h)(x) = psi(x) h(x) - r E_{x0}[psi(X_1) h(X_1)]. Checks that h is
/// harmonic for the transformed chain on the window.
MappedFunction r_map_inverse(const TransformedChain& q, const ExactFunction& h, const std::vector<State>& window);

struct ConvergenceCheckpoint {
  std::size_t steps = 0;
  double fraction_beyond = 0;              ///< witness above the threshold
  std::vector<double> quantiles;           ///< 10/25/50/75/90% of the witness
  double median = 0;
};

struct ConvergenceReport {
  std::string witness;                     ///< "signed-position", "agreement-length" or "norm"
  double threshold = 0;
  std::size_t trajectories = 0;
  std::vector<ConvergenceCheckpoint> checkpoints;
  double mean_returns = 0;                 ///< visits to x0 after time 0
  double early_last_return_fraction = 0;   ///< runs whose last visit to x0 is before 1/10 of the horizon
};

struct ConvergenceConfig {
  std::size_t trajectories = 10000;
  std::vector<std::size_t> checkpoints{1000};
  double threshold = 50;
};

/// Ensemble statistics of a chain-specific convergence witness under the
/// transformed chain: signed position toward alpha on Z and the bang-bang
/// walk, agreement length with the ray on the tree, norm on Z^2.
ConvergenceReport convergence_stats(const Chain& chain, const TransformParams& params, const ConvergenceConfig& config,
                                    std::uint64_t seed);

}  // namespace martinq
