#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "martinq/chains.hpp"

namespace martinq {

enum class ProfileProvenance { closed_form, boundary_point, mixture, user };

std::string provenance_name(ProfileProvenance p);

/// A nonnegative function phi with phi(x0) = 0, harmonic off x0: the phi slot
/// of the measures Q^{x0, phi}.
///
/// Carries an exact evaluator (values in Q + Q/pi) when one exists and a
/// long double evaluator that is always available and cheap.
class HarmonicProfile {
 public:
  using ExactFn = std::function<PiRational(const State&)>;
  using ApproxFn = std::function<long double(const State&)>;

  HarmonicProfile(State base, ExactFn exact, ApproxFn approx, ProfileProvenance provenance, std::string label);

  /// Profile given by an exact user function; approx derives from it.
  static HarmonicProfile user(State base, ExactFn exact, std::string label = "user");

  const State& base() const { return base_; }
  ProfileProvenance provenance() const { return provenance_; }
  const std::string& label() const { return label_; }

  bool has_exact() const { return static_cast<bool>(exact_); }
  /// Throws InexactError when no exact evaluator exists.
  PiRational operator()(const State& x) const;
  long double approx(const State& x) const { return approx_(x); }

 private:
  State base_;
  ExactFn exact_;
  ApproxFn approx_;
  ProfileProvenance provenance_;
  std::string label_;
};

/// Finite atomic measure on the Martin boundary.
struct BoundaryMixture {
  std::vector<std::pair<BoundaryPoint, Rational>> atoms;

  Rational total_mass() const;

  /// Parses "w1*a1+w2*a2" such as "1*+inf+1/2*-inf"; a missing weight means 1.
  static BoundaryMixture parse(std::string_view text);
  std::string to_string() const;
};

/// phi_{x0,alpha}(x) = L_{x0}(x, alpha) / beta(x0) for x != x0.
///
/// At the chain's own base point this is the closed form. For another base
/// point x1 it uses the change of base
///   phi_{x1}(x) = phi_{b}(x) - phi_{b}(x1) + K * E_x[L^{b}_{T_{x1} - 1}],
/// with b the chain's base point and K = E_b[phi_b(X_1)]; the expectation is
/// a killed Green value solved on a window.
HarmonicProfile profile_from_boundary(const Chain& chain, const State& x0, const BoundaryPoint& alpha);

/// phi(x) = sum_i w_i L_{x0}(x, alpha_i) for x != x0 and 0 at x0.
HarmonicProfile mixture_profile(const Chain& chain, const State& x0, const BoundaryMixture& mu);

/// Weights (phi(1)/2, phi(-1)/2) on (+inf, -inf), verified on {-radius..radius}.
/// Throws NotInConeError when phi is not of the form 2a x_+ + 2b x_- with
/// a, b >= 0.
BoundaryMixture decompose_profile_z(const HarmonicProfile& phi, int radius = 50);

struct HarmonicResidual {
  State x;
  PiRational exact;  ///< E_x[phi(X_1)] - phi(x), when phi is exact
  double numeric = 0;
};

struct HarmonicReport {
  std::vector<HarmonicResidual> residuals;  ///< every x != x0 in the window
  PiRational base_balance;                  ///< E_{x0}[phi(X_1)]
  double base_balance_numeric = 0;
  bool exact = true;
  double max_abs_residual = 0;
  std::size_t nonzero = 0;

  bool ok(double tolerance = 0) const { return exact ? nonzero == 0 : max_abs_residual <= tolerance; }
};

HarmonicReport check_harmonic_except(const Chain& chain, const HarmonicProfile& phi, const State& x0,
                                     const std::vector<State>& window);

}  // namespace martinq
