#pragma once

#include <cstdint>
#include <vector>

#include "martinq/pi_rational.hpp"
#include "martinq/rng.hpp"
#include "martinq/state.hpp"

namespace martinq {

/// Exact potential kernel of the simple walk on Z^2 on the octant
/// 0 <= j <= i <= N; other points follow by dihedral symmetry.
///
/// Construction order: for n = 1..N-1 the entry a(n+1, n) comes from
/// harmonicity at (n, n), then a(n+1, j) for j = n-1 down to 0 from
/// harmonicity at (n, j). Diagonal entries use the closed form.
class PotentialTable {
 public:
  explicit PotentialTable(int radius);

  int radius() const { return radius_; }
  bool in_range(int i, int j) const;

  /// a(i, j) for any signs; throws OutOfRangeError outside the table.
  const PiRational& at(int i, int j) const;
  const PiRational& at(const State& x) const { return at(x[0], x[1]); }

  /// Octant rows: octant()[i][j] for 0 <= j <= i.
  const std::vector<std::vector<PiRational>>& octant() const { return octant_; }

 private:
  int radius_;
  std::vector<std::vector<PiRational>> octant_;
};

PotentialTable potential_table(int radius);

/// Process-wide cache holding a table of radius at least `min_radius`.
/// Returned references stay valid for the lifetime of the program.
const PotentialTable& shared_potential_table(int min_radius);

/// (2/pi) log r + (2 gamma + log 8)/pi, the leading terms of a(x) at ||x|| = r.
long double potential_asymptotic(long double norm);

/// a(x) - (2/pi) log||x|| - (2 gamma + log 8)/pi with constants at 60 digits.
/// Throws OutOfRangeError at the origin or outside the table.
double asymptotic_residual(const PotentialTable& table, int i, int j);

/// max |residual(x)| ||x||^2 over octant points with ||x|| >= from: an
/// empirical constant for the O(1/||x||^2) remainder.
double asymptotic_constant(const PotentialTable& table, double from = 10);

struct HarmonicityViolation {
  int i;
  int j;
  PiRational defect;  ///< sum of neighbours - 4 a(i, j)
};

struct HarmonicityReport {
  int radius = 0;
  std::size_t interior_checked = 0;
  std::vector<HarmonicityViolation> violations;
  std::size_t symmetry_checked = 0;
  std::size_t symmetry_violations = 0;
  /// (1/4) sum_{|e|=1} a(e) - a(0,0); equals 1.
  PiRational origin_defect;
  /// Every rational part is an integer and every 1/pi coefficient has a
  /// denominator dividing lcm(1, 3, ..., 2N-1).
  bool denominators_ok = true;

  bool ok() const { return violations.empty() && symmetry_violations == 0 && origin_defect == PiRational(1) && denominators_ok; }
};

/// Exact harmonicity at every non-origin point with all neighbours in range,
/// symmetry closure of the full-plane view, and the origin defect.
HarmonicityReport verify_harmonicity(const PotentialTable& table);

struct PotentialEstimate {
  State y;
  double value = 0;
  double std_error = 0;
  std::size_t runs = 0;
  std::size_t exited = 0;  ///< runs finished by the exit-disc continuation
};

struct PotentialMcConfig {
  std::size_t trajectories = 100000;
  std::uint64_t step_cap = 10'000'000;
  /// Runs leaving the disc of this radius (around the origin) stop and add the
  /// expected remaining visits a(z) + a(y) - a(z-y) from the asymptotic
  /// expansion. 0 disables the continuation; capped runs then raise
  /// RunawayRunError.
  int exit_radius = 0;
};

/// Monte Carlo E_x[L^y_{T_(0,0)}] for each y, one shared ensemble of runs.
std::vector<PotentialEstimate> potential_mc(const State& x, const std::vector<State>& ys,
                                            const PotentialMcConfig& config, std::uint64_t seed);

}  // namespace martinq
