#include "martinq/potential.hpp"

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>

#include "martinq/errors.hpp"

namespace martinq {

namespace {

constexpr mpfr_prec_t kConstBits = 256;

// Holds (2 gamma + log 8)/pi and 2/pi at kConstBits.
struct AsymptoticConstants {
  mpfr_t kappa;
  mpfr_t two_over_pi;
  mpfr_t pi;

  AsymptoticConstants() {
    mpfr_inits2(kConstBits, kappa, two_over_pi, pi, static_cast<mpfr_ptr>(nullptr));
    mpfr_t tmp;
    mpfr_init2(tmp, kConstBits);
    mpfr_const_pi(pi, MPFR_RNDN);
    mpfr_const_euler(kappa, MPFR_RNDN);
    mpfr_mul_ui(kappa, kappa, 2, MPFR_RNDN);
    mpfr_set_ui(tmp, 8, MPFR_RNDN);
    mpfr_log(tmp, tmp, MPFR_RNDN);
    mpfr_add(kappa, kappa, tmp, MPFR_RNDN);
    mpfr_div(kappa, kappa, pi, MPFR_RNDN);
    mpfr_ui_div(two_over_pi, 2, pi, MPFR_RNDN);
    mpfr_clear(tmp);
  }
  ~AsymptoticConstants() { mpfr_clears(kappa, two_over_pi, pi, static_cast<mpfr_ptr>(nullptr)); }
  AsymptoticConstants(const AsymptoticConstants&) = delete;
  AsymptoticConstants& operator=(const AsymptoticConstants&) = delete;
};

const AsymptoticConstants& constants() {
  static const AsymptoticConstants c;
  return c;
}

Rational lcm_of_odds(int n) {
  mpz_class l = 1;
  for (int m = 1; m <= 2 * n - 1; m += 2) {
    mpz_class v = m;
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_mpz_t());
  }
  return Rational(l);
}

}  // namespace

PotentialTable::PotentialTable(int radius) : radius_(radius) {
  if (radius < 1) throw OutOfRangeError("potential table radius must be at least 1");
  octant_.resize(static_cast<std::size_t>(radius) + 1);
  octant_[0] = {PiRational(0)};
  octant_[1] = {PiRational(1), PiRational::inv_pi(4)};
  Rational odd_sum = 1;  // sum_{j<=n} 1/(2j-1)
  for (int n = 1; n < radius; ++n) {
    auto a = [&](int i, int j) -> const PiRational& {
      j = std::abs(j);
      return octant_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    };
    auto& next = octant_[static_cast<std::size_t>(n) + 1];
    next.resize(static_cast<std::size_t>(n) + 2);
    odd_sum += Rational(1, 2 * n + 1);
    next[static_cast<std::size_t>(n) + 1] = PiRational::inv_pi(4 * odd_sum);
    next[static_cast<std::size_t>(n)] = a(n, n) * Rational(2) - a(n, n - 1);
    for (int j = n - 1; j >= 0; --j) {
      next[static_cast<std::size_t>(j)] = a(n, j) * Rational(4) - a(n - 1, j) - a(n, j + 1) - a(n, j - 1);
    }
  }
}

bool PotentialTable::in_range(int i, int j) const { return std::max(std::abs(i), std::abs(j)) <= radius_; }

const PiRational& PotentialTable::at(int i, int j) const {
  if (!in_range(i, j)) {
    throw OutOfRangeError("point (" + std::to_string(i) + "," + std::to_string(j) + ") lies outside the radius-" +
                          std::to_string(radius_) + " potential table");
  }
  i = std::abs(i);
  j = std::abs(j);
  if (j > i) std::swap(i, j);
  return octant_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

PotentialTable potential_table(int radius) { return PotentialTable(radius); }

const PotentialTable& shared_potential_table(int min_radius) {
  static std::mutex mu;
  static std::deque<std::unique_ptr<PotentialTable>> tables;
  std::lock_guard lock(mu);
  for (const auto& t : tables) {
    if (t->radius() >= min_radius) return *t;
  }
  tables.push_back(std::make_unique<PotentialTable>(std::max(min_radius, 64)));
  return *tables.back();
}

long double potential_asymptotic(long double norm) {
  static const long double kappa = mpfr_get_ld(constants().kappa, MPFR_RNDN);
  static const long double two_over_pi = mpfr_get_ld(constants().two_over_pi, MPFR_RNDN);
  return two_over_pi * std::log(norm) + kappa;
}

double asymptotic_residual(const PotentialTable& table, int i, int j) {
  if (i == 0 && j == 0) throw OutOfRangeError("the asymptotic expansion is undefined at the origin");
  const auto& a = table.at(i, j);
  const auto& c = constants();
  mpfr_t value, tmp;
  mpfr_init2(value, kConstBits);
  mpfr_init2(tmp, kConstBits);
  // a(x)
  mpfr_set_q(tmp, a.inv_pi_part().get_mpq_t(), MPFR_RNDN);
  mpfr_div(tmp, tmp, c.pi, MPFR_RNDN);
  mpfr_set_q(value, a.rational_part().get_mpq_t(), MPFR_RNDN);
  mpfr_add(value, value, tmp, MPFR_RNDN);
  // (2/pi) log ||x|| = (1/pi) log(i^2 + j^2)
  mpfr_set_ui(tmp, static_cast<unsigned long>(i) * i + static_cast<unsigned long>(j) * j, MPFR_RNDN);
  mpfr_log(tmp, tmp, MPFR_RNDN);
  mpfr_div(tmp, tmp, c.pi, MPFR_RNDN);
  mpfr_sub(value, value, tmp, MPFR_RNDN);
  mpfr_sub(value, value, c.kappa, MPFR_RNDN);
  const double out = mpfr_get_d(value, MPFR_RNDN);
  mpfr_clear(value);
  mpfr_clear(tmp);
  return out;
}

double asymptotic_constant(const PotentialTable& table, double from) {
  double c = 0;
  for (int i = 1; i <= table.radius(); ++i) {
    for (int j = 0; j <= i; ++j) {
      const double n2 = static_cast<double>(i) * i + static_cast<double>(j) * j;
      if (n2 < from * from) continue;
      c = std::max(c, std::abs(asymptotic_residual(table, i, j)) * n2);
    }
  }
  return c;
}

HarmonicityReport verify_harmonicity(const PotentialTable& table) {
  HarmonicityReport report;
  const int n = table.radius();
  report.radius = n;
  for (int i = -(n - 1); i <= n - 1; ++i) {
    for (int j = -(n - 1); j <= n - 1; ++j) {
      if (i == 0 && j == 0) continue;
      PiRational defect = table.at(i + 1, j) + table.at(i - 1, j) + table.at(i, j + 1) + table.at(i, j - 1) -
                          table.at(i, j) * Rational(4);
      ++report.interior_checked;
      if (!defect.is_zero()) report.violations.push_back({i, j, std::move(defect)});
    }
  }
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      const auto& v = table.at(i, j);
      ++report.symmetry_checked;
      if (!(v == table.at(j, i) && v == table.at(-i, j) && v == table.at(i, -j))) ++report.symmetry_violations;
    }
  }
  report.origin_defect =
      (table.at(1, 0) + table.at(-1, 0) + table.at(0, 1) + table.at(0, -1)) / Rational(4) - table.at(0, 0);
  const Rational lcm = lcm_of_odds(n);
  for (const auto& row : table.octant()) {
    for (const auto& v : row) {
      if (v.rational_part().get_den() != 1) report.denominators_ok = false;
      const Rational scaled = v.inv_pi_part() * lcm;
      if (scaled.get_den() != 1) report.denominators_ok = false;
    }
  }
  return report;
}

std::vector<PotentialEstimate> potential_mc(const State& x, const std::vector<State>& ys,
                                            const PotentialMcConfig& config, std::uint64_t seed) {
  if (x.size() != 2 || (x[0] == 0 && x[1] == 0)) throw UnsupportedError("potential_mc needs a start x != (0,0) in Z^2");
  if (config.trajectories == 0) throw UnsupportedError("potential_mc needs at least one trajectory");
  const long long r2 = static_cast<long long>(config.exit_radius) * config.exit_radius;
  for (const auto& y : ys) {
    if (y.size() != 2) throw UnknownStateError("potential_mc targets must be Z^2 states");
    if (config.exit_radius > 0 && static_cast<long long>(y[0]) * y[0] + static_cast<long long>(y[1]) * y[1] >= r2) {
      throw UnsupportedError("target outside the exit disc; raise exit_radius");
    }
  }
  const std::size_t m = ys.size();
  const std::size_t n = config.trajectories;
  std::vector<double> samples(n * m, 0.0);
  std::vector<unsigned char> exited(n, 0);

  auto a_approx = [](long long i, long long j) -> long double {
    if (i == 0 && j == 0) return 0;
    return potential_asymptotic(std::sqrt(static_cast<long double>(i * i + j * j)));
  };

  std::atomic<bool> runaway{false};
  auto run_one = [&](std::size_t t) {
    Rng rng = Rng::stream(seed, t);
    long long a = x[0];
    long long b = x[1];
    double* out = &samples[t * m];
    std::uint64_t steps = 0;
    while (true) {
      if (a == 0 && b == 0) return;
      for (std::size_t k = 0; k < m; ++k) {
        if (a == ys[k][0] && b == ys[k][1]) out[k] += 1;
      }
      if (r2 > 0 && a * a + b * b >= r2) {
        for (std::size_t k = 0; k < m; ++k) {
          const long long yi = ys[k][0];
          const long long yj = ys[k][1];
          out[k] += static_cast<double>(a_approx(a, b) + a_approx(yi, yj) - a_approx(a - yi, b - yj));
        }
        exited[t] = 1;
        return;
      }
      if (++steps > config.step_cap) {
        runaway = true;
        return;
      }
      switch (rng() >> 62) {
        case 0:
          --a;
          break;
        case 1:
          --b;
          break;
        case 2:
          ++b;
          break;
        default:
          ++a;
          break;
      }
    }
  };

  constexpr std::size_t kChunk = 256;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (!runaway) {
      const std::size_t begin = next.fetch_add(kChunk);
      if (begin >= n) return;
      for (std::size_t t = begin; t < std::min(n, begin + kChunk); ++t) run_one(t);
    }
  };
  const unsigned threads = std::max(1U, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (runaway) {
    throw RunawayRunError("a Z^2 run exceeded the step cap of " + std::to_string(config.step_cap) +
                          " steps before hitting the origin");
  }

  std::vector<PotentialEstimate> out;
  for (std::size_t k = 0; k < m; ++k) {
    double sum = 0;
    double sq = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = samples[t * m + k];
      sum += v;
      sq += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = n > 1 ? std::max(0.0, (sq - sum * mean) / static_cast<double>(n - 1)) : 0.0;
    PotentialEstimate e;
    e.y = ys[k];
    e.value = mean;
    e.std_error = std::sqrt(var / static_cast<double>(n));
    e.runs = n;
    for (auto f : exited) e.exited += f;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace martinq
