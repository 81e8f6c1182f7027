#include "martinq/green.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>
#include <unordered_map>

#include "martinq/chains.hpp"
#include "martinq/errors.hpp"

namespace martinq {

namespace {

constexpr std::size_t kDenseLimit = 2000;

}  // namespace

std::string method_name(GreenMethod m) {
  switch (m) {
    case GreenMethod::exact_solve:
      return "exact-solve";
    case GreenMethod::monte_carlo:
      return "monte-carlo";
    case GreenMethod::closed_form:
      return "closed-form";
  }
  return "?";
}

// ---- KilledSolver -----------------------------------------------------------

struct KilledSolver::Impl {
  std::unordered_map<State, std::size_t, StateHash> index;
  bool dense = true;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::SparseMatrix<double> sparse;
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> iterative;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> fallback;
};

KilledSolver::KilledSolver(const Chain& chain, std::optional<State> killed, std::vector<State> window,
                           BoundaryPolicy policy)
    : window_(std::move(window)), impl_(std::make_unique<Impl>()) {
  const std::size_t n = window_.size();
  if (n == 0) throw Error("empty solver window");
  for (std::size_t i = 0; i < n; ++i) {
    chain.require(window_[i]);
    impl_->index.emplace(window_[i], i);
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(n * 5);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 1.0;
    for (const auto& t : chain.approx_successors(window_[i])) {
      if (killed && t.to == *killed) continue;
      auto it = impl_->index.find(t.to);
      if (it == impl_->index.end()) {
        if (policy == BoundaryPolicy::reflect) diag -= t.probability;
        continue;
      }
      if (it->second == i) {
        diag -= t.probability;
      } else {
        entries.emplace_back(static_cast<int>(i), static_cast<int>(it->second), -t.probability);
      }
    }
    entries.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
  }
  impl_->sparse.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  impl_->sparse.setFromTriplets(entries.begin(), entries.end());
  impl_->sparse.makeCompressed();
  impl_->dense = n < kDenseLimit;
  if (impl_->dense) {
    impl_->lu.compute(Eigen::MatrixXd(impl_->sparse));
    if (!(impl_->lu.rcond() > 1e-15)) {
      throw SingularSystemError("killed Green system is singular on a window of " + std::to_string(n) + " states");
    }
  } else {
    impl_->iterative.setTolerance(1e-15);
    impl_->iterative.setMaxIterations(20000);
    impl_->iterative.compute(impl_->sparse);
    if (impl_->iterative.info() != Eigen::Success) {
      throw SingularSystemError("preconditioner failed on a window of " + std::to_string(n) + " states");
    }
  }
}

KilledSolver::~KilledSolver() = default;
KilledSolver::KilledSolver(KilledSolver&&) noexcept = default;
KilledSolver& KilledSolver::operator=(KilledSolver&&) noexcept = default;

bool KilledSolver::contains(const State& x) const { return impl_->index.count(x) != 0; }

std::size_t KilledSolver::index(const State& x) const {
  auto it = impl_->index.find(x);
  if (it == impl_->index.end()) throw OutOfRangeError("state outside the solver window");
  return it->second;
}

std::vector<double> KilledSolver::column(const State& y) const {
  const auto n = static_cast<Eigen::Index>(window_.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(static_cast<Eigen::Index>(index(y))) = 1.0;
  Eigen::VectorXd sol;
  if (impl_->dense) {
    sol = impl_->lu.solve(rhs);
  } else {
    sol = impl_->iterative.solve(rhs);
    const double residual = (impl_->sparse * sol - rhs).lpNorm<Eigen::Infinity>();
    if (impl_->iterative.info() != Eigen::Success || !(residual < 1e-13)) {
      // Poorly conditioned window: fall back to a sparse direct factorisation.
      if (!impl_->fallback) {
        impl_->fallback = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        impl_->fallback->compute(impl_->sparse);
        if (impl_->fallback->info() != Eigen::Success) throw SingularSystemError("killed Green system is singular");
      }
      sol = impl_->fallback->solve(rhs);
    }
  }
  if (!sol.allFinite()) throw SingularSystemError("killed Green solve produced non-finite values");
  return {sol.data(), sol.data() + n};
}

// ---- green_solve ------------------------------------------------------------

namespace {

std::vector<double> solve_values(const Chain& chain, const State& x0, const std::vector<GreenQuery>& queries,
                                 const std::vector<State>& window, BoundaryPolicy policy) {
  KilledSolver solver(chain, x0, window, policy);
  if (!solver.contains(x0)) throw OutOfRangeError("base point " + chain.format_state(x0) + " outside the window");
  std::map<State, std::vector<double>> columns;
  std::vector<double> out;
  for (const auto& q : queries) {
    if (!solver.contains(q.x) || !solver.contains(q.y)) {
      throw OutOfRangeError("query (" + chain.format_state(q.x) + ", " + chain.format_state(q.y) +
                            ") outside the solver window");
    }
    auto it = columns.find(q.y);
    if (it == columns.end()) it = columns.emplace(q.y, solver.column(q.y)).first;
    out.push_back(std::max(0.0, it->second[solver.index(q.x)]));
  }
  return out;
}

}  // namespace

std::vector<GreenResult> green_solve(const Chain& chain, const State& x0, const std::vector<GreenQuery>& queries,
                                     const Truncation& trunc) {
  chain.require(x0);
  const BoundaryPolicy policy = trunc.policy.value_or(chain.default_boundary());
  const bool explicit_window = !trunc.window.empty();
  const auto window = explicit_window ? trunc.window : chain.ball(trunc.radius);
  const auto values = solve_values(chain, x0, queries, window, policy);
  std::vector<double> enlarged;
  if (!explicit_window && trunc.enlargement_margin > 0) {
    enlarged = solve_values(chain, x0, queries, chain.ball(trunc.radius + trunc.enlargement_margin), policy);
  }
  std::vector<GreenResult> out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    GreenResult r;
    r.value = values[i];
    r.method = GreenMethod::exact_solve;
    r.window_radius = explicit_window ? -1 : trunc.radius;
    if (!enlarged.empty()) r.enlargement_delta = std::abs(enlarged[i] - values[i]);
    out.push_back(r);
  }
  return out;
}

std::vector<Rational> green_solve_exact(const Chain& chain, const State& x0, const std::vector<GreenQuery>& queries,
                                        const std::vector<State>& window, BoundaryPolicy policy) {
  const std::size_t n = window.size();
  std::unordered_map<State, std::size_t, StateHash> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(window[i], i);
  auto lookup = [&](const State& s) {
    auto it = index.find(s);
    if (it == index.end()) throw OutOfRangeError("state " + chain.format_state(s) + " outside the solver window");
    return it->second;
  };
  lookup(x0);

  std::vector<State> targets;
  for (const auto& q : queries) {
    lookup(q.x);
    lookup(q.y);
    if (std::find(targets.begin(), targets.end(), q.y) == targets.end()) targets.push_back(q.y);
  }
  const std::size_t m = targets.size();
  // Augmented matrix [I - p_hat | e_y1 ... e_ym].
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + m, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] += 1;
    for (const auto& t : step_distribution(chain, window[i])) {
      if (t.to == x0) continue;
      auto it = index.find(t.to);
      if (it == index.end()) {
        if (policy == BoundaryPolicy::reflect) a[i][i] -= t.probability;
        continue;
      }
      a[i][it->second] -= t.probability;
    }
  }
  for (std::size_t k = 0; k < m; ++k) a[lookup(targets[k])][n + k] = 1;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) throw SingularSystemError("exact killed Green system is singular");
    std::swap(a[pivot], a[col]);
    const Rational inv = 1 / a[col][col];
    for (std::size_t j = col; j < n + m; ++j) a[col][j] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t j = col; j < n + m; ++j) {
        if (a[col][j] != 0) a[r][j] -= f * a[col][j];
      }
    }
  }
  std::vector<Rational> out;
  for (const auto& q : queries) {
    const auto k = static_cast<std::size_t>(std::find(targets.begin(), targets.end(), q.y) - targets.begin());
    out.push_back(a[lookup(q.x)][n + k]);
  }
  return out;
}

// ---- Monte Carlo ------------------------------------------------------------

namespace {

struct ChunkSums {
  std::vector<double> sum, sq;
  std::size_t capped = 0;
};

// Runs trajectories [0, n) in fixed chunks and merges chunk sums in order, so
// the result does not depend on the thread count. `Walker` provides
// init(), step(s, rng), is_base(s) and match(s, k).
template <class Walker>
std::vector<GreenResult> run_ensemble(const Walker& walker, std::size_t m, const McConfig& config, std::uint64_t seed,
                                      bool& runaway_out) {
  constexpr std::size_t kChunk = 1024;
  const std::size_t n = config.trajectories;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<ChunkSums> partial(chunks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> runaway{false};

  auto worker = [&] {
    std::vector<double> counts(m);
    while (!runaway) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      auto& out = partial[c];
      out.sum.assign(m, 0.0);
      out.sq.assign(m, 0.0);
      for (std::size_t t = c * kChunk; t < std::min(n, (c + 1) * kChunk); ++t) {
        Rng rng = Rng::stream(seed, t);
        std::fill(counts.begin(), counts.end(), 0.0);
        auto s = walker.init();
        std::uint64_t steps = 0;
        while (true) {
          for (std::size_t k = 0; k < m; ++k) {
            if (walker.match(s, k)) counts[k] += 1;
          }
          if (steps == config.step_cap) {
            if (config.cap_policy == CapPolicy::error) {
              runaway = true;
              return;
            }
            ++out.capped;
            break;
          }
          walker.step(s, rng);
          ++steps;
          if (walker.is_base(s)) break;
        }
        for (std::size_t k = 0; k < m; ++k) {
          out.sum[k] += counts[k];
          out.sq[k] += counts[k] * counts[k];
        }
      }
    }
  };
  const unsigned threads = std::max(1U, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  runaway_out = runaway;
  if (runaway_out) return {};

  std::vector<GreenResult> out(m);
  std::size_t capped = 0;
  for (const auto& p : partial) capped += p.capped;
  for (std::size_t k = 0; k < m; ++k) {
    double sum = 0;
    double sq = 0;
    for (const auto& p : partial) {
      sum += p.sum[k];
      sq += p.sq[k];
    }
    const double dn = static_cast<double>(n);
    const double mean = sum / dn;
    const double var = n > 1 ? std::max(0.0, (sq - sum * mean) / (dn - 1)) : 0.0;
    out[k].value = mean;
    out[k].method = GreenMethod::monte_carlo;
    out[k].std_error = std::sqrt(var / dn);
    out[k].runs = n;
    out[k].capped_runs = capped;
  }
  return out;
}

struct GenericWalker {
  const Chain& chain;
  const State& x0;
  const State& x;
  const std::vector<State>& ys;
  State init() const { return x; }
  void step(State& s, Rng& rng) const { chain.step(s, rng); }
  bool is_base(const State& s) const { return s == x0; }
  bool match(const State& s, std::size_t k) const { return s == ys[k]; }
};

// Integer walkers; they draw exactly what ZWalk::step / BangBangWalk::step draw.
struct ZWalker {
  std::int64_t x0, x;
  std::vector<std::int64_t> ys;
  std::int64_t init() const { return x; }
  static void step(std::int64_t& s, Rng& rng) { s += (rng() >> 63) != 0U ? 1 : -1; }
  bool is_base(std::int64_t s) const { return s == x0; }
  bool match(std::int64_t s, std::size_t k) const { return s == ys[k]; }
};

struct BangBangWalker {
  std::int64_t x0, x;
  std::vector<std::int64_t> ys;
  double q;
  std::int64_t init() const { return x; }
  void step(std::int64_t& s, Rng& rng) const {
    if (s == 0) {
      s = 1;
      return;
    }
    s += rng.uniform() < q ? 1 : -1;
  }
  bool is_base(std::int64_t s) const { return s == x0; }
  bool match(std::int64_t s, std::size_t k) const { return s == ys[k]; }
};

// Word walker on the k-ary tree; draws what TreeWalk::step draws. Targets are
// compared only at their own depth.
struct TreeWalker {
  std::vector<std::int32_t> x0, x;
  std::vector<std::vector<std::int32_t>> ys;
  std::uint64_t k;
  std::vector<std::int32_t> init() const { return x; }
  void step(std::vector<std::int32_t>& s, Rng& rng) const {
    if (s.empty() || (rng() >> 63) == 0U) {
      s.push_back(static_cast<std::int32_t>(rng.below(k)));
    } else {
      s.pop_back();
    }
  }
  bool is_base(const std::vector<std::int32_t>& s) const { return s.size() == x0.size() && s == x0; }
  bool match(const std::vector<std::int32_t>& s, std::size_t i) const { return s.size() == ys[i].size() && s == ys[i]; }
};

}  // namespace

std::vector<GreenResult> green_mc_multi(const Chain& chain, const State& x0, const State& x, const std::vector<State>& ys,
                                        const McConfig& config, std::uint64_t seed) {
  chain.require(x0);
  chain.require(x);
  for (const auto& y : ys) chain.require(y);
  if (config.trajectories == 0) throw Error("green_mc needs at least one trajectory");

  std::vector<std::int64_t> flat;
  for (const auto& y : ys) flat.push_back(y.size() == 1 ? y[0] : 0);
  bool runaway = false;
  std::vector<GreenResult> out;
  if (dynamic_cast<const ZWalk*>(&chain) != nullptr) {
    out = run_ensemble(ZWalker{x0[0], x[0], flat}, ys.size(), config, seed, runaway);
  } else if (const auto* bb = dynamic_cast<const BangBangWalk*>(&chain)) {
    out = run_ensemble(BangBangWalker{x0[0], x[0], flat, to_double(bb->q())}, ys.size(), config, seed, runaway);
  } else if (const auto* tree = dynamic_cast<const TreeWalk*>(&chain)) {
    std::vector<std::vector<std::int32_t>> words;
    for (const auto& y : ys) words.push_back(y.coords);
    out = run_ensemble(TreeWalker{x0.coords, x.coords, std::move(words), static_cast<std::uint64_t>(tree->arity())},
                       ys.size(), config, seed, runaway);
  } else {
    out = run_ensemble(GenericWalker{chain, x0, x, ys}, ys.size(), config, seed, runaway);
  }
  if (runaway) {
    throw RunawayRunError("a run from " + chain.format_state(x) + " exceeded the step cap of " +
                          std::to_string(config.step_cap) + " before returning to " + chain.format_state(x0) +
                          "; the chain may not be recurrent");
  }
  return out;
}

GreenResult green_mc(const Chain& chain, const State& x0, const State& x, const State& y, const McConfig& config,
                     std::uint64_t seed) {
  return green_mc_multi(chain, x0, x, {y}, config, seed).front();
}

// ---- Martin kernel ----------------------------------------------------------

GreenResult martin_kernel(const Chain& chain, const State& x0, const State& x, const State& y,
                          const MartinKernelOptions& options) {
  GreenResult num;
  GreenResult den;
  switch (options.method) {
    case GreenMethod::exact_solve: {
      const auto r = green_solve(chain, x0, {{x, y}, {x0, y}}, options.truncation);
      num = r[0];
      den = r[1];
      break;
    }
    case GreenMethod::closed_form: {
      num.value = to_double(exact_green(chain, x0, x, y));
      den.value = to_double(exact_green(chain, x0, x0, y));
      num.method = den.method = GreenMethod::closed_form;
      break;
    }
    case GreenMethod::monte_carlo: {
      num = green_mc(chain, x0, x, y, options.mc, Rng::derive(options.seed, 1));
      den = green_mc(chain, x0, x0, y, options.mc, Rng::derive(options.seed, 2));
      break;
    }
  }
  if (!(den.value > options.zero_tolerance)) {
    throw ZeroDenominatorError("G_x0(x0, y) = " + std::to_string(den.value) + " is below the tolerance " +
                               std::to_string(options.zero_tolerance));
  }
  GreenResult out = num;
  out.value = num.value / den.value;
  if (x == x0) out.value = 1.0;
  if (options.method == GreenMethod::monte_carlo && x != x0) {
    const double rel_num = num.value > 0 ? num.std_error / num.value : 0.0;
    const double rel_den = den.std_error / den.value;
    out.std_error = out.value * std::sqrt(rel_num * rel_num + rel_den * rel_den);
    if (num.value == 0) out.std_error = num.std_error / den.value;
    out.capped_runs = num.capped_runs + den.capped_runs;
  }
  out.enlargement_delta = std::max(num.enlargement_delta, den.enlargement_delta);
  return out;
}

}  // namespace martinq
