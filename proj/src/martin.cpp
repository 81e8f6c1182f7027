#include "martinq/martin.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "martinq/errors.hpp"
#include "martinq/green.hpp"

namespace martinq {

std::string provenance_name(ProfileProvenance p) {
  switch (p) {
    case ProfileProvenance::closed_form:
      return "closed-form";
    case ProfileProvenance::boundary_point:
      return "boundary-point";
    case ProfileProvenance::mixture:
      return "mixture";
    case ProfileProvenance::user:
      return "user";
  }
  return "?";
}

HarmonicProfile::HarmonicProfile(State base, ExactFn exact, ApproxFn approx, ProfileProvenance provenance,
                                 std::string label)
    : base_(std::move(base)),
      exact_(std::move(exact)),
      approx_(std::move(approx)),
      provenance_(provenance),
      label_(std::move(label)) {}

HarmonicProfile HarmonicProfile::user(State base, ExactFn exact, std::string label) {
  auto approx = [exact](const State& x) { return exact(x).to_long_double(); };
  return {std::move(base), std::move(exact), std::move(approx), ProfileProvenance::user, std::move(label)};
}

PiRational HarmonicProfile::operator()(const State& x) const {
  if (!exact_) throw InexactError("profile " + label_ + " has no exact evaluator");
  return exact_(x);
}

// ---- mixtures ---------------------------------------------------------------

Rational BoundaryMixture::total_mass() const {
  Rational m = 0;
  for (const auto& [alpha, w] : atoms) m += w;
  return m;
}

BoundaryMixture BoundaryMixture::parse(std::string_view text) {
  BoundaryMixture mu;
  std::vector<std::string_view> terms;
  std::size_t start = 0;
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (text[i] != '+') continue;
    const bool after_weight = text[i - 1] == '*' && !(i >= 2 && text[i - 2] == ')');
    if (!after_weight) {
      terms.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (!text.empty()) terms.push_back(text.substr(start));
  for (auto term : terms) {
    if (term.empty()) throw ParseError("empty term in mixture '" + std::string(text) + "'");
    Rational w = 1;
    const auto star = term.find('*');
    // A ray's trailing ")*" is not a weight separator.
    if (star != std::string_view::npos && star > 0 && term[star - 1] != ')') {
      w = parse_rational(term.substr(0, star));
      term = term.substr(star + 1);
    }
    if (w < 0) throw ParseError("negative mixture weight in '" + std::string(text) + "'");
    mu.atoms.emplace_back(BoundaryPoint::parse(term), w);
  }
  return mu;
}

std::string BoundaryMixture::to_string() const {
  std::string out;
  for (const auto& [alpha, w] : atoms) {
    if (!out.empty()) out += "+";
    out += martinq::to_string(w) + "*" + alpha.to_string();
  }
  return out;
}

// ---- profiles ---------------------------------------------------------------

namespace {

// Killed Green values E_x[L^b_{T_{x1} - 1}] for every x of a ball, grown on
// demand. Exact under the reflecting window for the cut-vertex chains.
class ChangeOfBaseCache {
 public:
  ChangeOfBaseCache(std::shared_ptr<const ExampleChain> chain, State x1) : chain_(std::move(chain)), x1_(std::move(x1)) {}

  Rational exact(const State& x) {
    std::lock_guard lock(mu_);
    const int need = std::max(chain_->radius_of(x), chain_->radius_of(x1_)) + 1;
    if (need > radius_) {
      radius_ = std::max(need, 2 * radius_);
      const auto window = chain_->ball(radius_);
      std::vector<GreenQuery> q;
      for (const auto& s : window) q.push_back({s, chain_->base_point()});
      const auto values = green_solve_exact(*chain_, x1_, q, window, BoundaryPolicy::reflect);
      table_.clear();
      for (std::size_t i = 0; i < window.size(); ++i) table_.emplace(window[i], values[i]);
    }
    return table_.at(x);
  }

  double approx(const State& x) {
    if (chain_->default_boundary() == BoundaryPolicy::reflect) return to_double(exact(x));
    std::lock_guard lock(mu_);
    const int need = std::max(chain_->radius_of(x), chain_->radius_of(x1_)) + 40;
    if (need > approx_radius_) {
      approx_radius_ = need;
      KilledSolver solver(*chain_, x1_, chain_->ball(approx_radius_), chain_->default_boundary());
      approx_window_ = solver.window();
      approx_column_ = solver.column(chain_->base_point());
      approx_index_.clear();
      for (std::size_t i = 0; i < approx_window_.size(); ++i) approx_index_.emplace(approx_window_[i], i);
    }
    return approx_column_[approx_index_.at(x)];
  }

 private:
  std::shared_ptr<const ExampleChain> chain_;
  State x1_;
  std::mutex mu_;
  int radius_ = 0;
  std::map<State, Rational> table_;
  int approx_radius_ = 0;
  std::vector<State> approx_window_;
  std::vector<double> approx_column_;
  std::map<State, std::size_t> approx_index_;
};

}  // namespace

HarmonicProfile profile_from_boundary(const Chain& chain, const State& x0, const BoundaryPoint& alpha) {
  const auto& ex = as_example(chain);
  ex.require(x0);
  ex.require_boundary(alpha);
  const State b = ex.base_point();
  // Profiles outlive the caller's reference, so they hold their own chain.
  std::shared_ptr<const ExampleChain> own = make_chain(ex.name());
  const Rational beta_b = *own->stationary(b);
  const long double beta_b_approx = to_double(beta_b);

  auto base_exact = [own, b, alpha](const State& x) { return exact_phi(*own, b, alpha, x); };
  auto base_approx = [own, b, alpha, beta_b_approx](const State& x) -> long double {
    if (x == b) return 0;
    return own->martin_boundary_approx(x, alpha) / beta_b_approx;
  };
  if (x0 == b) {
    return {x0, base_exact, base_approx, ProfileProvenance::closed_form,
            "phi_{" + ex.format_state(x0) + "," + alpha.to_string() + "}"};
  }

  // K = E_b[phi_b(X_1)] = 1 / beta(b)
  const Rational k = 1 / beta_b;
  auto cache = std::make_shared<ChangeOfBaseCache>(own, x0);
  HarmonicProfile::ExactFn exact;
  if (own->default_boundary() == BoundaryPolicy::reflect) {
    const PiRational phi_x0 = base_exact(x0);
    exact = [own, x0, base_exact, phi_x0, k, cache](const State& x) -> PiRational {
      own->require(x);
      if (x == x0) return 0;
      return base_exact(x) - phi_x0 + PiRational(k * cache->exact(x));
    };
  }
  const long double phi_x0_approx = base_approx(x0);
  const long double k_approx = to_double(k);
  auto approx = [own, x0, base_approx, phi_x0_approx, k_approx, cache](const State& x) -> long double {
    if (x == x0) return 0;
    return base_approx(x) - phi_x0_approx + k_approx * cache->approx(x);
  };
  return {x0, exact, approx, ProfileProvenance::boundary_point,
          "phi_{" + ex.format_state(x0) + "," + alpha.to_string() + "}"};
}

HarmonicProfile mixture_profile(const Chain& chain, const State& x0, const BoundaryMixture& mu) {
  chain.require(x0);
  const auto beta = chain.stationary(x0);
  if (!beta) throw UnsupportedError("chain " + chain.name() + " has no stationary measure");
  std::vector<std::pair<HarmonicProfile, Rational>> parts;
  for (const auto& [alpha, w] : mu.atoms) parts.emplace_back(profile_from_boundary(chain, x0, alpha), w * *beta);
  const bool all_exact = std::all_of(parts.begin(), parts.end(), [](const auto& p) { return p.first.has_exact(); });
  HarmonicProfile::ExactFn exact;
  if (all_exact) {
    exact = [parts, x0](const State& x) {
      PiRational s;
      if (x == x0) return s;
      for (const auto& [phi, w] : parts) s += phi(x) * w;
      return s;
    };
  }
  auto approx = [parts, x0](const State& x) -> long double {
    long double s = 0;
    if (x == x0) return s;
    for (const auto& [phi, w] : parts) s += phi.approx(x) * static_cast<long double>(to_double(w));
    return s;
  };
  return {x0, exact, approx, ProfileProvenance::mixture, mu.to_string()};
}

BoundaryMixture decompose_profile_z(const HarmonicProfile& phi, int radius) {
  if (phi.base() != State{0}) throw NotInConeError("decompose_profile_z needs a profile based at 0 on Z");
  if (!phi(State{0}).is_zero()) throw NotInConeError("profile does not vanish at 0");
  const PiRational a = phi(State{1}) / Rational(2);
  const PiRational b = phi(State{-1}) / Rational(2);
  if (!a.is_rational() || !b.is_rational() || a.sign() < 0 || b.sign() < 0) {
    throw NotInConeError("weights phi(1)/2 = " + a.to_string() + " and phi(-1)/2 = " + b.to_string() +
                         " are not nonnegative rationals");
  }
  for (int x = -radius; x <= radius; ++x) {
    const Rational expected = x > 0 ? 2 * a.as_rational() * x : 2 * b.as_rational() * (-x);
    const PiRational got = phi(State{x});
    if (!(got == PiRational(expected))) {
      throw NotInConeError("phi(" + std::to_string(x) + ") = " + got.to_string() + " but the cone element through (" +
                           a.to_string() + ", " + b.to_string() + ") gives " + to_string(expected));
    }
  }
  BoundaryMixture mu;
  mu.atoms.emplace_back(BoundaryPoint::plus_inf(), a.as_rational());
  mu.atoms.emplace_back(BoundaryPoint::minus_inf(), b.as_rational());
  return mu;
}

HarmonicReport check_harmonic_except(const Chain& chain, const HarmonicProfile& phi, const State& x0,
                                     const std::vector<State>& window) {
  HarmonicReport report;
  report.exact = phi.has_exact();
  for (const auto& x : window) {
    chain.require(x);
    const auto succ = step_distribution(chain, x);
    PiRational mean_exact;
    long double mean_approx = 0;
    for (const auto& t : succ) {
      if (report.exact) {
        mean_exact += phi(t.to) * t.probability;
      } else {
        mean_approx += phi.approx(t.to) * static_cast<long double>(to_double(t.probability));
      }
    }
    if (x == x0) {
      report.base_balance = mean_exact;
      report.base_balance_numeric = report.exact ? mean_exact.to_double() : static_cast<double>(mean_approx);
      continue;
    }
    HarmonicResidual r;
    r.x = x;
    if (report.exact) {
      r.exact = mean_exact - phi(x);
      r.numeric = r.exact.to_double();
      if (!r.exact.is_zero()) ++report.nonzero;
    } else {
      r.numeric = static_cast<double>(mean_approx - phi.approx(x));
      if (r.numeric != 0) ++report.nonzero;
    }
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(r.numeric));
    report.residuals.push_back(std::move(r));
  }
  return report;
}

}  // namespace martinq
