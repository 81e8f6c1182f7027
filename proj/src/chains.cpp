#include "martinq/chains.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "martinq/errors.hpp"
#include "martinq/potential.hpp"

namespace martinq {

namespace {

std::int32_t parse_int(std::string_view text, std::string_view what) {
  std::int32_t v = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw UnknownStateError("malformed " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::int32_t> parse_word(std::string_view text) {
  std::vector<std::int32_t> word;
  if (text.empty()) return word;
  std::size_t pos = 0;
  while (true) {
    const auto dot = text.find('.', pos);
    const auto piece = text.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    // letters are dot separated, so "01" is rejected rather than read as 1
    if (piece.empty() || piece.front() == '-' || (piece.size() > 1 && piece.front() == '0')) throw UnknownStateError("malformed tree word '" + std::string(text) + "'");
    word.push_back(parse_int(piece, "tree word"));
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return word;
}

std::string join_word(const std::vector<std::int32_t>& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i != 0) out += '.';
    out += std::to_string(w[i]);
  }
  return out;
}

void require_state_text(const Chain& chain, const State& x) { chain.require(x); }

}  // namespace

// ---- Ray / BoundaryPoint ----------------------------------------------------

std::int32_t Ray::digit(std::size_t i) const {
  if (i < prefix.size()) return prefix[i];
  return cycle.at((i - prefix.size()) % cycle.size());
}

std::vector<std::int32_t> Ray::take(std::size_t m) const {
  std::vector<std::int32_t> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = digit(i);
  return out;
}

std::size_t Ray::agreement(const std::vector<std::int32_t>& word) const {
  std::size_t j = 0;
  while (j < word.size() && word[j] == digit(j)) ++j;
  return j;
}

BoundaryPoint BoundaryPoint::parse(std::string_view text) {
  if (text == "+inf") return plus_inf();
  if (text == "-inf") return minus_inf();
  if (text == "inf") return inf();
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.size() < open + 3 || text.substr(text.size() - 2) != ")*") {
    throw ParseError("boundary point '" + std::string(text) + "' is not +inf, -inf, inf or a ray like 0.1(0)*");
  }
  auto head = text.substr(0, open);
  if (!head.empty() && head.back() == '.') head.remove_suffix(1);
  const auto body = text.substr(open + 1, text.size() - open - 3);
  Ray ray;
  try {
    ray.prefix = parse_word(head);
    ray.cycle = parse_word(body);
  } catch (const UnknownStateError&) {
    throw ParseError("malformed ray '" + std::string(text) + "'");
  }
  if (ray.cycle.empty()) throw ParseError("ray '" + std::string(text) + "' has an empty repeated tail");
  return of_ray(std::move(ray));
}

std::string BoundaryPoint::to_string() const {
  switch (kind) {
    case Kind::plus_infinity:
      return "+inf";
    case Kind::minus_infinity:
      return "-inf";
    case Kind::infinity:
      return "inf";
    case Kind::ray:
      return join_word(ray.prefix) + "(" + join_word(ray.cycle) + ")*";
  }
  return "?";
}

void ExampleChain::require_base(const State& x0) const {
  require(x0);
  if (x0 != base_point()) {
    throw UnsupportedError("closed forms for " + name() + " need base point " + format_state(base_point()) +
                           ", got " + format_state(x0));
  }
}

std::size_t common_prefix(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
  const auto n = std::min(a.size(), b.size());
  std::size_t j = 0;
  while (j < n && a[j] == b[j]) ++j;
  return j;
}

// ---- Z ----------------------------------------------------------------------

std::vector<Transition> ZWalk::successors(const State& x) const {
  return {{State{x[0] - 1}, Rational(1, 2)}, {State{x[0] + 1}, Rational(1, 2)}};
}

std::vector<ApproxTransition> ZWalk::approx_successors(const State& x) const {
  return {{State{x[0] - 1}, 0.5}, {State{x[0] + 1}, 0.5}};
}

State ZWalk::parse_state(std::string_view text) const { return State{parse_int(text, "integer state")}; }

std::string ZWalk::format_state(const State& x) const {
  return x.size() == 1 ? std::to_string(x[0]) : "<invalid>";
}

std::vector<State> ZWalk::ball(int radius) const {
  std::vector<State> out;
  for (int i = -radius; i <= radius; ++i) out.push_back(State{i});
  return out;
}

void ZWalk::require_boundary(const BoundaryPoint& alpha) const {
  if (alpha.kind != BoundaryPoint::Kind::plus_infinity && alpha.kind != BoundaryPoint::Kind::minus_infinity) {
    throw UnsupportedError("the Martin boundary of z is {+inf, -inf}, got " + alpha.to_string());
  }
}

Rational ZWalk::green(const State& x0, const State& x, const State& y) const {
  require_base(x0);
  require(x);
  require(y);
  if (x[0] == 0) return 1;
  if (static_cast<long>(x[0]) * y[0] <= 0) return 0;
  return 2 * std::min(std::abs(x[0]), std::abs(y[0]));
}

PiRational ZWalk::martin_boundary(const State& x0, const State& x, const BoundaryPoint& alpha) const {
  require_base(x0);
  require(x);
  require_boundary(alpha);
  return static_cast<long>(std::lround(martin_boundary_approx(x, alpha)));
}

long double ZWalk::martin_boundary_approx(const State& x, const BoundaryPoint& alpha) const {
  if (x[0] == 0) return 1;
  const int s = alpha.kind == BoundaryPoint::Kind::plus_infinity ? x[0] : -x[0];
  return s > 0 ? 2.0L * s : 0.0L;
}

// ---- Z^2 --------------------------------------------------------------------

std::vector<Transition> Z2Walk::successors(const State& x) const {
  const Rational q(1, 4);
  return {{State{x[0] - 1, x[1]}, q}, {State{x[0], x[1] - 1}, q}, {State{x[0], x[1] + 1}, q}, {State{x[0] + 1, x[1]}, q}};
}

std::vector<ApproxTransition> Z2Walk::approx_successors(const State& x) const {
  return {{State{x[0] - 1, x[1]}, 0.25}, {State{x[0], x[1] - 1}, 0.25}, {State{x[0], x[1] + 1}, 0.25},
          {State{x[0] + 1, x[1]}, 0.25}};
}

void Z2Walk::step(State& x, Rng& rng) const {
  switch (rng() >> 62) {
    case 0:
      --x[0];
      break;
    case 1:
      --x[1];
      break;
    case 2:
      ++x[1];
      break;
    default:
      ++x[0];
      break;
  }
}

State Z2Walk::parse_state(std::string_view text) const {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) throw UnknownStateError("Z^2 state '" + std::string(text) + "' must be 'i,j'");
  return State{parse_int(text.substr(0, comma), "Z^2 state"), parse_int(text.substr(comma + 1), "Z^2 state")};
}

std::string Z2Walk::format_state(const State& x) const {
  return x.size() == 2 ? std::to_string(x[0]) + "," + std::to_string(x[1]) : "<invalid>";
}

std::vector<State> Z2Walk::ball(int radius) const {
  std::vector<State> out;
  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) out.push_back(State{i, j});
  }
  return out;
}

void Z2Walk::require_boundary(const BoundaryPoint& alpha) const {
  if (alpha.kind != BoundaryPoint::Kind::infinity) {
    throw UnsupportedError("the Martin boundary of z2 is {inf}, got " + alpha.to_string());
  }
}

Rational Z2Walk::green(const State&, const State&, const State&) const {
  throw UnsupportedError("z2 has no closed-form Green function; use green_solve or the potential table");
}

PiRational Z2Walk::martin_boundary(const State& x0, const State& x, const BoundaryPoint& alpha) const {
  require_base(x0);
  require(x);
  require_boundary(alpha);
  if (x[0] == 0 && x[1] == 0) return 1;
  const int r = std::max(std::abs(x[0]), std::abs(x[1]));
  return shared_potential_table(std::max(r, 64)).at(x);
}

long double Z2Walk::martin_boundary_approx(const State& x, const BoundaryPoint&) const {
  constexpr int kCached = 64;
  static const std::vector<long double> cache = [] {
    const auto& table = shared_potential_table(kCached);
    std::vector<long double> v;
    for (int i = 0; i <= kCached; ++i) {
      for (int j = 0; j <= i; ++j) v.push_back(table.at(i, j).to_long_double());
    }
    return v;
  }();
  if (x[0] == 0 && x[1] == 0) return 1;
  int i = std::abs(x[0]);
  int j = std::abs(x[1]);
  if (j > i) std::swap(i, j);
  if (i <= kCached) return cache[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
  return potential_asymptotic(std::hypot(static_cast<long double>(i), static_cast<long double>(j)));
}

// ---- bang-bang --------------------------------------------------------------

BangBangWalk::BangBangWalk(Rational q) : q_(std::move(q)) {
  q_.canonicalize();
  if (q_ <= 0 || q_ * 2 >= 1) throw UnsupportedError("bang-bang needs q in (0, 1/2), got " + to_string(q_));
  ratio_ = (1 - q_) / q_;
  q_approx_ = martinq::to_double(q_);
}

std::string BangBangWalk::name() const { return "bangbang:q=" + to_string(q_); }

std::vector<Transition> BangBangWalk::successors(const State& x) const {
  if (x[0] == 0) return {{State{1}, Rational(1)}};
  return {{State{x[0] - 1}, 1 - q_}, {State{x[0] + 1}, q_}};
}

std::vector<ApproxTransition> BangBangWalk::approx_successors(const State& x) const {
  if (x[0] == 0) return {{State{1}, 1.0}};
  return {{State{x[0] - 1}, 1.0 - q_approx_}, {State{x[0] + 1}, q_approx_}};
}

std::vector<Transition> BangBangWalk::predecessors(const State& x) const {
  if (x[0] == 0) return {{State{1}, 1 - q_}};
  if (x[0] == 1) return {{State{0}, Rational(1)}, {State{2}, 1 - q_}};
  return {{State{x[0] - 1}, q_}, {State{x[0] + 1}, 1 - q_}};
}

std::optional<Rational> BangBangWalk::stationary(const State& x) const {
  const Rational top = 1 - 2 * q_;
  if (x[0] == 0) return Rational(top / (2 * (1 - q_)));
  return Rational(top / (2 * q_ * (1 - q_) * pow(ratio_, static_cast<unsigned long>(x[0]))));
}

void BangBangWalk::step(State& x, Rng& rng) const {
  if (x[0] == 0) {
    x[0] = 1;
    return;
  }
  x[0] += rng.uniform() < q_approx_ ? 1 : -1;
}

State BangBangWalk::parse_state(std::string_view text) const {
  State s{parse_int(text, "bang-bang state")};
  require(s);
  return s;
}

std::string BangBangWalk::format_state(const State& x) const {
  return x.size() == 1 ? std::to_string(x[0]) : "<invalid>";
}

std::vector<State> BangBangWalk::ball(int radius) const {
  std::vector<State> out;
  for (int i = 0; i <= radius; ++i) out.push_back(State{i});
  return out;
}

void BangBangWalk::require_boundary(const BoundaryPoint& alpha) const {
  if (alpha.kind != BoundaryPoint::Kind::infinity) {
    throw UnsupportedError("the Martin boundary of the bang-bang walk is {inf}, got " + alpha.to_string());
  }
}

Rational BangBangWalk::green(const State& x0, const State& x, const State& y) const {
  require_base(x0);
  require(x);
  require(y);
  if (y[0] == 0) return x[0] == 0 ? 1 : 0;
  const Rational ay = pow(ratio_, static_cast<unsigned long>(y[0]));
  if (x[0] == 0) return Rational(1 / (q_ * ay));
  const auto m = static_cast<unsigned long>(std::min(x[0], y[0]));
  return Rational((pow(ratio_, m) - 1) / ((1 - 2 * q_) * ay));
}

PiRational BangBangWalk::martin_boundary(const State& x0, const State& x, const BoundaryPoint& alpha) const {
  require_base(x0);
  require(x);
  require_boundary(alpha);
  if (x[0] == 0) return 1;
  return Rational(q_ * (pow(ratio_, static_cast<unsigned long>(x[0])) - 1) / (1 - 2 * q_));
}

long double BangBangWalk::martin_boundary_approx(const State& x, const BoundaryPoint&) const {
  if (x[0] == 0) return 1;
  const long double q = q_approx_;
  const long double a = (1 - q) / q;
  return q * (std::pow(a, static_cast<long double>(x[0])) - 1) / (1 - 2 * q);
}

// ---- k-ary tree -------------------------------------------------------------

TreeWalk::TreeWalk(int k) : k_(k) {
  if (k < 2) throw UnsupportedError("tree arity must be at least 2, got " + std::to_string(k));
}

std::string TreeWalk::name() const { return "tree:k=" + std::to_string(k_); }

bool TreeWalk::contains(const State& x) const {
  return std::all_of(x.coords.begin(), x.coords.end(), [&](std::int32_t d) { return d >= 0 && d < k_; });
}

std::vector<Transition> TreeWalk::successors(const State& x) const {
  std::vector<Transition> out;
  const bool root = x.size() == 0;
  if (!root) {
    State parent(std::vector<std::int32_t>(x.coords.begin(), x.coords.end() - 1));
    out.push_back({std::move(parent), Rational(1, 2)});
  }
  const Rational child = root ? Rational(1, k_) : Rational(1, 2 * k_);
  for (int c = 0; c < k_; ++c) {
    State s = x;
    s.coords.push_back(c);
    out.push_back({std::move(s), child});
  }
  return out;
}

std::vector<ApproxTransition> TreeWalk::approx_successors(const State& x) const {
  std::vector<ApproxTransition> out;
  for (auto& t : successors(x)) out.push_back({std::move(t.to), martinq::to_double(t.probability)});
  return out;
}

std::vector<Transition> TreeWalk::predecessors(const State& x) const {
  std::vector<Transition> out;
  if (x.size() > 0) {
    State parent(std::vector<std::int32_t>(x.coords.begin(), x.coords.end() - 1));
    out.push_back({std::move(parent), x.size() == 1 ? Rational(1, k_) : Rational(1, 2 * k_)});
  }
  for (int c = 0; c < k_; ++c) {
    State s = x;
    s.coords.push_back(c);
    out.push_back({std::move(s), Rational(1, 2)});
  }
  return out;
}

std::optional<Rational> TreeWalk::stationary(const State& x) const {
  if (x.size() == 0) return Rational(k_, k_ - 1);
  return Rational(Rational(2) / (k_ - 1) / pow(Rational(k_), static_cast<unsigned long>(x.size() - 1)));
}

void TreeWalk::step(State& x, Rng& rng) const {
  if (x.size() == 0 || (rng() >> 63) == 0U) {
    x.coords.push_back(static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(k_))));
  } else {
    x.coords.pop_back();
  }
}

State TreeWalk::parse_state(std::string_view text) const {
  State s = text == "@" ? State{} : State(parse_word(text));
  if (text.empty()) throw UnknownStateError("empty tree word; the root is written '@'");
  require(s);
  return s;
}

std::string TreeWalk::format_state(const State& x) const { return x.size() == 0 ? "@" : join_word(x.coords); }

std::vector<State> TreeWalk::ball(int radius) const {
  std::vector<State> out{State{}};
  std::size_t level_begin = 0;
  for (int d = 1; d <= radius; ++d) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (int c = 0; c < k_; ++c) {
        State s = out[i];
        s.coords.push_back(c);
        out.push_back(std::move(s));
      }
    }
    level_begin = level_end;
  }
  std::sort(out.begin(), out.end());
  return out;
}

void TreeWalk::require_boundary(const BoundaryPoint& alpha) const {
  if (alpha.kind != BoundaryPoint::Kind::ray) {
    throw UnsupportedError("tree boundary points are rays such as 0(0)*, got " + alpha.to_string());
  }
  auto ok = [&](const std::vector<std::int32_t>& w) {
    return std::all_of(w.begin(), w.end(), [&](std::int32_t d) { return d >= 0 && d < k_; });
  };
  if (!ok(alpha.ray.prefix) || !ok(alpha.ray.cycle) || alpha.ray.cycle.empty()) {
    throw UnsupportedError("ray " + alpha.to_string() + " uses letters outside 0.." + std::to_string(k_ - 1));
  }
}

Rational TreeWalk::green(const State& x0, const State& x, const State& y) const {
  require_base(x0);
  require(x);
  require(y);
  const auto p = static_cast<unsigned long>(y.size());
  if (x.size() == 0) return y.size() == 0 ? Rational(1) : Rational(2 / pow(Rational(k_), p));
  if (y.size() == 0) return 0;
  const auto j = static_cast<unsigned long>(common_prefix(x.coords, y.coords));
  if (j == 0) return 0;
  return Rational(2 * (pow(Rational(k_), j) - 1) / (pow(Rational(k_), p - 1) * (k_ - 1)));
}

PiRational TreeWalk::martin_boundary(const State& x0, const State& x, const BoundaryPoint& alpha) const {
  require_base(x0);
  require(x);
  require_boundary(alpha);
  if (x.size() == 0) return 1;
  const auto j = static_cast<unsigned long>(alpha.ray.agreement(x.coords));
  return Rational(k_ * (pow(Rational(k_), j) - 1) / (k_ - 1));
}

long double TreeWalk::martin_boundary_approx(const State& x, const BoundaryPoint& alpha) const {
  if (x.size() == 0) return 1;
  const auto j = static_cast<long double>(alpha.ray.agreement(x.coords));
  return k_ * (std::pow(static_cast<long double>(k_), j) - 1) / (k_ - 1);
}

// ---- factory and free functions --------------------------------------------

std::shared_ptr<const ExampleChain> make_chain(std::string_view selector) {
  if (selector == "z") return std::make_shared<ZWalk>();
  if (selector == "z2") return std::make_shared<Z2Walk>();
  if (selector == "bangbang") return std::make_shared<BangBangWalk>();
  if (selector == "tree") return std::make_shared<TreeWalk>();
  if (selector.starts_with("bangbang:q=")) {
    return std::make_shared<BangBangWalk>(parse_rational(selector.substr(11)));
  }
  if (selector.starts_with("tree:k=")) {
    const auto k = selector.substr(7);
    int v = 0;
    auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), v);
    if (ec != std::errc() || ptr != k.data() + k.size()) throw ParseError("malformed tree arity '" + std::string(k) + "'");
    return std::make_shared<TreeWalk>(v);
  }
  throw ParseError("unknown chain '" + std::string(selector) + "' (expected z, z2, bangbang:q=p/q or tree:k=K)");
}

const ExampleChain& as_example(const Chain& chain) {
  const auto* ex = dynamic_cast<const ExampleChain*>(&chain);
  if (ex == nullptr) throw UnsupportedError("chain " + chain.name() + " has no closed forms");
  return *ex;
}

Rational exact_green(const Chain& chain, const State& x0, const State& x, const State& y) {
  return as_example(chain).green(x0, x, y);
}

PiRational exact_martin_boundary(const Chain& chain, const State& x0, const State& x, const BoundaryPoint& alpha) {
  return as_example(chain).martin_boundary(x0, x, alpha);
}

PiRational exact_phi(const Chain& chain, const State& x0, const BoundaryPoint& alpha, const State& x) {
  const auto& ex = as_example(chain);
  ex.require_base(x0);
  require_state_text(ex, x);
  ex.require_boundary(alpha);
  if (x == x0) return 0;
  return ex.martin_boundary(x0, x, alpha) / *ex.stationary(x0);
}

}  // namespace martinq
