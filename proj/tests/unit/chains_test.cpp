#include <gtest/gtest.h>

#include "martinq/chains.hpp"
#include "martinq/errors.hpp"
#include "test_support.hpp"

using namespace martinq;

namespace {

const State kRoot{};

// E_x[f(X_1)] for an exact profile.
PiRational mean_next(const Chain& chain, const State& x, const std::function<PiRational(const State&)>& f) {
  PiRational s;
  for (const auto& t : chain.successors(x)) s += f(t.to) * t.probability;
  return s;
}

}  // namespace

TEST(TextForms, RoundTrip) {
  for (const auto& chain : props::all_chains()) {
    for (const auto& x : chain->ball(3)) {
      EXPECT_EQ(chain->parse_state(chain->format_state(x)), x) << chain->name();
    }
  }
  auto tree = make_chain("tree:k=2");
  EXPECT_EQ(tree->format_state(kRoot), "@");
  EXPECT_EQ(tree->format_state(State{0, 1, 1}), "0.1.1");
  EXPECT_EQ(make_chain("z2")->format_state(State{2, 1}), "2,1");
  EXPECT_THROW(tree->parse_state("0.2"), UnknownStateError);
  EXPECT_THROW(tree->parse_state("0..1"), UnknownStateError);
  EXPECT_THROW(tree->parse_state("01"), UnknownStateError);
  EXPECT_THROW(make_chain("bangbang")->parse_state("-1"), UnknownStateError);
  EXPECT_THROW(make_chain("z")->parse_state("1x"), UnknownStateError);
}

TEST(Selectors, Factory) {
  EXPECT_EQ(make_chain("bangbang:q=1/3")->name(), "bangbang:q=1/3");
  EXPECT_EQ(make_chain("bangbang:q=2/6")->name(), "bangbang:q=1/3");
  EXPECT_EQ(make_chain("tree:k=3")->name(), "tree:k=3");
  EXPECT_THROW(make_chain("bangbang:q=1/2"), UnsupportedError);
  EXPECT_THROW(make_chain("tree:k=1"), UnsupportedError);
  EXPECT_THROW(make_chain("torus"), ParseError);
}

TEST(Boundary, ParseAndPrefixes) {
  const auto a = BoundaryPoint::parse("0.1(0)*");
  ASSERT_EQ(a.kind, BoundaryPoint::Kind::ray);
  EXPECT_EQ(a.ray.take(5), (std::vector<std::int32_t>{0, 1, 0, 0, 0}));
  EXPECT_EQ(a.to_string(), "0.1(0)*");
  const auto b = BoundaryPoint::parse("(0.1)*");
  EXPECT_EQ(b.ray.take(4), (std::vector<std::int32_t>{0, 1, 0, 1}));
  for (std::size_t m = 0; m < 8; ++m) {
    auto shorter = b.ray.take(m);
    auto longer = b.ray.take(m + 1);
    longer.pop_back();
    EXPECT_EQ(shorter, longer);
  }
  EXPECT_EQ(BoundaryPoint::parse("+inf").kind, BoundaryPoint::Kind::plus_infinity);
  EXPECT_THROW(BoundaryPoint::parse("0.1"), ParseError);
  EXPECT_THROW(BoundaryPoint::parse("()*"), ParseError);
  EXPECT_THROW(BoundaryPoint::parse("1(01)*"), ParseError);
  EXPECT_THROW(exact_phi(*make_chain("z"), State{0}, BoundaryPoint::inf(), State{1}), UnsupportedError);
  EXPECT_THROW(exact_phi(*make_chain("tree:k=2"), kRoot, BoundaryPoint::parse("(2)*"), State{0}), UnsupportedError);
}

TEST(ExactGreen, PaperValues) {
  auto z = make_chain("z");
  EXPECT_EQ(exact_green(*z, State{0}, State{2}, State{3}), Rational(4));
  EXPECT_EQ(exact_green(*z, State{0}, State{1}, State{-1}), Rational(0));
  EXPECT_EQ(exact_green(*z, State{0}, State{0}, State{5}), Rational(1));
  auto bb = make_chain("bangbang:q=1/3");
  EXPECT_EQ(exact_green(*bb, State{0}, State{1}, State{1}), Rational(3, 2));
  EXPECT_EQ(exact_green(*bb, State{0}, State{0}, State{2}), Rational(3, 4));
  auto tree = make_chain("tree:k=2");
  EXPECT_EQ(exact_green(*tree, kRoot, State{1}, State{1}), Rational(2));
  EXPECT_EQ(exact_green(*tree, kRoot, State{0}, State{0, 1}), Rational(1));
}

TEST(ExactGreen, UnsupportedCases) {
  EXPECT_THROW(exact_green(*make_chain("z"), State{1}, State{2}, State{3}), UnsupportedError);
  EXPECT_THROW(exact_green(*make_chain("z2"), State{0, 0}, State{1, 0}, State{1, 0}), UnsupportedError);
  EXPECT_THROW(exact_green(*make_chain("tree:k=2"), State{0}, State{0}, State{0}), UnsupportedError);
}

TEST(ExactMartin, PaperValues) {
  auto z = make_chain("z");
  EXPECT_EQ(exact_martin_boundary(*z, State{0}, State{3}, BoundaryPoint::plus_inf()), PiRational(6));
  EXPECT_EQ(exact_martin_boundary(*z, State{0}, State{0}, BoundaryPoint::minus_inf()), PiRational(1));
  auto bb = make_chain("bangbang:q=1/3");
  EXPECT_EQ(exact_martin_boundary(*bb, State{0}, State{2}, BoundaryPoint::inf()), PiRational(3));
  for (int x = 1; x < 10; ++x) {
    EXPECT_EQ(exact_martin_boundary(*bb, State{0}, State{x}, BoundaryPoint::inf()), PiRational((1L << x) - 1));
  }
  auto tree = make_chain("tree:k=2");
  EXPECT_EQ(exact_martin_boundary(*tree, kRoot, State{0, 0, 1}, BoundaryPoint::parse("(0)*")), PiRational(6));
  auto z2 = make_chain("z2");
  EXPECT_EQ(exact_martin_boundary(*z2, State{0, 0}, State{2, 1}, BoundaryPoint::inf()), PiRational(-1, 8));
}

TEST(ExactPhi, PaperValues) {
  auto z = make_chain("z");
  EXPECT_EQ(exact_phi(*z, State{0}, BoundaryPoint::plus_inf(), State{5}), PiRational(10));
  EXPECT_EQ(exact_phi(*z, State{0}, BoundaryPoint::plus_inf(), State{-4}), PiRational(0));
  EXPECT_EQ(exact_phi(*z, State{0}, BoundaryPoint::plus_inf(), State{0}), PiRational(0));
  auto bb = make_chain("bangbang:q=1/3");
  EXPECT_EQ(exact_phi(*bb, State{0}, BoundaryPoint::inf(), State{2}), PiRational(12));
  auto tree = make_chain("tree:k=2");
  EXPECT_EQ(exact_phi(*tree, kRoot, BoundaryPoint::parse("(0)*"), State{0, 0}), PiRational(3));
}

TEST(ExactPhi, HarmonicOffBaseAndTotalMass) {
  struct Case {
    std::string chain;
    std::string alpha;
    int radius;
    Rational mass;
  };
  const std::vector<Case> cases = {
      {"z", "+inf", 10, 1}, {"z", "-inf", 10, 1}, {"bangbang:q=1/3", "inf", 12, 4},
      {"bangbang:q=2/5", "inf", 12, 0},
      {"tree:k=2", "(0)*", 5, Rational(1, 2)}, {"tree:k=2", "0.1(1.0)*", 5, Rational(1, 2)},
      {"tree:k=3", "2(0)*", 3, Rational(2, 3)}, {"z2", "inf", 6, 1},
  };
  for (const auto& c : cases) {
    auto chain = make_chain(c.chain);
    const auto alpha = BoundaryPoint::parse(c.alpha);
    const State x0 = chain->base_point();
    auto phi = [&](const State& s) { return exact_phi(*chain, x0, alpha, s); };
    for (const auto& x : chain->ball(c.radius)) {
      if (x == x0) continue;
      EXPECT_EQ(mean_next(*chain, x, phi), phi(x)) << c.chain << " at " << chain->format_state(x);
    }
    const auto mass = mean_next(*chain, x0, phi);
    EXPECT_EQ(mass, PiRational(Rational(1) / *chain->stationary(x0))) << c.chain;
    if (c.chain != "bangbang:q=2/5") EXPECT_EQ(mass, PiRational(c.mass)) << c.chain;
  }
}

TEST(ExactPhi, TreeNormalisationMatchesDepthFormula) {
  // beta comes from detailed balance; phi must still be k^j - 1.
  for (int k : {2, 3, 4}) {
    auto tree = make_chain("tree:k=" + std::to_string(k));
    const auto alpha = BoundaryPoint::parse("(0)*");
    for (const auto& x : tree->ball(3)) {
      if (x.size() == 0) continue;
      const auto j = alpha.ray.agreement(x.coords);
      long kj = 1;
      for (std::size_t i = 0; i < j; ++i) kj *= k;
      EXPECT_EQ(exact_phi(*tree, kRoot, alpha, x), PiRational(kj - 1));
    }
  }
}

TEST(ExactGreen, BaseRowIsStationaryRatio) {
  for (const std::string name : {"z", "bangbang:q=1/3", "bangbang:q=1/4", "tree:k=2", "tree:k=3"}) {
    auto chain = make_chain(name);
    const State x0 = chain->base_point();
    for (const auto& y : chain->ball(4)) {
      EXPECT_EQ(exact_green(*chain, x0, x0, y), *chain->stationary(y) / *chain->stationary(x0)) << name;
    }
  }
}

TEST(ExactGreen, MartinKernelStabilises) {
  auto bb = make_chain("bangbang:q=1/3");
  for (int x = 1; x <= 5; ++x) {
    for (int y = x; y <= 10; ++y) {
      const Rational l = exact_green(*bb, State{0}, State{x}, State{y}) / exact_green(*bb, State{0}, State{0}, State{y});
      EXPECT_EQ(PiRational(l), exact_martin_boundary(*bb, State{0}, State{x}, BoundaryPoint::inf()));
    }
  }
  auto tree = make_chain("tree:k=2");
  const auto alpha = BoundaryPoint::parse("(0.1)*");
  for (const auto& x : tree->ball(3)) {
    if (x.size() == 0) continue;
    // any y on the ray beyond depth |x|
    for (std::size_t depth = x.size(); depth <= 7; ++depth) {
      const State y(alpha.ray.take(depth));
      const Rational l = exact_green(*tree, kRoot, x, y) / exact_green(*tree, kRoot, kRoot, y);
      EXPECT_EQ(PiRational(l), exact_martin_boundary(*tree, kRoot, x, alpha));
    }
  }
}

TEST(ExactGreen, HarmonicInStartOffDiagonal) {
  // x -> G(x, y) is harmonic off {x0, y} for the killed chain, with defect 1 at y.
  for (const std::string name : {"z", "bangbang:q=1/3", "tree:k=2"}) {
    auto chain = make_chain(name);
    const State x0 = chain->base_point();
    for (const auto& y : chain->ball(3)) {
      if (y == x0) continue;
      for (const auto& x : chain->ball(3)) {
        if (x == x0) continue;
        Rational next = 0;
        for (const auto& t : chain->successors(x)) {
          if (t.to != x0) next += t.probability * exact_green(*chain, x0, t.to, y);
        }
        EXPECT_EQ(exact_green(*chain, x0, x, y), next + (x == y ? 1 : 0)) << name;
      }
    }
  }
}
