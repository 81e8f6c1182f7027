#include <gtest/gtest.h>

#include "martinq/errors.hpp"
#include "martinq/green.hpp"
#include "martinq/martin.hpp"

using namespace martinq;

namespace {

HarmonicProfile z_profile(std::function<long(long)> f) {
  return HarmonicProfile::user(State{0}, [f](const State& x) { return PiRational(f(x[0])); });
}

}  // namespace

TEST(ProfileFromBoundary, ClosedFormsAtBase) {
  auto z = make_chain("z");
  const auto phi = profile_from_boundary(*z, State{0}, BoundaryPoint::plus_inf());
  EXPECT_EQ(phi.provenance(), ProfileProvenance::closed_form);
  for (int x = -6; x <= 6; ++x) {
    EXPECT_EQ(phi(State{x}), PiRational(2L * std::max(x, 0)));
    EXPECT_EQ(phi.approx(State{x}), 2.0L * std::max(x, 0));
  }
  auto tree = make_chain("tree:k=2");
  const auto tp = profile_from_boundary(*tree, State{}, BoundaryPoint::parse("(0)*"));
  EXPECT_EQ(tp(State{0, 0}), PiRational(3));
  EXPECT_EQ(tp.approx(State{0, 0}), 3.0L);
}

TEST(ProfileFromBoundary, ZChangeOfBaseIsTranslation) {
  auto z = make_chain("z");
  for (int x1 : {1, 3, -2}) {
    const auto phi = profile_from_boundary(*z, State{x1}, BoundaryPoint::plus_inf());
    EXPECT_EQ(phi.provenance(), ProfileProvenance::boundary_point);
    for (int x = -10; x <= 10; ++x) {
      EXPECT_EQ(phi(State{x}), PiRational(2L * std::max(x - x1, 0))) << "x1=" << x1 << " x=" << x;
      EXPECT_NEAR(static_cast<double>(phi.approx(State{x})), 2.0 * std::max(x - x1, 0), 1e-9);
    }
  }
  const auto neg = profile_from_boundary(*z, State{1}, BoundaryPoint::minus_inf());
  for (int x = -10; x <= 10; ++x) EXPECT_EQ(neg(State{x}), PiRational(2L * std::max(1 - x, 0)));
}

TEST(ProfileFromBoundary, ZChangeOfBaseMatchesMartinKernelLimit) {
  // phi_{1,+inf}(x) = L_1(x, y) / beta(1) for y far to the right.
  auto z = make_chain("z");
  const auto phi = profile_from_boundary(*z, State{1}, BoundaryPoint::plus_inf());
  MartinKernelOptions opt;
  opt.truncation.radius = 100;
  opt.truncation.enlargement_margin = 0;
  for (int y : {20, 40, 80}) {
    for (int x = -5; x <= 8; ++x) {
      if (x == 1) continue;
      const double l = martin_kernel(*z, State{1}, State{x}, State{y}, opt).value;
      EXPECT_NEAR(l, phi(State{x}).to_double(), 1e-10);
    }
  }
}

TEST(ProfileFromBoundary, OtherBasesAreHarmonicProfiles) {
  struct Case {
    std::string chain;
    std::string alpha;
    State x1;
  };
  const std::vector<Case> cases = {{"bangbang:q=1/3", "inf", State{2}},
                                   {"bangbang:q=1/4", "inf", State{1}},
                                   {"tree:k=2", "(0)*", State{0}},
                                   {"tree:k=2", "(0)*", State{1}},
                                   {"tree:k=2", "0.1(1)*", State{0, 1}}};
  for (const auto& c : cases) {
    auto chain = make_chain(c.chain);
    const auto phi = profile_from_boundary(*chain, c.x1, BoundaryPoint::parse(c.alpha));
    ASSERT_TRUE(phi.has_exact());
    const auto window = chain->ball(chain->name().starts_with("tree") ? 4 : 10);
    const auto report = check_harmonic_except(*chain, phi, c.x1, window);
    EXPECT_TRUE(report.ok()) << c.chain;
    EXPECT_EQ(phi(c.x1), PiRational(0));
    // total mass: E_{x1}[phi(X_1)] = 1 / beta(x1)
    EXPECT_EQ(report.base_balance, PiRational(Rational(1) / *chain->stationary(c.x1))) << c.chain;
    for (const auto& x : window) {
      EXPECT_GE(phi(x).sign(), 0);
      EXPECT_NEAR(static_cast<double>(phi.approx(x)), phi(x).to_double(), 1e-8);
    }
  }
}

TEST(ProfileFromBoundary, BangBangBaseIndependenceIsBounded) {
  auto bb = make_chain("bangbang:q=1/3");
  const auto p0 = profile_from_boundary(*bb, State{0}, BoundaryPoint::inf());
  const auto p2 = profile_from_boundary(*bb, State{2}, BoundaryPoint::inf());
  double worst = 0;
  for (int x = 0; x <= 40; ++x) worst = std::max(worst, std::abs((p0(State{x}) - p2(State{x})).to_double()));
  // the difference is eventually constant, so the sup over a long window is the sup
  EXPECT_EQ(p0(State{39}) - p2(State{39}), p0(State{40}) - p2(State{40}));
  EXPECT_LT(worst, 100.0);
}

TEST(ProfileFromBoundary, ZBaseIndependenceIsBounded) {
  auto z = make_chain("z");
  const auto p0 = profile_from_boundary(*z, State{0}, BoundaryPoint::plus_inf());
  const auto p1 = profile_from_boundary(*z, State{1}, BoundaryPoint::plus_inf());
  for (int x = -30; x <= 30; ++x) EXPECT_LE(abs(p0(State{x}) - p1(State{x})).to_double(), 2.0);
}

TEST(Mixture, ParseAndMass) {
  const auto mu = BoundaryMixture::parse("1*+inf+1/2*-inf");
  ASSERT_EQ(mu.atoms.size(), 2U);
  EXPECT_EQ(mu.atoms[1].first.kind, BoundaryPoint::Kind::minus_infinity);
  EXPECT_EQ(mu.total_mass(), Rational(3, 2));
  const auto rays = BoundaryMixture::parse("2*0(0)*+1(1)*");
  ASSERT_EQ(rays.atoms.size(), 2U);
  EXPECT_EQ(rays.atoms[1].second, Rational(1));
  EXPECT_EQ(rays.atoms[1].first.to_string(), "1(1)*");
  EXPECT_THROW(BoundaryMixture::parse("-1*+inf"), ParseError);
}

TEST(Mixture, ZExamples) {
  auto z = make_chain("z");
  const auto both = mixture_profile(*z, State{0}, BoundaryMixture::parse("1*+inf+1*-inf"));
  for (int x = -5; x <= 5; ++x) EXPECT_EQ(both(State{x}), PiRational(2L * std::abs(x)));
  const auto report = check_harmonic_except(*z, both, State{0}, z->ball(10));
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.base_balance, PiRational(2));

  const auto plus = mixture_profile(*z, State{0}, BoundaryMixture::parse("+inf"));
  for (int x = -5; x <= 5; ++x) EXPECT_EQ(plus(State{x}), PiRational(2L * std::max(x, 0)));

  const auto empty = mixture_profile(*z, State{0}, BoundaryMixture{});
  for (int x = -5; x <= 5; ++x) EXPECT_TRUE(empty(State{x}).is_zero());
}

TEST(Mixture, TotalMassIdentityAcrossChains) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"z", "1/3*+inf+5/7*-inf"},
      {"bangbang:q=1/3", "7/2*inf"},
      {"tree:k=2", "1/4*(0)*+3/4*1(0)*+2*0.1(1)*"},
      {"z2", "3*inf"},
  };
  for (const auto& [name, text] : cases) {
    auto chain = make_chain(name);
    const auto mu = BoundaryMixture::parse(text);
    const auto phi = mixture_profile(*chain, chain->base_point(), mu);
    const auto report = check_harmonic_except(*chain, phi, chain->base_point(), chain->ball(3));
    EXPECT_TRUE(report.ok()) << name;
    EXPECT_EQ(report.base_balance, PiRational(mu.total_mass())) << name;
  }
}

TEST(Mixture, MassAtOtherBase) {
  auto tree = make_chain("tree:k=2");
  const auto mu = BoundaryMixture::parse("1/2*(0)*+1/2*(1)*");
  const auto phi = mixture_profile(*tree, State{0}, mu);
  const auto report = check_harmonic_except(*tree, phi, State{0}, tree->ball(4));
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.base_balance, PiRational(1));
}

TEST(Decompose, Examples) {
  auto mu = decompose_profile_z(z_profile([](long x) { return 2 * std::max(x, 0L); }));
  EXPECT_EQ(mu.atoms[0].second, Rational(1));
  EXPECT_EQ(mu.atoms[1].second, Rational(0));
  mu = decompose_profile_z(z_profile([](long x) { return 2 * std::abs(x); }));
  EXPECT_EQ(mu.atoms[0].second, Rational(1));
  EXPECT_EQ(mu.atoms[1].second, Rational(1));
  mu = decompose_profile_z(z_profile([](long x) { return std::max(x, 0L); }));
  EXPECT_EQ(mu.atoms[0].second, Rational(1, 2));
}

TEST(Decompose, RejectsOutsideCone) {
  EXPECT_THROW(decompose_profile_z(z_profile([](long x) { return x * x; })), NotInConeError);
  EXPECT_THROW(decompose_profile_z(z_profile([](long x) { return -2 * std::max(x, 0L); })), NotInConeError);
  EXPECT_THROW(decompose_profile_z(z_profile([](long x) { return x == 7 ? 15 : 2 * std::max(x, 0L); })),
               NotInConeError);
}

TEST(Decompose, RoundTripsRationalMixtures) {
  auto z = make_chain("z");
  for (const auto& [a, b] : std::vector<std::pair<Rational, Rational>>{
           {Rational(1, 3), Rational(2, 5)}, {Rational(0), Rational(7)}, {Rational(9, 4), Rational(0)}}) {
    BoundaryMixture mu;
    mu.atoms = {{BoundaryPoint::plus_inf(), a}, {BoundaryPoint::minus_inf(), b}};
    const auto back = decompose_profile_z(mixture_profile(*z, State{0}, mu));
    EXPECT_EQ(back.atoms[0].second, a);
    EXPECT_EQ(back.atoms[1].second, b);
  }
}

TEST(CheckHarmonic, Examples) {
  auto z = make_chain("z");
  auto r = check_harmonic_except(*z, profile_from_boundary(*z, State{0}, BoundaryPoint::plus_inf()), State{0},
                                 z->ball(5));
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.base_balance, PiRational(1));
  EXPECT_EQ(r.residuals.size(), 10U);

  auto bb = make_chain("bangbang:q=1/3");
  r = check_harmonic_except(*bb, profile_from_boundary(*bb, State{0}, BoundaryPoint::inf()), State{0}, bb->ball(8));
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.base_balance, PiRational(4));

  r = check_harmonic_except(*z, z_profile([](long x) { return x * x; }), State{0}, z->ball(5));
  EXPECT_FALSE(r.ok());
  for (const auto& res : r.residuals) EXPECT_EQ(res.exact, PiRational(1));
}

TEST(CheckHarmonic, Z2PotentialProfile) {
  auto z2 = make_chain("z2");
  const auto phi = profile_from_boundary(*z2, State{0, 0}, BoundaryPoint::inf());
  const auto r = check_harmonic_except(*z2, phi, State{0, 0}, z2->ball(10));
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.base_balance, PiRational(1));
}
