#include <gtest/gtest.h>

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "lamsmooth/catalog.hpp"
#include "lamsmooth/log_lipschitz.hpp"
#include "lamsmooth/projection.hpp"
#include "lamsmooth/sampled_field.hpp"

using namespace lamsmooth;

namespace {

// Independent reference: adaptive Dormand-Prince from odeint.
double odeint_osgood(double a, double x_end) {
  namespace ode = boost::numeric::odeint;
  std::vector<double> y{a};
  auto rhs = [](const std::vector<double>& s, std::vector<double>& d, double) { d[0] = catalog::osgood_slope(s[0]); };
  ode::integrate_adaptive(ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<std::vector<double>>()), rhs,
                          y, 0.0, x_end, 1e-3);
  return y[0];
}

}  // namespace

TEST(LeafEval, FlatIsConstant) { EXPECT_EQ(leaf_eval(catalog::flat(), 0.3, 1.7), 0.3); }

TEST(LeafEval, CanonicalNormalizedAtZero) { EXPECT_EQ(leaf_eval(catalog::canonical_osgood(), 0.5, 0.0), 0.5); }

TEST(LeafEval, CanonicalAtLog2MatchesClosedFormAndIntegration) {
  const double v = leaf_eval(catalog::canonical_osgood(), 0.25, std::log(2.0));
  EXPECT_NEAR(v, 0.5, 1e-15);
  EXPECT_NEAR(odeint_osgood(0.25, std::log(2.0)), v, 1e-10);
}

TEST(LeafEval, RejectsLabelOutsideRange) {
  EXPECT_THROW(leaf_eval(catalog::canonical_osgood(), 1.5, 0.0), DomainError);
}

TEST(ProjectPi, Examples) {
  EXPECT_EQ(project_pi(catalog::flat(), 2.0, 0.7), 0.7);
  EXPECT_NEAR(project_pi(catalog::affine(), 1.0, 1.5), 0.5, 1e-10);
  const double a = project_pi(catalog::canonical_osgood(), std::log(2.0), 0.5);
  EXPECT_NEAR(a, std::pow(0.5, std::exp(std::log(2.0))), 1e-10);
  EXPECT_NEAR(a, 0.25, 1e-10);
}

TEST(ProjectPi, OutsideLeavesIsCoverageError) {
  EXPECT_THROW(project_pi(catalog::canonical_osgood(), 0.0, 1.5), CoverageError);
}

TEST(ProjectPi, PropertyRoundTripAndInverse) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(0.01, 0.99), ux(-1.5, 1.5);
  const auto fam = catalog::canonical_osgood();
  for (int i = 0; i < 2000; ++i) {
    const double a = ua(rng), x = ux(rng);
    const double y = fam.value(a, x);
    EXPECT_NEAR(fam.value(project_pi(fam, x, y), x), y, 1e-10);
    EXPECT_NEAR(catalog::osgood_label(x, y), a, 1e-9);
  }
}

TEST(LeafwiseDerivative, Examples) {
  const Interval base{-2.0, 2.0};
  EXPECT_NEAR(leafwise_derivative(catalog::phi_x(), catalog::flat(), 0.4, 0.3, base), 1.0, 1e-9);
  const auto fam = catalog::canonical_osgood();
  // pi is evaluated by bisection, so only up to its tolerance over the step.
  EXPECT_NEAR(leafwise_derivative(catalog::phi_pi(fam), fam, 0.4, 0.3, base), 0.0, 1e-9);
  // phi = y: derivative f_a log(1/f_a) at f_a = 1/2.
  const double d = leafwise_derivative(catalog::phi_y(), fam, 0.5, 0.0, base);
  EXPECT_NEAR(d, 0.5 * std::log(2.0), 1e-9);
  // The value is stable under an h-sweep of plain central differences.
  for (double h : {1e-3, 1e-4, 1e-5}) {
    const double c = (fam.value(0.5, h) - fam.value(0.5, -h)) / (2 * h);
    EXPECT_NEAR(c, d, 10 * h * h + 1e-9);
  }
}

TEST(LeafwiseDerivative, StencilOutsideBaseIsDomainError) {
  EXPECT_THROW(leafwise_derivative(catalog::phi_x(), catalog::flat(), 0.4, 1.0, Interval{-1.0, 1.0}), DomainError);
}

TEST(LogLipschitz, ConstantFieldHasZeroL) {
  const SlopeField2D f{"c", [](double, double) { return 3.0; }};
  const auto est = estimate_log_lipschitz_L(f, Domain::plane({-1, 1}, {0, 1}));
  EXPECT_EQ(est.L, 0.0);
  EXPECT_EQ(est.L_effective, 1.45);
}

TEST(LogLipschitz, LinearFieldMatchesOneDimensionalMaximum) {
  const SlopeField2D f{"2y", [](double, double y) { return 2.0 * y; }};
  LipschitzSampling s;
  const auto est = estimate_log_lipschitz_L(f, Domain::plane({0, 1}, {0, 0.5}), s);
  // Oracle: max over t in (0, 1/2] of 2t / (t log(1/t)) by a dense 1-D scan.
  double oracle = 0.0;
  for (int i = 1; i <= 100000; ++i) {
    const double t = 0.5 * i / 100000.0;
    oracle = std::max(oracle, 2.0 * t / osgood_modulus(t));
  }
  EXPECT_NEAR(oracle, 2.0 / std::log(2.0), 1e-12);
  EXPECT_NEAR(est.L, oracle, 1e-9);
}

TEST(LogLipschitz, OsgoodFieldNearOne) {
  const auto f = catalog::osgood_field();
  const auto est = estimate_log_lipschitz_L(f, Domain::plane({0, 1}, {0, 0.5}));
  // Oracle: brute-force ratio maximization over a 100 x 100 (y, t) grid.
  double oracle = 0.0;
  for (int i = 0; i < 100; ++i)
    for (int k = 1; k <= 100; ++k) {
      const double y = 0.5 * i / 99.0, t = std::exp(std::log(1e-6) + (std::log(0.5) - std::log(1e-6)) * k / 100.0);
      if (y + t > 0.5) continue;
      oracle = std::max(oracle, std::abs(catalog::osgood_slope(y + t) - catalog::osgood_slope(y)) / osgood_modulus(t));
    }
  EXPECT_NEAR(oracle, 1.0, 0.05);
  EXPECT_NEAR(est.L, 1.0, 0.05);
  EXPECT_GE(est.L, oracle - 1e-12);
}

TEST(BasicAssumption, Examples) {
  EXPECT_TRUE(check_basic_assumption(catalog::flat(), Domain::plane({-1, 1}, {0, 1}), 1.45).pass);
  EXPECT_EQ(check_basic_assumption(catalog::flat(), Domain::plane({-1, 1}, {0, 1}), 1.45).measured, 0.0);
  EXPECT_TRUE(check_basic_assumption(catalog::canonical_osgood(), Domain::plane({-1, 1}, {0.01, 0.5}), 1.5).pass);
  const auto fam = catalog::perturbed_affine();
  const Domain K = catalog::default_domain2d(fam.name);
  const double L = estimate_log_lipschitz_L(fam, K).L_effective;
  EXPECT_TRUE(check_basic_assumption(fam, K, L).pass);
}

TEST(BasicAssumption, TooSmallLFails) {
  EXPECT_FALSE(check_basic_assumption(catalog::osgood_field(), Domain::plane({0, 1}, {0, 0.5}), 0.5).pass);
}

TEST(LeafGapEnvelope, HoldsOnCanonicalFamily) {
  const auto r = check_lemma1_envelope(catalog::canonical_osgood(), 1.45, Interval{-1, 1});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.samples, 20000u);
}

TEST(Integrator, SlopeFieldExamples) {
  const Domain d = Domain::plane({-2, 2}, {-10, 10});
  const auto flat = family_from_slope_field(catalog::flat_field(), d);
  const auto unit = family_from_slope_field(catalog::affine_field(), d);
  for (double x : {-1.7, 0.0, 0.4, 1.9}) {
    EXPECT_NEAR(flat.value(0.3, x), 0.3, 1e-14);
    EXPECT_NEAR(unit.value(0.3, x), 0.3 + x, 1e-12);
  }
  const auto osg = family_from_slope_field(catalog::osgood_field(), Domain::plane({-2, 2}, {0, 1}));
  EXPECT_NEAR(osg.value(0.25, std::log(2.0)), 0.5, 1e-8);
}

TEST(Integrator, TruncationCarriesExitPoint) {
  const auto F = [](double, double) { return 1.0; };
  const double st[1] = {2.0};
  auto tr = integrate(F, 0.0, 0.0, std::span<const double>(st, 1), IntegratorParams{},
                      [](double, double y) { return y <= 1.0; });
  EXPECT_TRUE(tr.truncated);
  EXPECT_NEAR(tr.exit_x, 1.0, 2e-3);
  EXPECT_THROW(integrate_to(F, 0.0, 0.0, 2.0, IntegratorParams{}, [](double, double y) { return y <= 1.0; }),
               TruncationError);
}

TEST(Integrator, NonConvergenceIsIntegrationError) {
  IntegratorParams p;
  p.tolerance = 0.0;
  p.max_refinements = 2;
  EXPECT_THROW(integrate_to([](double x, double) { return std::cos(40 * x); }, 0.0, 0.0, 1.0, p,
                            [](double, double) { return true; }),
               IntegrationError);
}

TEST(SampledField, LoadsAndInterpolates) {
  std::stringstream ss;
  ss << "# field y' = (y2, 1)\n2 2 3\n";
  for (double x : {-1.0, 1.0})
    for (double a : {0.0, 1.0})
      for (double b : {0.0, 0.5, 1.0}) ss << x << ' ' << a << ' ' << b << ' ' << b << " 1\n";
  const auto s = parse_sampled_field(ss, "mem");
  EXPECT_FALSE(s.autonomous());
  const Vec2 v = s(0.3, {0.4, 0.7});
  EXPECT_NEAR(v.c1, 0.7, 1e-14);
  EXPECT_NEAR(v.c2, 1.0, 1e-14);
  EXPECT_EQ(s.hull().x(), (Interval{-1.0, 1.0}));
  EXPECT_THROW(s(0.0, {2.0, 0.5}), DomainError);
}

TEST(SampledField, ReportsMalformedInputWithLine) {
  std::stringstream dup("1 2 2\n0 0 0 1 1\n0 0 0 1 1\n0 1 0 1 1\n0 1 1 1 1\n");
  try {
    parse_sampled_field(dup, "f.txt");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("f.txt:"), std::string::npos);
  }
  std::stringstream count("1 2 2\n0 0 0 1 1\n");
  EXPECT_THROW(parse_sampled_field(count), InputError);
  std::stringstream header("abc\n");
  EXPECT_THROW(parse_sampled_field(header), InputError);
  EXPECT_THROW(load_sampled_field("/nonexistent/field.txt"), InputError);
}

TEST(SampledField, SlopeFieldExtendsByProjectionOntoHull) {
  std::stringstream ss;
  ss << "2 2 2\n";
  for (double x : {-1.0, 1.0})
    for (double a : {0.0, 1.0})
      for (double b : {0.0, 1.0}) ss << x << ' ' << a << ' ' << b << ' ' << x + a << ' ' << b << '\n';
  const auto s = parse_sampled_field(ss, "mem");
  const auto F = slope_field_from_samples(s, "lin");
  const Vec2 out = F.F(-1.5, {1.2, -0.3});
  const Vec2 edge = s(-1.0, {1.0, 0.0});
  EXPECT_EQ(out.c1, edge.c1);
  EXPECT_EQ(out.c2, edge.c2);
  EXPECT_NEAR(F.F(0.2, {0.5, 0.5}).c1, 0.7, 1e-14);
}
