#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lamsmooth/catalog.hpp"
#include "lamsmooth/smoothing_r3_curves.hpp"

using namespace lamsmooth;

namespace {

const Domain kBox = Domain::space({-1, 1}, {-1, 1}, {-1, 1});

SmoothingParams with_L(double L = 1.45) {
  SmoothingParams p;
  p.L = L;
  return p;
}

SlopeField3D constant_field(Vec2 c) {
  return {"const", [c](double, const Vec2&) { return c; }, true};
}

}  // namespace

TEST(SmoothedField, ConstantFieldIsReproduced) {
  const auto sf = build_F_delta(constant_field({0.3, -1.2}), 0.1, kBox, with_L());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng);
    const Vec2 y{u(rng), u(rng)};
    const Vec2 v = sf(x, y);
    EXPECT_NEAR(v.c1, 0.3, 1e-15);
    EXPECT_NEAR(v.c2, -1.2, 1e-15);
    EXPECT_LE(operator_norm(sf.jacobian_y(x, y)), 1e-12);
  }
}

TEST(SmoothedField, LinearFieldAtMidpointIsTwoHalfWeights) {
  const SlopeField3D f{"lin", [](double, const Vec2& y) { return Vec2{y.c1, 0.0}; }, true};
  const double delta = 0.1;
  const auto sf = build_F_delta(f, delta, kBox, with_L());
  const double w = std::pow(std::cos(std::numbers::pi / 4), 2);
  for (long m : {-3L, 0L, 4L}) {
    const double y1 = (m + 0.5) * delta;
    const Vec2 v = sf(0.2, {y1, 0.37});
    EXPECT_NEAR(v.c1, w * m * delta + w * (m + 1) * delta, 1e-15);
    EXPECT_NEAR(v.c1, y1, 1e-15);
    EXPECT_EQ(v.c2, 0.0);
  }
}

TEST(SmoothedField, PropertyJacobianMatchesDifferences) {
  const auto sf = build_F_delta(catalog::osgood_field3(), 0.05, kBox, with_L(1.97));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int i = 0; i < 200; ++i) {
    const Vec2 y{u(rng), u(rng)};
    const double h = 1e-6;
    const Mat2 J = sf.jacobian_y(0.0, y);
    const Vec2 d1 = (sf(0.0, y + Vec2{h, 0}) - sf(0.0, y - Vec2{h, 0})) * (0.5 / h);
    const Vec2 d2 = (sf(0.0, y + Vec2{0, h}) - sf(0.0, y - Vec2{0, h})) * (0.5 / h);
    const Mat2 fd = Mat2::from_columns(d1, d2);
    EXPECT_LE(operator_norm(Mat2::from_columns(J * Vec2{1, 0} - fd * Vec2{1, 0}, J * Vec2{0, 1} - fd * Vec2{0, 1})),
              1e-5);
  }
}

TEST(SmoothedField, RejectsDeltaOutsideRange) {
  EXPECT_THROW(build_F_delta(catalog::osgood_field3(), 0.25, kBox), ParameterError);
  EXPECT_THROW(build_F_delta(catalog::osgood_field3(), 0.0, kBox), ParameterError);
  EXPECT_THROW(build_F_delta(catalog::osgood_field3(), 0.1, Domain::plane({0, 1}, {0, 1})), ParameterError);
}

TEST(SmoothedField, CanonicalSupAndJacobianBounds) {
  const Domain K = Domain::space({-1, 1}, {0.05, 0.95}, {0.05, 0.95});
  const auto sf = build_F_delta(catalog::osgood_field3(), 0.02, kBox);
  const auto r = report_lemma3(sf, K, 64);
  EXPECT_TRUE(r.c0.pass);
  EXPECT_TRUE(r.c1.pass);
  EXPECT_EQ(r.c0.params.C, sf.C());
  EXPECT_GE(sf.C(), sf.C_proof());
  // Independent sup on a grid offset from the report's grid.
  double sup = 0.0;
  for (int i = 0; i < 50; ++i)
    for (int k = 0; k < 50; ++k) {
      const Vec2 y{0.05 + 0.9 * (i + 0.37) / 50, 0.05 + 0.9 * (k + 0.61) / 50};
      sup = std::max(sup, distance(sf(0.0, y), catalog::osgood_field3().F(0.0, y)));
    }
  EXPECT_LE(sup, sf.C() * 0.02 * std::log(1 / 0.02));
}

TEST(Strand, ConstantAndLinear) {
  const auto c = mollify_strand(constant_field({2.0, 1.0}), 1, 2, 0.1, Interval{-1, 1});
  EXPECT_EQ(c.distance, 0.0);
  EXPECT_EQ(c(0.3).c1, 2.0);
  const SlopeField3D lin{"lin", [](double x, const Vec2&) { return Vec2{3.0 * x, -x}; }, false};
  const auto s = mollify_strand(lin, 0, 0, 0.1, Interval{-1, 1});
  EXPECT_EQ(s.width, 0.25);  // exact at the first width
  EXPECT_LE(s.distance, 1e-14);
  for (double x : {-0.9, 0.1, 0.77}) EXPECT_NEAR(s(x).c1, 3.0 * x, 1e-14);
}

TEST(Strand, OscillatingStrandWithinDelta) {
  const SlopeField3D f{"sin", [](double x, const Vec2&) { return Vec2{std::sin(5.0 * x), 0.0}; }, false};
  const double delta = 0.01;
  const auto s = mollify_strand(f, 0, 0, delta, Interval{-1.1, 1.1});
  // Oracle: second-order error estimate with the kernel's second moment.
  const auto& rule = detail::KernelRule::instance();
  double mu2 = 0.0;
  for (std::size_t i = 0; i < rule.u.size(); ++i) mu2 += rule.w[i] * rule.u[i] * rule.u[i];
  EXPECT_LT(std::pow(5.0 * s.width, 2) / 2.0 * mu2, delta);
  double sup = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = -1.1 + 2.2 * i / 10000.0;
    sup = std::max(sup, std::abs(s(x).c1 - std::sin(5.0 * x)));
  }
  EXPECT_LT(sup, delta);
  EXPECT_LE(sup, std::pow(5.0 * s.width, 2) / 2.0 * mu2 * 1.01);
}

TEST(Strand, GivesUpAfterMaxHalvings) {
  const SlopeField3D f{"sin", [](double x, const Vec2&) { return Vec2{std::sin(5.0 * x), 0.0}; }, false};
  MollifierParams p;
  p.max_halvings = 0;
  EXPECT_THROW(mollify_strand(f, 0, 0, 1e-3, Interval{-1, 1}, p), ConstructionError);
}

TEST(ApproxLeaf, TrivialFields) {
  const auto zero = build_F_delta(constant_field({0, 0}), 0.1, kBox, with_L());
  const auto unit = build_F_delta(constant_field({1, 0}), 0.1, kBox, with_L());
  const Vec2 a{0.2, -0.3};
  for (double x : {-0.5, 0.4}) {
    EXPECT_EQ(integrate_approx_leaf(zero, a, x), a);
    const Vec2 v = integrate_approx_leaf(unit, a, x);
    EXPECT_NEAR(v.c1, a.c1 + x, 1e-12);
    EXPECT_EQ(v.c2, a.c2);
  }
  EXPECT_THROW(integrate_approx_leaf(unit, a, 0.95), TruncationError);
}

TEST(ApproxLeaf, CanonicalCloseToTrueLeaf) {
  const double delta = 1e-3, L = 1.45;
  const auto sf = build_F_delta(catalog::osgood_field3(), delta, kBox, with_L(1.97));
  const Vec2 v = integrate_approx_leaf(sf, {0.25, 0.5}, std::log(2.0));
  EXPECT_EQ(v.c2, 0.5);
  const double bound = std::max(delta, std::pow(delta, std::exp(-2.0 * L * std::log(2.0))));
  EXPECT_LE(std::abs(v.c1 - 0.5), bound);
  EXPECT_LT(std::abs(v.c1 - 0.5), 1e-3);
}

TEST(ProjectPiDelta, TrivialFields) {
  const auto zero = build_F_delta(constant_field({0, 0}), 0.1, kBox, with_L());
  const auto unit = build_F_delta(constant_field({1, 0}), 0.1, kBox, with_L());
  const Vec2 y{0.3, 0.1};
  EXPECT_EQ(project_pi_delta(zero, 0.6, y), y);
  const Vec2 p = project_pi_delta(unit, 0.6, y);
  EXPECT_NEAR(p.c1, y.c1 - 0.6, 1e-12);
  EXPECT_EQ(p.c2, y.c2);
  EXPECT_THROW(project_pi_delta(unit, -0.9, {0.5, 0.0}), CoverageError);
}

TEST(ProjectPiDelta, PropertyRoundTrip) {
  const auto sf = build_F_delta(catalog::osgood_field3(), 1e-2, kBox, with_L(1.97));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ua(0.05, 0.6), ux(-0.3, 0.3);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 a{ua(rng), ua(rng)};
    const double x = ux(rng);
    const Vec2 y = integrate_approx_leaf(sf, a, x);
    worst = std::max(worst, distance(project_pi_delta(sf, x, y), a));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(LeafDeviationEnvelope, ZeroAndTightCases) {
  const double L = 1.5, delta = 1e-3;
  const auto xs = Interval{0, std::log(2.0) / (2 * L)}.grid(50);
  EXPECT_TRUE(check_lemma5([](double) { return 0.0; }, xs, L, delta).pass);
  const auto tight =
      check_lemma5([&](double x) { return std::pow(delta, std::exp(-2.0 * L * x)); }, xs, L, delta);
  EXPECT_TRUE(tight.pass);
  EXPECT_EQ(tight.margin, 0.0);
  EXPECT_GT(tight.samples, 0u);
  EXPECT_FALSE(check_lemma5([&](double x) { return 1.01 * std::pow(delta, std::exp(-2.0 * L * x)); }, xs, L, delta)
                   .pass);
  EXPECT_THROW(check_lemma5([](double) { return 0.0; }, xs, 1.4, delta), ParameterError);
}

TEST(LeafDeviationEnvelope, CanonicalPasses) {
  const double L = 1.5, delta = 1e-3;
  const auto sf = build_F_delta(catalog::osgood_field3(), delta, kBox, with_L(1.97));
  const auto r = check_lemma5(sf, catalog::osgood_curves(), {0.3, 0.6}, Interval{0, std::log(2.0) / (2 * L)}.grid(40), L);
  EXPECT_TRUE(r.pass);
}

TEST(LeafDeviation, WindowAndBound) {
  EXPECT_NEAR(corollary1_window(0.5, 1.45), std::log(2.0) / 2.9, 1e-15);
  EXPECT_NEAR(corollary1_window(0.5, 1.45), 0.239, 1e-3);
  const auto sf = build_F_delta(constant_field({0.5, 0.5}), 1e-2, kBox, with_L());
  CurveFamily3D fam;
  fam.value = [](const Vec2& a, double x) { return a + Vec2{0.5, 0.5} * x; };
  const auto r = check_corollary1(sf, fam, {{0.1, 0.2}, {-0.3, 0.0}}, 0.5, 1.45, 20);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.sup_measured, 1e-12);
}

TEST(LeafDeviation, ShrinksWithDelta) {
  const std::vector<Vec2> as{{0.2, 0.5}, {0.5, 0.5}, {0.8, 0.2}};
  double prev = kInf;
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const auto sf = build_F_delta(catalog::osgood_field3(), delta, kBox, with_L(1.97));
    const auto r = check_corollary1(sf, catalog::osgood_curves(), as, 0.5, 1.45, 20);
    EXPECT_TRUE(r.pass);
    EXPECT_LT(r.sup_measured, prev);
    prev = r.sup_measured;
  }
}

TEST(LeafSeparation, ZeroFieldIsExact) {
  const auto sf = build_F_delta(constant_field({0, 0}), 1e-2, kBox, with_L());
  const std::vector<LeafPair> pairs{{{0.1, 0.1}, {1e-4, 0.0}}, {{-0.2, 0.3}, {0.0, 2e-4}}};
  const auto r = check_leaf_separation(sf, pairs, Interval{-0.3, 0.3}.grid(7), sf.C());
  EXPECT_TRUE(r.lower.pass && r.upper.pass && r.rate.pass);
  // At x = 0 both envelopes collapse to ||da||; (a + da) - a only rounds.
  const auto at0 = check_leaf_separation(sf, pairs, {0.0}, sf.C(), 1, 1e-16);
  EXPECT_TRUE(at0.lower.pass && at0.upper.pass);
  EXPECT_NEAR(at0.lower.margin, 0.0, 1e-16);
  EXPECT_NEAR(at0.upper.margin, 0.0, 1e-16);
}

TEST(LeafSeparation, CanonicalPasses) {
  const auto sf = build_F_delta(catalog::osgood_field3(), 1e-3, kBox, with_L(1.97));
  std::vector<LeafPair> pairs;
  for (double a : {0.1, 0.4, 0.7}) pairs.push_back({{a, 0.5}, {1e-4 * std::cos(a), 1e-4 * std::sin(a)}});
  const auto r = check_leaf_separation(sf, pairs, Interval{-0.2, 0.2}.grid(21), sf.C());
  EXPECT_TRUE(r.lower.pass);
  EXPECT_TRUE(r.upper.pass);
  EXPECT_TRUE(r.rate.pass);
}

TEST(FinalBound, ZeroField) {
  const auto sf = build_F_delta(constant_field({0, 0}), 1e-2, kBox, with_L());
  const Mat2 G = grad_pi_delta(sf, 0.3, {0.1, 0.2});
  EXPECT_NEAR(operator_norm(G), 1.0, 1e-9);
  const auto r = check_grad_pi_and_final(sf, Domain::polydisk(0.2), 3, sf.C());
  EXPECT_TRUE(r.grad.pass && r.final.pass);
  EXPECT_EQ(r.final.sup_measured, 0.0);
}

TEST(FinalBound, IdentityMatchesDirectDifferences) {
  const auto sf = build_F_delta(catalog::osgood_field3(), 1e-2, kBox, with_L(1.97));
  const auto fam = catalog::osgood_curves();
  for (const Vec2 a : {Vec2{0.013, 0.021}, Vec2{-0.017, 0.004}}) {
    const double x0 = 0.0137;
    const Vec2 y = fam.value(a, x0);
    const Vec2 via_identity = grad_pi_delta(sf, x0, y) * (sf.field().F(x0, y) - sf(x0, y));
    const Vec2 direct = leafwise_derivative_pi_delta(sf, fam, a, x0, 1e-4);
    EXPECT_NEAR(norm(direct), norm(via_identity), 0.02 * norm(via_identity) + 1e-9);
  }
}

TEST(FinalBound, ShrinksFasterThanBoundRatio) {
  double value[2], bound[2];
  int i = 0;
  for (double delta : {1e-2, 1e-4}) {
    const auto sf = build_F_delta(catalog::osgood_field3(), delta, kBox, with_L(1.97));
    const auto rs = select_R(sf);
    EXPECT_LE(sf.C() * rs.R, 0.5);
    const auto r = check_grad_pi_and_final(sf, Domain::polydisk(rs.R), 5, sf.C());
    EXPECT_TRUE(r.grad.pass && r.final.pass);
    value[i] = r.final.sup_measured;
    bound[i] = r.final.bound;
    ++i;
  }
  EXPECT_LE(value[1] / value[0], 2.0 * bound[1] / bound[0]);
}

TEST(CompositeCurves, PartitionOfUnityInBothLabels) {
  const auto sf = build_F_delta(catalog::osgood_field3(), 1e-2, kBox, with_L(1.97));
  const CompositeApproximantCurves psi({"x", [](double x, const Vec2&) { return x; }}, catalog::osgood_curves(), sf, 8);
  EXPECT_NEAR(psi(0.05, {0.3, 0.4}), 0.05, 1e-15);
  const CompositeApproximantCurves lab({"a1", [](double x, const Vec2& y) { return catalog::osgood_label(x, y.c1); }},
                                       catalog::osgood_curves(), sf, 8);
  EXPECT_NEAR(lab(0.0, {0.375, 0.5}), 0.375, 1e-12);
}
