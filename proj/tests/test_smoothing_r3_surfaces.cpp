#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lamsmooth/catalog.hpp"
#include "lamsmooth/log_lipschitz.hpp"
#include "lamsmooth/smoothing_r3_surfaces.hpp"

using namespace lamsmooth;

TEST(SurfaceHDelta, Examples) {
  const auto flat = build_h_delta_surface(catalog::flat_surfaces(), 0.1);
  EXPECT_NEAR(flat(0.4, -0.7, 0.3), 0.3, 1e-15);
  const auto tilted = build_h_delta_surface(catalog::tilted_surfaces(), 0.1);
  for (double x : {-0.5, 0.2})
    for (double y : {-0.3, 0.6}) {
      EXPECT_NEAR(tilted(x, y, x + y + 0.31), 0.3, 1e-12);
      // Mid-gap with the cubic cutoff: (j + 1/2) delta.
      EXPECT_NEAR(tilted(x, y, x + y + 0.35), 0.35, 1e-12);
    }
}

TEST(SurfaceHDelta, PropertyDependsOnlyOnOffsetForTilted) {
  const auto sm = build_h_delta_surface(catalog::tilted_surfaces(), 0.05);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0), uc(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const double c = uc(rng), x = u(rng), y = u(rng);
    EXPECT_NEAR(sm(x, y, x + y + c), sm(0.0, 0.0, c), 1e-12);
  }
}

TEST(SurfaceGradientBounds, FlatAndTiltedAreZero) {
  const Domain base = Domain::plane({-1, 1}, {-1, 1});
  for (const auto& fam : {catalog::flat_surfaces(), catalog::tilted_surfaces()}) {
    const auto r = check_prop2_bounds(build_h_delta_surface(fam, 0.1), 0.37, base, 32, 1.45);
    EXPECT_TRUE(r.dx.pass && r.dy.pass);
    EXPECT_LE(r.dx.sup_measured, 1e-9);
    EXPECT_LE(r.dy.sup_measured, 1e-9);
  }
}

TEST(SurfaceGradientBounds, ProductCanonicalPasses) {
  const auto fam = catalog::osgood_surfaces();
  const Domain K = catalog::default_domain_surface(fam.name);
  const double L = estimate_log_lipschitz_L(fam, K).L_effective;
  const auto r = check_prop2_bounds(build_h_delta_surface(fam, 0.05), 0.525, Domain::plane(K.x(), K.y()), 128, L);
  EXPECT_TRUE(r.dx.pass);
  EXPECT_TRUE(r.dy.pass);
  EXPECT_GT(r.dx.sup_measured, 0.0);
  EXPECT_LE(r.dy.sup_measured, 1e-9);  // the family is constant in y
}

TEST(SurfaceComposite, Examples) {
  const auto fam = catalog::osgood_surfaces();
  const auto sm = build_h_delta_surface(fam, 1.0 / 64);
  const auto psi_x = build_psi_surface(catalog::phi3_x(), sm, 8);
  EXPECT_NEAR(psi_x(0.3, -0.2, fam.value(0.41, 0.3, -0.2)), 0.3, 1e-15);
  const auto psi_pi = build_psi_surface(catalog::phi3_pi(fam), sm, 8);
  for (int j = 1; j < 8; ++j) EXPECT_NEAR(psi_pi(-0.4, 0.5, fam.value(j / 8.0, -0.4, 0.5)), j / 8.0, 1e-12);
  const auto psi_z = build_psi_surface(catalog::phi3_z(), build_h_delta_surface(catalog::flat_surfaces(), 0.1), 10);
  EXPECT_NEAR(psi_z(0.7, -0.1, 0.35), 0.35, 1e-15);
}

TEST(SurfaceComposite, ErrorsWithinEpsilon) {
  const auto fam = catalog::osgood_surfaces();
  const Domain K = catalog::default_domain_surface(fam.name);
  const int J = 32;
  const auto psi = build_psi_surface(catalog::phi3_x(), build_h_delta_surface(fam, 1.0 / (J * J)), J);
  const auto r = report_theorem2(catalog::phi3_x(), psi, K, 0.01, 12);
  EXPECT_TRUE(r.c0.pass && r.c1x.pass && r.c1y.pass);
  EXPECT_LE(r.c0.sup_measured, 1e-15);
}

TEST(SurfaceHDeltaReport, BoundsHold) {
  const auto fam = catalog::osgood_surfaces();
  const Domain K = catalog::default_domain_surface(fam.name);
  const double L = estimate_log_lipschitz_L(fam, K).L_effective;
  double prev = 1.0;
  for (double delta : {0.1, 0.05}) {
    const auto r = report_h_delta_surface(build_h_delta_surface(fam, delta), K, L, 16);
    EXPECT_TRUE(r.c0.pass && r.c1x.pass && r.c1y.pass);
    EXPECT_LT(r.c0.sup_measured, prev);
    prev = r.c0.sup_measured;
  }
}
