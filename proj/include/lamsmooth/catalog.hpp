#pragma once

// Closed-form example laminations used by the CLI, the sweeps and the tests.
//
//   flat              f_a(x) = a                    F = 0
//   affine            f_a(x) = a + x                F = 1
//   canonical-osgood  f_a(x) = a^(e^-x), 0 <= a <= 1 F = y log(1/y)
//   perturbed-affine  f_a(x) = a + a^2 sin x, a in [0, 1/4]
//
// The surface versions use (x, y) as base; the curves-in-R^3 versions use
// y = (y1, y2) with F = (y1 log(1/|y1|), 0) for canonical-osgood-3d.

#include <cmath>
#include <string>

#include "lamsmooth/domain.hpp"
#include "lamsmooth/errors.hpp"
#include "lamsmooth/families.hpp"
#include "lamsmooth/projection.hpp"

namespace lamsmooth::catalog {

// y log(1/|y|), continuous at 0. Log-Lipschitz but not Lipschitz there.
inline double osgood_slope(double y) { return y == 0.0 ? 0.0 : -y * std::log(std::abs(y)); }

// Solution of y' = y log(1/|y|) with y(0) = a.
inline double osgood_leaf(double a, double x) {
  if (a == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(a), std::exp(-x)), a);
}

// Inverse of osgood_leaf in a.
inline double osgood_label(double x, double y) {
  if (y == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(y), std::exp(x)), y);
}

inline LeafFamily2D flat() {
  return {"flat", [](double a, double) { return a; }, [](double, double) { return 0.0; },
          Interval{-4.0, 4.0}};
}

inline LeafFamily2D affine() {
  return {"affine", [](double a, double x) { return a + x; }, [](double, double) { return 1.0; },
          Interval{-4.0, 4.0}};
}

inline LeafFamily2D canonical_osgood() {
  return {"canonical-osgood", osgood_leaf,
          [](double a, double x) { return osgood_slope(osgood_leaf(a, x)); }, Interval{0.0, 1.0}};
}

inline LeafFamily2D perturbed_affine() {
  return {"perturbed-affine", [](double a, double x) { return a + a * a * std::sin(x); },
          [](double a, double x) { return a * a * std::cos(x); }, Interval{0.0, 0.25}};
}

inline SlopeField2D flat_field() { return {"flat", [](double, double) { return 0.0; }}; }
inline SlopeField2D affine_field() { return {"affine", [](double, double) { return 1.0; }}; }
inline SlopeField2D osgood_field() {
  return {"canonical-osgood", [](double, double y) { return osgood_slope(y); }};
}

inline SurfaceFamily3D flat_surfaces() {
  return {"flat", [](double a, double, double) { return a; }, [](double, double, double) { return 0.0; },
          [](double, double, double) { return 0.0; }, Interval{-4.0, 4.0}};
}

inline SurfaceFamily3D tilted_surfaces() {
  return {"affine", [](double a, double x, double y) { return a + x + y; },
          [](double, double, double) { return 1.0; }, [](double, double, double) { return 1.0; },
          Interval{-6.0, 6.0}};
}

// Canonical in x, constant in y.
inline SurfaceFamily3D osgood_surfaces() {
  return {"canonical-osgood", [](double a, double x, double) { return osgood_leaf(a, x); },
          [](double a, double x, double) { return osgood_slope(osgood_leaf(a, x)); },
          [](double, double, double) { return 0.0; }, Interval{0.0, 1.0}};
}

inline SurfaceFamily3D perturbed_surfaces() {
  return {"perturbed-affine", [](double a, double x, double) { return a + a * a * std::sin(x); },
          [](double a, double x, double) { return a * a * std::cos(x); },
          [](double, double, double) { return 0.0; }, Interval{0.0, 0.25}};
}

inline SlopeField3D flat_field3() { return {"flat", [](double, const Vec2&) { return Vec2{}; }, true}; }
inline SlopeField3D unit_field3() {
  return {"affine", [](double, const Vec2&) { return Vec2{1.0, 0.0}; }, true};
}
inline SlopeField3D osgood_field3() {
  return {"canonical-osgood-3d", [](double, const Vec2& y) { return Vec2{osgood_slope(y.c1), 0.0}; }, true};
}

inline CurveFamily3D flat_curves() {
  CurveFamily3D c;
  c.name = "flat";
  c.value = [](const Vec2& a, double) { return a; };
  c.slope = [](const Vec2&, double) { return Vec2{}; };
  c.project = [](double, const Vec2& y) { return y; };
  return c;
}

inline CurveFamily3D unit_curves() {
  CurveFamily3D c;
  c.name = "affine";
  c.value = [](const Vec2& a, double x) { return Vec2{a.c1 + x, a.c2}; };
  c.slope = [](const Vec2&, double) { return Vec2{1.0, 0.0}; };
  c.project = [](double x, const Vec2& y) { return Vec2{y.c1 - x, y.c2}; };
  return c;
}

inline CurveFamily3D osgood_curves() {
  CurveFamily3D c;
  c.name = "canonical-osgood-3d";
  c.value = [](const Vec2& a, double x) { return Vec2{osgood_leaf(a.c1, x), a.c2}; };
  c.slope = [](const Vec2& a, double x) { return Vec2{osgood_slope(osgood_leaf(a.c1, x)), 0.0}; };
  c.project = [](double x, const Vec2& y) { return Vec2{osgood_label(x, y.c1), y.c2}; };
  return c;
}

// Partially smooth test functions.
inline PartialSmoothFunction2D phi_x() {
  return {"x", [](double x, double) { return x; }, [](double, double) { return 1.0; }};
}

// phi(x, y) = y; its leafwise derivative is the slope field.
inline PartialSmoothFunction2D phi_y(std::function<double(double, double)> F = {}) {
  return {"y", [](double, double y) { return y; }, std::move(F)};
}

inline PartialSmoothFunction2D phi_pi(const LeafFamily2D& fam) {
  return {"pi", [fam](double x, double y) { return project_pi(fam, x, y); },
          [](double, double) { return 0.0; }};
}

inline PartialSmoothFunction3D phi3_x() {
  return {"x", [](double x, double, double) { return x; }, [](double, double, double) { return 1.0; },
          [](double, double, double) { return 0.0; }};
}

inline PartialSmoothFunction3D phi3_z() {
  return {"z", [](double, double, double z) { return z; }, {}, {}};
}

inline PartialSmoothFunction3D phi3_pi(const SurfaceFamily3D& fam) {
  return {"pi", [fam](double x, double y, double z) { return project_pi(fam, x, y, z); },
          [](double, double, double) { return 0.0; }, [](double, double, double) { return 0.0; }};
}

inline bool is_curve_family_id(const std::string& id) {
  return id == "canonical-osgood-3d" || id.rfind("slope-field:", 0) == 0;
}

inline LeafFamily2D family2d(const std::string& id) {
  if (id == "flat") return flat();
  if (id == "affine") return affine();
  if (id == "canonical-osgood") return canonical_osgood();
  if (id == "perturbed-affine") return perturbed_affine();
  throw InputError("unknown family id for curves in R^2: " + id);
}

inline SurfaceFamily3D surface_family(const std::string& id) {
  if (id == "flat") return flat_surfaces();
  if (id == "affine") return tilted_surfaces();
  if (id == "canonical-osgood") return osgood_surfaces();
  if (id == "perturbed-affine") return perturbed_surfaces();
  throw InputError("unknown family id for surfaces in R^3: " + id);
}

// Compact box K on which the family's checks run by default.
inline Domain default_domain2d(const std::string& id) {
  if (id == "perturbed-affine") return Domain::plane({-1.0, 1.0}, {0.01, 0.19});
  if (id == "canonical-osgood") return Domain::plane({-1.0, 1.0}, {0.05, 0.95});
  return Domain::plane({-1.0, 1.0}, {0.0, 1.0});
}

inline Domain default_domain_surface(const std::string& id) {
  if (id == "perturbed-affine") return Domain::space({-1.0, 1.0}, {-1.0, 1.0}, {0.01, 0.19});
  if (id == "canonical-osgood") return Domain::space({-1.0, 1.0}, {-1.0, 1.0}, {0.05, 0.95});
  return Domain::space({-1.0, 1.0}, {-1.0, 1.0}, {0.0, 1.0});
}

inline Domain default_domain_curves(const std::string&) {
  return Domain::space({-1.0, 1.0}, {0.05, 0.95}, {0.05, 0.95});
}

}  // namespace lamsmooth::catalog
