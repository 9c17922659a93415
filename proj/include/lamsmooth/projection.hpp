#pragma once

// Leaf evaluation, the leaf-label map pi (by bisection on the parameter) and
// finite-difference derivatives along a single leaf.

#include <cmath>
#include <string>

#include "lamsmooth/domain.hpp"
#include "lamsmooth/errors.hpp"
#include "lamsmooth/families.hpp"

namespace lamsmooth {

struct ProjectionParams {
  double y_tolerance = 1e-10;
  int max_iterations = 200;
};

inline double leaf_eval(const LeafFamily2D& fam, double a, double x) {
  if (!fam.params.contains(a))
    throw DomainError("parameter a = " + format_double(a) + " outside the range of " + fam.name);
  if (!fam.base.contains(x))
    throw DomainError("x = " + format_double(x) + " outside the base range of " + fam.name);
  return fam.value(a, x);
}

inline double leaf_eval(const SurfaceFamily3D& fam, double a, double x, double y) {
  if (!fam.params.contains(a))
    throw DomainError("parameter a = " + format_double(a) + " outside the range of " + fam.name);
  return fam.value(a, x, y);
}

namespace detail {

// Bisection on a for the strictly increasing map a -> leaf(a) = target.
template <class Leaf>
double bisect_label(const Leaf& leaf, Interval range, double target, const ProjectionParams& p,
                    const std::string& what) {
  double lo = range.lo, hi = range.hi;
  const double f_lo = leaf(lo), f_hi = leaf(hi);
  if (!(target >= f_lo && target <= f_hi))
    throw CoverageError(what + " is not bracketed by the leaves a = " + format_double(lo) + " and a = " +
                        format_double(hi));
  if (target == f_lo) return lo;
  if (target == f_hi) return hi;
  for (int it = 0; it < p.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket is down to adjacent doubles
    const double fm = leaf(mid);
    if (fm == target) return mid;
    (fm < target ? lo : hi) = mid;
  }
  const double mid = 0.5 * (lo + hi);
  if (std::abs(leaf(mid) - target) > p.y_tolerance)
    throw NumericError("bisection for " + what + " did not reach tolerance");
  return mid;
}

}  // namespace detail

// pi(x, y): the label a of the leaf through (x, y).
inline double project_pi(const LeafFamily2D& fam, double x, double y, const ProjectionParams& p = {}) {
  if (!fam.base.contains(x)) throw DomainError("x = " + format_double(x) + " outside the base range");
  return detail::bisect_label([&](double a) { return fam.value(a, x); }, fam.params, y, p,
                              "point (" + format_double(x) + ", " + format_double(y) + ")");
}

inline double project_pi(const SurfaceFamily3D& fam, double x, double y, double z,
                         const ProjectionParams& p = {}) {
  return detail::bisect_label([&](double a) { return fam.value(a, x, y); }, fam.params, z, p,
                              "point (" + format_double(x) + ", " + format_double(y) + ", " +
                                  format_double(z) + ")");
}

// Central difference with one Richardson level:
//   D(h) = (g(x+h) - g(x-h)) / 2h,  result = D(h/2) + (D(h/2) - D(h)) / 3.
// Returns exactly zero when g is exactly constant on the stencil.
template <class G>
auto richardson_derivative(const G& g, double x0, double h) {
  const auto d1 = (g(x0 + h) - g(x0 - h)) * (1.0 / (2.0 * h));
  const auto d2 = (g(x0 + 0.5 * h) - g(x0 - 0.5 * h)) * (1.0 / h);
  return d2 + (d2 - d1) * (1.0 / 3.0);
}

inline constexpr double kRelativeFdStep = 1e-5;

inline void require_stencil(const Interval& base, double x0, double h) {
  if (!(x0 - h >= base.lo && x0 + h <= base.hi))
    throw DomainError("finite-difference stencil around " + format_double(x0) + " leaves [" +
                      format_double(base.lo) + ", " + format_double(base.hi) + "]");
}

// d/dx [phi(x, f_a(x))] at x0 by finite differences along the single leaf a.
// `base` is the x-range the stencil must stay in; the step is 1e-5 of its width.
inline double leafwise_derivative(const std::function<double(double, double)>& phi, const LeafFamily2D& fam,
                                  double a, double x0, const Interval& base) {
  const double h = kRelativeFdStep * base.width();
  require_stencil(base, x0, h);
  return richardson_derivative([&](double x) { return phi(x, fam.value(a, x)); }, x0, h);
}

inline double leafwise_derivative(const PartialSmoothFunction2D& phi, const LeafFamily2D& fam, double a,
                                  double x0, const Interval& base) {
  return leafwise_derivative(phi.value, fam, a, x0, base);
}

struct SurfaceGradient {
  double dx = 0.0;
  double dy = 0.0;
};

// Partials of phi(x, y, f_a(x, y)) along the surface a at (x0, y0).
inline SurfaceGradient leafwise_gradient(const std::function<double(double, double, double)>& phi,
                                         const SurfaceFamily3D& fam, double a, double x0, double y0,
                                         const Interval& xbase, const Interval& ybase) {
  const double hx = kRelativeFdStep * xbase.width();
  const double hy = kRelativeFdStep * ybase.width();
  require_stencil(xbase, x0, hx);
  require_stencil(ybase, y0, hy);
  SurfaceGradient g;
  g.dx = richardson_derivative([&](double x) { return phi(x, y0, fam.value(a, x, y0)); }, x0, hx);
  g.dy = richardson_derivative([&](double y) { return phi(x0, y, fam.value(a, x0, y)); }, y0, hy);
  return g;
}

}  // namespace lamsmooth
