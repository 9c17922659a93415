#pragma once

// Smoothing for laminations of R^3 by graph surfaces z = f_a(x, y). The
// construction is the one for curves in R^2 with (x, y) as base and z as the
// transversal coordinate; derivative bounds use the radial growth factor
// e^{L sqrt(x^2 + y^2)} with an enlarged constant L.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lamsmooth/cutoff.hpp"
#include "lamsmooth/domain.hpp"
#include "lamsmooth/families.hpp"
#include "lamsmooth/parallel.hpp"
#include "lamsmooth/projection.hpp"
#include "lamsmooth/report.hpp"
#include "lamsmooth/smoothing_r2.hpp"

namespace lamsmooth {

// Enlargement applied to the checked L when passing to the radial bound.
inline constexpr double kRadialLFactor = 1.5;

class TransversalSmoother3DS {
 public:
  TransversalSmoother3DS(SurfaceFamily3D family, double delta, CutoffChi chi = CutoffChi{})
      : family_(std::move(family)), delta_(delta), chi_(chi) {
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    j_min_ = detail::grid_min(family_.params, delta_);
    j_max_ = detail::grid_max(family_.params, delta_);
    if (j_max_ <= j_min_) throw ParameterError("delta is larger than the parameter range of " + family_.name);
  }

  double delta() const { return delta_; }
  const CutoffChi& chi() const { return chi_; }
  const SurfaceFamily3D& family() const { return family_; }
  double grid_label(long j) const { return static_cast<double>(j) * delta_; }

  GridCell locate(double x, double y, double z) const {
    return detail::locate_cell([&](long j) { return family_.value(grid_label(j), x, y); }, j_min_, j_max_, z);
  }

  double operator()(double x, double y, double z) const {
    const GridCell c = locate(x, y, z);
    return blend_labels(c.j, delta_, chi_, c.u);
  }

  // Partials of h_delta(x, y, f_b(x, y)) along the surface b.
  SurfaceGradient leafwise_gradient(double b, double x0, double y0, const Interval& xbase,
                                    const Interval& ybase) const {
    return lamsmooth::leafwise_gradient([this](double x, double y, double z) { return (*this)(x, y, z); },
                                        family_, b, x0, y0, xbase, ybase);
  }

 private:
  SurfaceFamily3D family_;
  double delta_;
  CutoffChi chi_;
  long j_min_ = 0;
  long j_max_ = 0;
};

inline TransversalSmoother3DS build_h_delta_surface(const SurfaceFamily3D& family, double delta,
                                                    CutoffChi chi = CutoffChi{}) {
  return TransversalSmoother3DS(family, delta, chi);
}

struct Prop2Reports {
  BoundReport dx;
  BoundReport dy;
  std::size_t plateau_points = 0;
};

// Measured partials of h_delta along the surface b over a grid of base points
// against delta C_chi (L' log 4 + 2 L' log(1/delta) e^{L' sqrt(x^2+y^2)}) with
// L' = l_factor * L. Points where the relative height of b is below 1/4 are
// counted as plateau points; their measured derivative is 0.
inline Prop2Reports check_prop2_bounds(const TransversalSmoother3DS& sm, double b, const Domain& base_box,
                                       std::size_t n, double L, double l_factor = kRadialLFactor,
                                       int workers = 1) {
  const auto& fam = sm.family();
  const Interval xb = stencil_base(base_box.x(), kWholeLine, kSamplingMargin);
  const Interval yb = stencil_base(base_box.y(), kWholeLine, kSamplingMargin);
  const auto xs = base_box.x().grid(n), ys = base_box.y().grid(n);
  const double Lr = l_factor * L;
  const double delta = sm.delta();
  struct Sample {
    double gx, gy, bound;
    bool plateau;
  };
  std::vector<Sample> out(xs.size() * ys.size());
  parallel_for(out.size(), workers, [&](std::size_t i) {
    const double x = xs[i / ys.size()], y = ys[i % ys.size()];
    const GridCell c = sm.locate(x, y, fam.value(b, x, y));
    const auto g = sm.leafwise_gradient(b, x, y, xb, yb);
    out[i] = {std::abs(g.dx), std::abs(g.dy),
              h_delta_derivative_bound(Lr, delta, sm.chi().bound(), std::hypot(x, y)), c.u < 0.25};
  });
  Prop2Reports r;
  r.dx.name = "prop2_dx";
  r.dy.name = "prop2_dy";
  ProfileBuilder px, py;
  for (std::size_t i = 0; i < out.size(); ++i) {
    r.dx.observe(out[i].gx, out[i].bound);
    r.dy.observe(out[i].gy, out[i].bound);
    px.add(xs[i / ys.size()], out[i].gx, out[i].bound);
    py.add(xs[i / ys.size()], out[i].gy, out[i].bound);
    if (out[i].plateau) ++r.plateau_points;
  }
  r.dx.profile = px.points();
  r.dy.profile = py.points();
  for (auto* rep : {&r.dx, &r.dy}) {
    rep->params.delta = delta;
    rep->params.L = Lr;
    rep->grid = std::to_string(n) + "x" + std::to_string(n) + " base grid on leaf b=" + format_double(b);
    rep->notes.push_back("L enlarged by factor " + format_double(l_factor) + " for the radial bound");
    rep->notes.push_back(std::to_string(r.plateau_points) + " plateau points (relative height < 1/4)");
    rep->finalize();
  }
  return r;
}

// psi(x, y, z) = sum_j phi(x, y, f_{j/J}(x, y)) Lambda_j(h_delta(x, y, z)).
class CompositeApproximant3DS {
 public:
  CompositeApproximant3DS(PartialSmoothFunction3D phi, TransversalSmoother3DS smoother, int J)
      : phi_(std::move(phi)), smoother_(std::move(smoother)), lambda_(J) {}

  const PartitionLambda& partition() const { return lambda_; }
  const TransversalSmoother3DS& smoother() const { return smoother_; }

  double operator()(double x, double y, double z) const {
    const auto act = lambda_.active(smoother_(x, y, z));
    double s = 0.0;
    if (act.w_k != 0.0) s += strand(act.k, x, y) * act.w_k;
    if (act.w_k1 != 0.0) s += strand(act.k + 1, x, y) * act.w_k1;
    return s;
  }

  double strand(long j, double x, double y) const {
    const double a = lambda_.node(j);
    const auto& fam = smoother_.family();
    if (!fam.params.contains(a))
      throw CoverageError("partition surface " + format_double(a) + " outside the parameter range of " +
                          fam.name);
    return phi_.value(x, y, fam.value(a, x, y));
  }

  SurfaceGradient leafwise_gradient(double a, double x0, double y0, const Interval& xbase,
                                    const Interval& ybase) const {
    return lamsmooth::leafwise_gradient([this](double x, double y, double z) { return (*this)(x, y, z); },
                                        smoother_.family(), a, x0, y0, xbase, ybase);
  }

 private:
  PartialSmoothFunction3D phi_;
  TransversalSmoother3DS smoother_;
  PartitionLambda lambda_;
};

inline CompositeApproximant3DS build_psi_surface(const PartialSmoothFunction3D& phi,
                                                 const TransversalSmoother3DS& smoother, int J) {
  return CompositeApproximant3DS(phi, smoother, J);
}

struct SurfaceErrorReports {
  BoundReport c0;
  BoundReport c1x;
  BoundReport c1y;
};

// Sup-norm and leafwise-gradient errors of psi against phi on a grid of K.
inline SurfaceErrorReports report_theorem2(const PartialSmoothFunction3D& phi, const CompositeApproximant3DS& psi,
                                           const Domain& K, double eps, std::size_t n, int workers = 1) {
  const auto& fam = psi.smoother().family();
  const Interval xb = stencil_base(K.x(), kWholeLine, kSamplingMargin);
  const Interval yb = stencil_base(K.y(), kWholeLine, kSamplingMargin);
  const auto xs = K.x().grid(n), ys = K.y().grid(n), zs = K.z().grid(n);
  struct Sample {
    bool ok = false;
    double e0 = 0, ex = 0, ey = 0;
  };
  std::vector<Sample> out(xs.size() * ys.size() * zs.size());
  parallel_for(out.size(), workers, [&](std::size_t i) {
    const double x = xs[i / (ys.size() * zs.size())], y = ys[(i / zs.size()) % ys.size()], z = zs[i % zs.size()];
    Sample s;
    try {
      const double a = project_pi(fam, x, y, z);
      s.e0 = std::abs(psi(x, y, z) - phi.value(x, y, z));
      const auto g = psi.leafwise_gradient(a, x, y, xb, yb);
      SurfaceGradient gp;
      if (phi.leaf_dx && phi.leaf_dy) {
        gp = {phi.leaf_dx(x, y, z), phi.leaf_dy(x, y, z)};
      } else {
        gp = lamsmooth::leafwise_gradient(phi.value, fam, a, x, y, xb, yb);
      }
      s.ex = std::abs(g.dx - gp.dx);
      s.ey = std::abs(g.dy - gp.dy);
      s.ok = true;
    } catch (const CoverageError&) {
    }
    out[i] = s;
  });
  SurfaceErrorReports r;
  r.c0.name = "theorem2_c0";
  r.c1x.name = "theorem2_c1x";
  r.c1y.name = "theorem2_c1y";
  for (const auto& s : out) {
    if (!s.ok) {
      r.c0.skip();
      r.c1x.skip();
      r.c1y.skip();
      continue;
    }
    r.c0.observe(s.e0, eps);
    r.c1x.observe(s.ex, eps);
    r.c1y.observe(s.ey, eps);
  }
  for (auto* rep : {&r.c0, &r.c1x, &r.c1y}) {
    rep->params.delta = psi.smoother().delta();
    rep->params.J = psi.partition().J();
    rep->grid = std::to_string(n) + "^3 grid over " + K.describe() + " (lower bound on sup)";
    rep->finalize();
  }
  return r;
}

// Sup |h_delta - pi| and sup leafwise partials of h_delta over a grid of K,
// the surface analogue of report_h_delta.
struct HDeltaSurfaceReports {
  BoundReport c0;
  BoundReport c1x;
  BoundReport c1y;
};

inline HDeltaSurfaceReports report_h_delta_surface(const TransversalSmoother3DS& sm, const Domain& K, double L,
                                                   std::size_t n, double l_factor = kRadialLFactor,
                                                   int workers = 1) {
  const auto& fam = sm.family();
  const Interval xb = stencil_base(K.x(), kWholeLine, kSamplingMargin);
  const Interval yb = stencil_base(K.y(), kWholeLine, kSamplingMargin);
  const auto xs = K.x().grid(n), ys = K.y().grid(n), zs = K.z().grid(n);
  const double Lr = l_factor * L;
  const double R = std::hypot(K.max_abs_x(), std::max(std::abs(K.y().lo), std::abs(K.y().hi)));
  const double bound = h_delta_derivative_bound(Lr, sm.delta(), sm.chi().bound(), R);
  struct Sample {
    bool ok = false;
    double e0 = 0, ex = 0, ey = 0;
  };
  std::vector<Sample> out(xs.size() * ys.size() * zs.size());
  parallel_for(out.size(), workers, [&](std::size_t i) {
    const double x = xs[i / (ys.size() * zs.size())], y = ys[(i / zs.size()) % ys.size()], z = zs[i % zs.size()];
    Sample s;
    try {
      const double b = project_pi(fam, x, y, z);
      s.e0 = std::abs(sm(x, y, z) - b);
      const auto g = sm.leafwise_gradient(b, x, y, xb, yb);
      s.ex = std::abs(g.dx);
      s.ey = std::abs(g.dy);
      s.ok = true;
    } catch (const CoverageError&) {
    }
    out[i] = s;
  });
  HDeltaSurfaceReports r;
  r.c0.name = "h_delta_c0";
  r.c1x.name = "h_delta_c1x";
  r.c1y.name = "h_delta_c1y";
  for (const auto& s : out) {
    if (!s.ok) {
      r.c0.skip();
      r.c1x.skip();
      r.c1y.skip();
      continue;
    }
    r.c0.observe(s.e0, sm.delta());
    r.c1x.observe(s.ex, bound);
    r.c1y.observe(s.ey, bound);
  }
  for (auto* rep : {&r.c0, &r.c1x, &r.c1y}) {
    rep->params.delta = sm.delta();
    rep->params.L = Lr;
    rep->params.R = R;
    rep->grid = std::to_string(n) + "^3 grid over " + K.describe() + " (lower bound on sup)";
    rep->finalize();
  }
  return r;
}

}  // namespace lamsmooth
