#pragma once

// Smoothing for laminations of R^2 by graphs.
//
// The transversal smoother h_delta equals j*delta on the grid leaf
// a = j*delta and, between grid leaves j and j+1, blends the two labels with
// the cutoff chi of the relative height
//
//   u = (y - f_{j delta}(x)) / (f_{(j+1) delta}(x) - f_{j delta}(x)),
//   h = j delta chi(u) + (j+1) delta (1 - chi(u)).
//
// The composite psi = sum_j phi(x, f_{j/J}(x)) Lambda_j(h_delta(x, y)) then
// approximates a partially smooth phi by a C^1 function.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "lamsmooth/cutoff.hpp"
#include "lamsmooth/domain.hpp"
#include "lamsmooth/errors.hpp"
#include "lamsmooth/families.hpp"
#include "lamsmooth/parallel.hpp"
#include "lamsmooth/projection.hpp"
#include "lamsmooth/report.hpp"

namespace lamsmooth {

// Bracketing cell of a height between grid leaves j*delta and (j+1)*delta.
struct GridCell {
  long j = 0;
  double lower = 0.0;  // height of leaf j*delta
  double upper = 0.0;  // height of leaf (j+1)*delta
  double u = 0.0;      // relative height in [0, 1]
};

namespace detail {

// Integer bisection for the largest j with leaf(j) <= target. `leaf(j)` is
// the height of grid leaf j at the fixed base point.
template <class LeafAt>
GridCell locate_cell(const LeafAt& leaf, long j_min, long j_max, double target) {
  if (j_max <= j_min) throw CoverageError("smoother grid has fewer than two leaves");
  const double f_min = leaf(j_min), f_max = leaf(j_max);
  if (!(target >= f_min && target <= f_max))
    throw CoverageError("height " + format_double(target) + " outside the grid leaves [" + format_double(f_min) +
                        ", " + format_double(f_max) + "]");
  long lo = j_min, hi = j_max;
  double f_lo = f_min, f_hi = f_max;
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    const double fm = leaf(mid);
    if (fm <= target) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
      f_hi = fm;
    }
  }
  const double gap = f_hi - f_lo;
  if (!(gap > 0.0))
    throw MonotonicityError("grid leaves " + std::to_string(lo) + " and " + std::to_string(hi) +
                            " do not have a positive gap");
  return {lo, f_lo, f_hi, std::clamp((target - f_lo) / gap, 0.0, 1.0)};
}

inline long grid_min(const Interval& params, double delta) {
  long j = static_cast<long>(std::ceil(params.lo / delta));
  while (static_cast<double>(j) * delta < params.lo) ++j;
  return j;
}

inline long grid_max(const Interval& params, double delta) {
  long j = static_cast<long>(std::floor(params.hi / delta));
  while (static_cast<double>(j) * delta > params.hi) --j;
  return j;
}

}  // namespace detail

inline double blend_labels(long j, double delta, const CutoffChi& chi, double u) {
  const double c = chi(u);
  return static_cast<double>(j) * delta * c + static_cast<double>(j + 1) * delta * (1.0 - c);
}

// Bound of Lemma-2 type on the derivative of the relative height,
//   L log 4 + 2 L log(1/delta) e^{L r}.
inline double relative_height_bound(double L, double delta, double r) {
  return L * std::log(4.0) + 2.0 * L * std::log(1.0 / delta) * std::exp(L * r);
}

// Bound on the leafwise derivative of h_delta: delta C_chi (relative_height_bound).
inline double h_delta_derivative_bound(double L, double delta, double c_chi, double r) {
  return delta * c_chi * relative_height_bound(L, delta, r);
}

class TransversalSmoother2D {
 public:
  TransversalSmoother2D(LeafFamily2D family, double delta, CutoffChi chi = CutoffChi{})
      : family_(std::move(family)), delta_(delta), chi_(chi) {
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    j_min_ = detail::grid_min(family_.params, delta_);
    j_max_ = detail::grid_max(family_.params, delta_);
    if (j_max_ <= j_min_) throw ParameterError("delta is larger than the parameter range of " + family_.name);
  }

  double delta() const { return delta_; }
  const CutoffChi& chi() const { return chi_; }
  const LeafFamily2D& family() const { return family_; }
  long j_min() const { return j_min_; }
  long j_max() const { return j_max_; }
  double grid_label(long j) const { return static_cast<double>(j) * delta_; }

  GridCell locate(double x, double y) const {
    return detail::locate_cell([&](long j) { return family_.value(grid_label(j), x); }, j_min_, j_max_, y);
  }

  double operator()(double x, double y) const {
    const GridCell c = locate(x, y);
    return blend_labels(c.j, delta_, chi_, c.u);
  }

  // d/dx h_delta(x, f_b(x)) at x0 by finite differences along the leaf b.
  double leafwise_derivative(double b, double x0, const Interval& base) const {
    const double h = kRelativeFdStep * base.width();
    require_stencil(base, x0, h);
    return richardson_derivative([&](double x) { return (*this)(x, family_.value(b, x)); }, x0, h);
  }

 private:
  LeafFamily2D family_;
  double delta_;
  CutoffChi chi_;
  long j_min_ = 0;
  long j_max_ = 0;
};

inline TransversalSmoother2D build_h_delta(const LeafFamily2D& family, double delta, CutoffChi chi = CutoffChi{}) {
  return TransversalSmoother2D(family, delta, chi);
}

inline double eval_h_leafwise_deriv(const TransversalSmoother2D& sm, double b, double x0, const Interval& base) {
  return sm.leafwise_derivative(b, x0, base);
}

// psi(x, y) = sum_j phi(x, f_{j/J}(x)) Lambda_j(h(x, y)) with h a smooth
// transversal approximation of pi. Only the two active terms are summed.
class CompositeApproximant2D {
 public:
  CompositeApproximant2D(PartialSmoothFunction2D phi, TransversalSmoother2D smoother, int J)
      : phi_(std::move(phi)), smoother_(std::move(smoother)), lambda_(J) {}

  const PartitionLambda& partition() const { return lambda_; }
  const TransversalSmoother2D& smoother() const { return smoother_; }

  double operator()(double x, double y) const {
    const auto act = lambda_.active(smoother_(x, y));
    double s = 0.0;
    if (act.w_k != 0.0) s += strand(act.k, x) * act.w_k;
    if (act.w_k1 != 0.0) s += strand(act.k + 1, x) * act.w_k1;
    return s;
  }

  // phi_j(x) = phi(x, f_{j/J}(x)).
  double strand(long j, double x) const {
    const double a = lambda_.node(j);
    const auto& fam = smoother_.family();
    if (!fam.params.contains(a))
      throw CoverageError("partition leaf " + format_double(a) + " outside the parameter range of " + fam.name);
    return phi_.value(x, fam.value(a, x));
  }

  double leafwise_derivative(double a, double x0, const Interval& base) const {
    const auto& fam = smoother_.family();
    return lamsmooth::leafwise_derivative([this](double x, double y) { return (*this)(x, y); }, fam, a, x0,
                                          base);
  }

 private:
  PartialSmoothFunction2D phi_;
  TransversalSmoother2D smoother_;
  PartitionLambda lambda_;
};

inline CompositeApproximant2D build_psi(const PartialSmoothFunction2D& phi, const TransversalSmoother2D& smoother,
                                        int J) {
  return CompositeApproximant2D(phi, smoother, J);
}

// Default spacing for the composite: the h_delta error stays well below the
// 1/J sampling error.
inline double default_delta_for(double eps, int J) { return std::min(eps, 1.0 / (double(J) * double(J))); }

struct SweepGrid {
  std::size_t nx = 512;
  std::size_t ny = 512;
  int workers = 1;
  double stencil_margin = kSamplingMargin;  // stencil room outside K, fraction of K's x-width

  std::string describe() const { return std::to_string(nx) + "x" + std::to_string(ny) + " grid"; }
};

inline Interval stencil_base(const Interval& kx, const Interval& family_base, double margin) {
  const double m = margin * kx.width();
  return {std::max(kx.lo - m, family_base.lo), std::min(kx.hi + m, family_base.hi)};
}

// Relative height d(x) = (f_b - f_{j delta}) / (f_{(j+1) delta} - f_{j delta}) of
// leaf b in its cell, and its derivative along x against
// L log 4 + 2 L log(1/delta) e^{L|x|}. Points below the hypothesis
// d >= 1/4 are skipped and recorded (h is locally constant there).
inline BoundReport check_lemma2(const LeafFamily2D& fam, double delta, double b, const std::vector<double>& xs,
                                double L, const Interval& base) {
  BoundReport rep;
  rep.name = "lemma2";
  rep.params.delta = delta;
  rep.params.L = L;
  const long j = static_cast<long>(std::floor(b / delta));
  const double a0 = static_cast<double>(j) * delta, a1 = static_cast<double>(j + 1) * delta;
  auto d = [&](double x) {
    const double f0 = fam.value(a0, x);
    return (fam.value(b, x) - f0) / (fam.value(a1, x) - f0);
  };
  const double h = kRelativeFdStep * base.width();
  ProfileBuilder prof;
  for (double x : xs) {
    require_stencil(base, x, h);
    if (d(x) < 0.25) {
      rep.skip();
      continue;
    }
    const double dd = std::abs(richardson_derivative(d, x, h));
    const double bound = relative_height_bound(L, delta, std::abs(x));
    rep.observe(dd, bound);
    prof.add(x, dd, bound);
  }
  if (rep.skipped > 0) rep.notes.push_back(std::to_string(rep.skipped) + " points below d >= 1/4 (plateau)");
  rep.profile = prof.points();
  rep.grid = std::to_string(xs.size()) + " x-stations on leaf b=" + format_double(b);
  return rep.finalize();
}

struct HDeltaReports {
  BoundReport c0;  // sup |h_delta - pi| against delta
  BoundReport c1;  // leafwise |d/dx h_delta| against delta C_chi (L log 4 + 2 L log(1/delta) e^{L r})
};

// Sup-norm and leafwise-derivative errors of h_delta against pi over a grid
// of K. With `radial_bound` the derivative bound uses r = max |x| over K,
// otherwise r = |x| at each sample.
inline HDeltaReports report_h_delta(const TransversalSmoother2D& sm, const Domain& K, double L,
                                    const SweepGrid& grid, bool radial_bound = true) {
  const auto& fam = sm.family();
  const Interval base = stencil_base(K.x(), fam.base, grid.stencil_margin);
  const auto xs = K.x().grid(grid.nx);
  const auto ys = K.y().grid(grid.ny);
  const double R = K.max_abs_x();
  const double delta = sm.delta();
  struct Sample {
    bool ok = false;
    double e0 = 0, e1 = 0, b1 = 0;
  };
  std::vector<Sample> out(xs.size() * ys.size());
  parallel_for(out.size(), grid.workers, [&](std::size_t i) {
    const double x = xs[i / ys.size()], y = ys[i % ys.size()];
    Sample s;
    try {
      const double b = project_pi(fam, x, y);
      s.e0 = std::abs(sm(x, y) - b);
      s.e1 = std::abs(sm.leafwise_derivative(b, x, base));
      s.b1 = h_delta_derivative_bound(L, delta, sm.chi().bound(), radial_bound ? R : std::abs(x));
      s.ok = true;
    } catch (const CoverageError&) {
    }
    out[i] = s;
  });
  HDeltaReports r;
  r.c0.name = "h_delta_c0";
  r.c1.name = "h_delta_c1";
  ProfileBuilder p1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out[i].ok) {
      r.c0.skip();
      r.c1.skip();
      continue;
    }
    r.c0.observe(out[i].e0, delta);
    r.c1.observe(out[i].e1, out[i].b1);
    p1.add(xs[i / ys.size()], out[i].e1, out[i].b1);
  }
  r.c1.profile = p1.points();
  for (auto* rep : {&r.c0, &r.c1}) {
    rep->params.delta = delta;
    rep->params.L = L;
    rep->params.R = R;
    rep->grid = grid.describe() + " over " + K.describe() + " (lower bound on sup)";
    rep->finalize();
  }
  return r;
}

struct Theorem1Reports {
  BoundReport c0;  // sup |psi - phi|
  BoundReport c1;  // sup |d/dx psi(x, f_a(x)) - d/dx phi(x, f_a(x))|
};

inline Theorem1Reports report_theorem1(const PartialSmoothFunction2D& phi, const CompositeApproximant2D& psi,
                                       const Domain& K, double eps, const SweepGrid& grid) {
  const auto& fam = psi.smoother().family();
  const Interval base = stencil_base(K.x(), fam.base, grid.stencil_margin);
  const auto xs = K.x().grid(grid.nx);
  const auto ys = K.y().grid(grid.ny);
  struct Sample {
    bool ok = false;
    double e0 = 0, e1 = 0;
  };
  std::vector<Sample> out(xs.size() * ys.size());
  parallel_for(out.size(), grid.workers, [&](std::size_t i) {
    const double x = xs[i / ys.size()], y = ys[i % ys.size()];
    Sample s;
    try {
      const double a = project_pi(fam, x, y);
      s.e0 = std::abs(psi(x, y) - phi.value(x, y));
      const double dphi =
          phi.leaf_derivative ? phi.leaf_derivative(x, y) : leafwise_derivative(phi.value, fam, a, x, base);
      s.e1 = std::abs(psi.leafwise_derivative(a, x, base) - dphi);
      s.ok = true;
    } catch (const CoverageError&) {
    }
    out[i] = s;
  });
  Theorem1Reports r;
  r.c0.name = "theorem1_c0";
  r.c1.name = "theorem1_c1";
  ProfileBuilder p0, p1;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out[i].ok) {
      r.c0.skip();
      r.c1.skip();
      continue;
    }
    r.c0.observe(out[i].e0, eps);
    r.c1.observe(out[i].e1, eps);
    p0.add(xs[i / ys.size()], out[i].e0, eps);
    p1.add(xs[i / ys.size()], out[i].e1, eps);
  }
  r.c0.profile = p0.points();
  r.c1.profile = p1.points();
  for (auto* rep : {&r.c0, &r.c1}) {
    rep->params.delta = psi.smoother().delta();
    rep->params.J = psi.partition().J();
    rep->grid = grid.describe() + " over " + K.describe() + " (lower bound on sup)";
    rep->finalize();
  }
  return r;
}

}  // namespace lamsmooth
