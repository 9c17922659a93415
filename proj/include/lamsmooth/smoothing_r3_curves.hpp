#pragma once

// Smoothing for laminations of R^3 by curves y = f_a(x), y, a in R^2. The
// slope field F is blended over a delta-grid in y from mollified strands
// x -> F(x, m delta, n delta); the leaves of the blended field F_delta define
// the projection pi_delta, whose leafwise derivative along the true leaves is
// the quantity driven to zero.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lamsmooth/cutoff.hpp"
#include "lamsmooth/domain.hpp"
#include "lamsmooth/errors.hpp"
#include "lamsmooth/families.hpp"
#include "lamsmooth/format.hpp"
#include "lamsmooth/log_lipschitz.hpp"
#include "lamsmooth/ode.hpp"
#include "lamsmooth/parallel.hpp"
#include "lamsmooth/projection.hpp"
#include "lamsmooth/report.hpp"
#include "lamsmooth/vec2.hpp"

namespace lamsmooth {

inline constexpr double kDefaultDelta0 = 0.25;

struct MollifierParams {
  double initial_width = 0.25;      // kernel half-width before halving
  std::size_t check_points = 1000;  // x-samples for the sup distance
  int max_halvings = 40;
};

struct SmoothingParams {
  double delta0 = kDefaultDelta0;
  MollifierParams mollifier;
  double L = kNaN;              // NaN: estimate L_effective on the box
  std::size_t fit_points = 12;  // per axis, for the empirical fit of C
  IntegratorParams integrator;
};

namespace detail {

using Quadrature = boost::math::quadrature::gauss<double, 20>;

inline double bump_kernel(double u) {
  const double q = 1.0 - u * u;
  return q <= 0.0 ? 0.0 : std::exp(-1.0 / q);
}

// Symmetric quadrature of the normalized kernel: the node pairs +-u carry
// equal weights, so linear functions are reproduced exactly.
struct KernelRule {
  std::vector<double> u;
  std::vector<double> w;

  static const KernelRule& instance() {
    static const KernelRule rule = [] {
      KernelRule r;
      const auto& abscissa = Quadrature::abscissa();
      const auto& weights = Quadrature::weights();
      double total = 0.0;
      for (std::size_t i = 0; i < abscissa.size(); ++i) {
        const double k = bump_kernel(abscissa[i]) * weights[i];
        if (abscissa[i] == 0.0) {
          r.u.push_back(0.0);
          r.w.push_back(k);
          total += k;
        } else {
          r.u.push_back(abscissa[i]);
          r.w.push_back(k);
          r.u.push_back(-abscissa[i]);
          r.w.push_back(k);
          total += 2.0 * k;
        }
      }
      for (double& v : r.w) v /= total;
      return r;
    }();
    return rule;
  }
};

}  // namespace detail

// x -> F(x, m delta, n delta) convolved with a bump kernel of half-width
// `width`. Constant strands (autonomous fields) are stored as their value.
struct MollifiedStrand {
  long m = 0;
  long n = 0;
  Vec2 node;
  Interval x_range;
  double width = 0.0;
  double distance = 0.0;  // sampled sup |F_mn - F(., node)|
  bool constant = false;
  Vec2 value;
  std::function<Vec2(double, const Vec2&)> F;

  Vec2 operator()(double x) const {
    if (constant) return value;
    const auto& rule = detail::KernelRule::instance();
    Vec2 s;
    for (std::size_t i = 0; i < rule.u.size(); ++i) s = s + F(x - width * rule.u[i], node) * rule.w[i];
    return s;
  }
};

inline double strand_distance(const MollifiedStrand& st, std::size_t points) {
  double d = 0.0;
  for (double x : st.x_range.grid(points)) d = std::max(d, distance(st(x), st.F(x, st.node)));
  return d;
}

// Shrinks the kernel by halving until the sampled sup distance to the raw
// strand is below delta.
inline MollifiedStrand mollify_strand(const SlopeField3D& field, long m, long n, double delta,
                                      const Interval& x_range, const MollifierParams& p = {}) {
  MollifiedStrand st;
  st.m = m;
  st.n = n;
  st.node = {static_cast<double>(m) * delta, static_cast<double>(n) * delta};
  st.x_range = x_range;
  st.F = field.F;
  if (field.autonomous) {
    st.constant = true;
    st.value = field.F(0.0, st.node);
    return st;
  }
  st.width = p.initial_width;
  double worst = kInf;
  for (int k = 0; k <= p.max_halvings; ++k) {
    st.distance = strand_distance(st, p.check_points);
    worst = std::min(worst, st.distance);
    if (st.distance < delta) return st;
    st.width *= 0.5;
  }
  throw ConstructionError("strand (" + std::to_string(m) + ", " + std::to_string(n) +
                          ") did not reach distance below delta = " + format_double(delta) +
                          "; best distance " + format_double(worst) + " (field not continuous in x at this scale?)");
}

// F_delta(x, y) = sum_{m,n} Lambda(pi (y1 - m delta) / (2 delta))
//                           Lambda(pi (y2 - n delta) / (2 delta)) F_mn(x).
// The grid covers the box plus one ring of nodes, so every y in the box has
// its four active nodes. Immutable once built; non-constant strands are
// mollified on first use and cached.
class SmoothedField {
 public:
  SmoothedField(SlopeField3D field, double delta, const Domain& box, const SmoothingParams& params = {})
      : s_(std::make_shared<State>()) {
    if (box.dimension() != 3) throw ParameterError("smoothed field needs a 3-dimensional box");
    if (!(delta > 0.0) || !(delta < params.delta0))
      throw ParameterError("delta = " + format_double(delta) + " must lie in (0, " + format_double(params.delta0) +
                           ")");
    s_->field = std::move(field);
    s_->delta = delta;
    s_->box = box;
    s_->params = params;
    s_->m_min = static_cast<long>(std::floor(box.y().lo / delta)) - 1;
    s_->m_max = static_cast<long>(std::ceil(box.y().hi / delta)) + 1;
    s_->n_min = static_cast<long>(std::floor(box.z().lo / delta)) - 1;
    s_->n_max = static_cast<long>(std::ceil(box.z().hi / delta)) + 1;
    if (std::isnan(params.L)) {
      LipschitzSampling ls;
      ls.random_pairs = 2000;
      s_->L = estimate_log_lipschitz_L(s_->field, box, ls).L_effective;
    } else {
      s_->L = params.L;
    }
    compute_constant();
  }

  double delta() const { return s_->delta; }
  const Domain& box() const { return s_->box; }
  const SlopeField3D& field() const { return s_->field; }
  const SmoothingParams& params() const { return s_->params; }
  double L() const { return s_->L; }
  // The construction constant: max of the proof-chain constant and the fit.
  double C() const { return s_->C; }
  double C_proof() const { return s_->C_proof; }
  double C_fit() const { return s_->C_fit; }
  const std::string& C_source() const { return s_->C_source; }
  long m_min() const { return s_->m_min; }
  long m_max() const { return s_->m_max; }
  long n_min() const { return s_->n_min; }
  long n_max() const { return s_->n_max; }

  // y-range on which F_delta is defined (box plus one ring).
  bool covers(const Vec2& y) const {
    const double d = s_->delta;
    return y.c1 >= s_->m_min * d && y.c1 <= s_->m_max * d && y.c2 >= s_->n_min * d && y.c2 <= s_->n_max * d;
  }
  bool in_box(const Vec2& y) const { return s_->box.y().contains(y.c1) && s_->box.z().contains(y.c2); }

  std::shared_ptr<const MollifiedStrand> mollified(long m, long n) const {
    return s_->cache.get(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n), [&] {
      return mollify_strand(s_->field, m, n, s_->delta, strand_range(), s_->params.mollifier);
    });
  }

  Vec2 strand(long m, long n, double x) const {
    if (m < s_->m_min || m > s_->m_max || n < s_->n_min || n > s_->n_max)
      throw DomainError("grid node (" + std::to_string(m) + ", " + std::to_string(n) + ") outside the grid");
    if (s_->field.autonomous) {
      const double d = s_->delta;
      return s_->field.F(0.0, {static_cast<double>(m) * d, static_cast<double>(n) * d});
    }
    return (*mollified(m, n))(x);
  }

  Vec2 operator()(double x, const Vec2& y) const {
    const Cell c = cell(y);
    Vec2 s;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double w = c.w1[i] * c.w2[j];
        if (w != 0.0) s = s + strand(c.m + i, c.n + j, x) * w;
      }
    return s;
  }

  // Columns are dF_delta/dy1 and dF_delta/dy2.
  Mat2 jacobian_y(double x, const Vec2& y) const {
    const Cell c = cell(y);
    Vec2 d1, d2;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const Vec2 v = strand(c.m + i, c.n + j, x);
        d1 = d1 + v * (c.dw1[i] * c.w2[j]);
        d2 = d2 + v * (c.w1[i] * c.dw2[j]);
      }
    return Mat2::from_columns(d1, d2);
  }

  Interval strand_range() const {
    const Interval xr = s_->box.x();
    const double pad = kSamplingMargin * xr.width();
    return {xr.lo - pad, xr.hi + pad};
  }

  std::size_t cached_strands() const { return s_->cache.size(); }

 private:
  struct Cell {
    long m, n;
    double w1[2], w2[2], dw1[2], dw2[2];
  };

  Cell cell(const Vec2& y) const {
    if (!covers(y))
      throw DomainError("y = (" + format_double(y.c1) + ", " + format_double(y.c2) +
                        ") outside the smoothing grid");
    const double d = s_->delta;
    Cell c;
    auto axis = [&](double v, long lo, long hi, long& k, double* w, double* dw) {
      double t = std::floor(v / d);
      k = std::clamp(static_cast<long>(t), lo, hi - 1);
      const double s = v / d - static_cast<double>(k);
      const double cs = std::cos(0.5 * std::numbers::pi * s);
      const double sn = std::sin(0.5 * std::numbers::pi * s);
      w[0] = cs * cs;
      w[1] = sn * sn;
      const double dv = 0.5 * std::numbers::pi / d * std::sin(std::numbers::pi * s);
      dw[0] = -dv;
      dw[1] = dv;
    };
    axis(y.c1, s_->m_min, s_->m_max, c.m, c.w1, c.dw1);
    axis(y.c2, s_->n_min, s_->n_max, c.n, c.w2, c.dw2);
    return c;
  }

  // C_proof covers, for every delta < delta0,
  //   4 delta + 8 L delta log(1/(2 delta)) <= C delta log(1/delta)
  // and, from |d/dy_k F_delta| <= pi/(2 delta) (2 delta + L delta log(1/delta))
  // per column, ||J_y F_delta|| <= sqrt(2) (pi + pi L/2 log(1/delta)) <= C/2 log(1/delta).
  void compute_constant() {
    const double L = s_->L;
    const double l0 = std::log(1.0 / s_->params.delta0);
    const double c_value = 8.0 * L + 4.0 / l0;
    const double c_jac = 2.0 * std::numbers::sqrt2 * std::numbers::pi * (1.0 / l0 + 0.5 * L);
    s_->C_proof = std::max(c_value, c_jac);

    const double d = s_->delta;
    const double ld = std::log(1.0 / d);
    const Domain& b = s_->box;
    const std::size_t n = std::max<std::size_t>(2, s_->params.fit_points);
    const auto xs = s_->field.autonomous ? std::vector<double>{b.x().mid()} : b.x().grid(n);
    double fit = 0.0;
    for (double x : xs)
      for (double y1 : b.y().grid(n))
        for (double y2 : b.z().grid(n)) {
          const Vec2 y{y1, y2};
          fit = std::max(fit, distance((*this)(x, y), s_->field.F(x, y)) / (d * ld));
          fit = std::max(fit, 2.0 * operator_norm(jacobian_y(x, y)) / ld);
        }
    s_->C_fit = fit;
    s_->C = std::max(s_->C_proof, s_->C_fit);
    s_->C_source = s_->C_fit > s_->C_proof ? "fit" : "proof";
  }

  struct State {
    SlopeField3D field;
    double delta = 0.0;
    Domain box;
    SmoothingParams params;
    double L = 0.0;
    double C = 0.0, C_proof = 0.0, C_fit = 0.0;
    std::string C_source;
    long m_min = 0, m_max = 0, n_min = 0, n_max = 0;
    LeafCache<MollifiedStrand> cache{1u << 20};
  };
  std::shared_ptr<State> s_;
};

inline SmoothedField build_F_delta(const SlopeField3D& field, double delta, const Domain& box,
                                   const SmoothingParams& params = {}) {
  return SmoothedField(field, delta, box, params);
}

inline IntegratorParams leaf_integrator(const SmoothedField& sf) {
  IntegratorParams p = sf.params().integrator;
  p.max_step = step_for_delta(sf.delta(), p.max_step);
  return p;
}

namespace detail {

inline auto field_fn(const SmoothedField& sf) {
  return [&sf](double x, const Vec2& y) { return sf(x, y); };
}
inline auto inside_fn(const SmoothedField& sf) {
  return [&sf](double, const Vec2& y) { return sf.in_box(y); };
}

}  // namespace detail

// f_a^delta(x): the solution of y' = F_delta(x, y), y(0) = a.
inline Vec2 integrate_approx_leaf(const SmoothedField& sf, const Vec2& a, double x) {
  return integrate_to(detail::field_fn(sf), 0.0, a, x, leaf_integrator(sf), detail::inside_fn(sf));
}

// f_a^delta at sorted stations (any sign). Stations beyond an exit from the
// box are reported missing (NaN) rather than thrown.
struct ApproxLeaf {
  std::vector<double> xs;
  std::vector<Vec2> ys;
  std::vector<bool> reached;
  bool truncated = false;
};

inline ApproxLeaf approx_leaf_at(const SmoothedField& sf, const Vec2& a, const std::vector<double>& xs) {
  ApproxLeaf out;
  out.xs = xs;
  out.ys.assign(xs.size(), Vec2{kNaN, kNaN});
  out.reached.assign(xs.size(), false);
  std::vector<double> fwd, bwd;
  std::vector<std::size_t> fi, bi;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] >= 0.0) {
      fwd.push_back(xs[i]);
      fi.push_back(i);
    } else {
      bwd.push_back(xs[i]);
      bi.push_back(i);
    }
  }
  std::vector<std::size_t> order(bwd.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return bwd[p] > bwd[q]; });
  std::vector<double> bsorted;
  std::vector<std::size_t> bidx;
  for (auto k : order) {
    bsorted.push_back(bwd[k]);
    bidx.push_back(bi[k]);
  }
  std::vector<std::size_t> forder(fwd.size());
  for (std::size_t i = 0; i < forder.size(); ++i) forder[i] = i;
  std::sort(forder.begin(), forder.end(), [&](std::size_t p, std::size_t q) { return fwd[p] < fwd[q]; });
  std::vector<double> fsorted;
  std::vector<std::size_t> fidx;
  for (auto k : forder) {
    fsorted.push_back(fwd[k]);
    fidx.push_back(fi[k]);
  }
  const auto params = leaf_integrator(sf);
  auto run = [&](const std::vector<double>& st, const std::vector<std::size_t>& idx) {
    if (st.empty()) return;
    auto tr = integrate(detail::field_fn(sf), 0.0, a, std::span<const double>(st), params, detail::inside_fn(sf));
    for (std::size_t k = 0; k < tr.xs.size(); ++k) {
      out.ys[idx[k]] = tr.ys[k];
      out.reached[idx[k]] = true;
    }
    out.truncated = out.truncated || tr.truncated;
  };
  run(fsorted, fidx);
  run(bsorted, bidx);
  return out;
}

// pi_delta(x, y): the value at x = 0 of the F_delta-solution through (x, y).
inline Vec2 project_pi_delta(const SmoothedField& sf, double x, const Vec2& y) {
  if (x == 0.0) return y;
  const double st[1] = {0.0};
  auto tr = integrate(detail::field_fn(sf), x, y, std::span<const double>(st, 1), leaf_integrator(sf),
                      detail::inside_fn(sf));
  if (tr.truncated)
    throw CoverageError("backward solution from x = " + format_double(x) + " leaves the box at x = " +
                        format_double(tr.exit_x) + "; R too large for this delta");
  return tr.ys.back();
}

inline double grad_pi_step(double delta) { return std::max(1e-6, delta / 100.0); }

// Columns are d pi_delta / dy1 and d pi_delta / dy2 by central differences.
inline Mat2 grad_pi_delta(const SmoothedField& sf, double x, const Vec2& y) {
  const double h = grad_pi_step(sf.delta());
  const Vec2 d1 = (project_pi_delta(sf, x, y + Vec2{h, 0.0}) - project_pi_delta(sf, x, y - Vec2{h, 0.0})) *
                  (0.5 / h);
  const Vec2 d2 = (project_pi_delta(sf, x, y + Vec2{0.0, h}) - project_pi_delta(sf, x, y - Vec2{0.0, h})) *
                  (0.5 / h);
  return Mat2::from_columns(d1, d2);
}

// d/dx pi_delta(x, f_a(x)) at x0 by finite differences along the true leaf a.
inline Vec2 leafwise_derivative_pi_delta(const SmoothedField& sf, const CurveFamily3D& fam, const Vec2& a,
                                         double x0, double h) {
  auto g = [&](double x) { return project_pi_delta(sf, x, fam.value(a, x)); };
  return (g(x0 + h) - g(x0 - h)) * (0.5 / h);
}

struct Lemma3Reports {
  BoundReport c0;  // ||F_delta - F|| vs C delta log(1/delta)
  BoundReport c1;  // ||J_y F_delta|| vs C/2 log(1/delta)
};

inline void tag(BoundReport& r, const SmoothedField& sf) {
  r.params.delta = sf.delta();
  r.params.L = sf.L();
  r.params.C = sf.C();
}

// Dense-grid sup of both Lemma-3 quantities over K; the Jacobian is measured
// by central differences in y. Autonomous fields are sampled at a single x.
inline Lemma3Reports report_lemma3(const SmoothedField& sf, const Domain& K, std::size_t n, int workers = 1) {
  const double d = sf.delta();
  const double ld = std::log(1.0 / d);
  const bool collapse = sf.field().autonomous;
  const auto xs = collapse ? std::vector<double>{K.x().mid()} : K.x().grid(n);
  const auto y1s = K.y().grid(n), y2s = K.z().grid(n);
  const double h = 1e-4 * d;
  struct Sample {
    double e0, e1;
  };
  std::vector<Sample> out(xs.size() * y1s.size() * y2s.size());
  parallel_for(out.size(), workers, [&](std::size_t i) {
    const double x = xs[i / (y1s.size() * y2s.size())];
    const Vec2 y{y1s[(i / y2s.size()) % y1s.size()], y2s[i % y2s.size()]};
    auto fd = [&](const Vec2& e) {
      auto g = [&](double t) { return sf(x, y + e * t); };
      const Vec2 c1 = (g(h) - g(-h)) * (0.5 / h);
      const Vec2 c2 = (g(0.5 * h) - g(-0.5 * h)) * (1.0 / h);
      return c2 + (c2 - c1) * (1.0 / 3.0);
    };
    const Mat2 J = Mat2::from_columns(fd({1.0, 0.0}), fd({0.0, 1.0}));
    out[i] = {distance(sf(x, y), sf.field().F(x, y)), operator_norm(J)};
  });
  Lemma3Reports r;
  r.c0.name = "lemma3_sup";
  r.c1.name = "lemma3_jacobian";
  const double b0 = sf.C() * d * ld, b1 = 0.5 * sf.C() * ld;
  for (const auto& s : out) {
    r.c0.observe(s.e0, b0);
    r.c1.observe(s.e1, b1);
  }
  const std::string grid = collapse ? std::to_string(n) + "^2 y-grid over " + K.describe() +
                                          " (autonomous field: single x)"
                                    : std::to_string(n) + "^3 grid over " + K.describe();
  for (auto* rep : {&r.c0, &r.c1}) {
    tag(*rep, sf);
    rep->grid = grid;
    rep->notes.push_back("C = " + format_double(sf.C()) + " (" + sf.C_source() + "; proof " +
                         format_double(sf.C_proof()) + ", fit " + format_double(sf.C_fit()) + ")");
    rep->finalize();
  }
  return r;
}

// R for the polydisk D_R: min(R0, 1/(2C)), clipped to the box, then halved
// until every probe point of D_R has a backward solution reaching x = 0 with
// ||pi_delta|| < 1 and |x| <= 1.
struct RSelection {
  double R = 0.0;
  double initial = 0.0;
  int halvings = 0;
  std::vector<std::string> notes;
};

inline RSelection select_R(const SmoothedField& sf, double R0 = 1.0, std::size_t probes = 5) {
  RSelection s;
  const Domain& b = sf.box();
  double R = std::min({R0, 1.0 / (2.0 * sf.C()), 1.0, std::abs(b.x().lo), std::abs(b.x().hi)});
  R = std::min({R, -b.y().lo, b.y().hi, -b.z().lo, b.z().hi});
  if (!(R > 0.0)) throw ParameterError("box does not contain a polydisk around the origin");
  s.initial = R;
  for (int k = 0; k < 40; ++k) {
    bool ok = true;
    const Domain D = Domain::polydisk(R);
    for (double x : D.x().grid(probes)) {
      for (double y1 : D.y().grid(probes)) {
        for (double y2 : D.z().grid(probes)) {
          try {
            const Vec2 a = project_pi_delta(sf, x, {y1, y2});
            if (!(norm(a) < 1.0)) ok = false;
          } catch (const CoverageError&) {
            ok = false;
          }
          if (!ok) break;
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    if (ok) {
      s.R = R;
      s.notes.push_back("R = " + format_double(R) + " (C R = " + format_double(sf.C() * R) + ", " +
                        std::to_string(s.halvings) + " halvings)");
      return s;
    }
    R *= 0.5;
    ++s.halvings;
  }
  throw CoverageError("no polydisk around the origin lies in the approximate lamination");
}

// phi(x) <= delta^(e^{-2L|x|}) wherever delta < phi < 1/2; points with
// phi <= delta satisfy the bound outright and are counted separately. With
// no point in the hypothesis window the report is a flagged vacuous pass.
inline BoundReport check_lemma5(const std::vector<double>& xs, const std::vector<double>& phi, double L,
                                double delta) {
  if (!(L * std::log(2.0) > 1.0)) throw ParameterError("check needs L log 2 > 1, got L = " + format_double(L));
  BoundReport r;
  r.name = "lemma5";
  r.params.delta = delta;
  r.params.L = L;
  std::size_t below = 0, above = 0;
  ProfileBuilder p;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i], v = phi[i];
    const double bound = std::pow(delta, std::exp(-2.0 * L * std::abs(x)));
    p.add(x, v, bound);
    if (v <= delta) {
      ++below;
    } else if (v < 0.5) {
      r.observe(v, bound);
    } else {
      ++above;
      r.skip();
    }
  }
  r.profile = p.points();
  r.grid = std::to_string(xs.size()) + " stations";
  r.notes.push_back(std::to_string(below) + " stations with phi <= delta (pass outright)");
  if (above) r.notes.push_back(std::to_string(above) + " stations with phi >= 1/2 (outside hypotheses)");
  return r.finalize();
}

inline BoundReport check_lemma5(const std::function<double(double)>& phi, const std::vector<double>& xs, double L,
                                double delta) {
  std::vector<double> v;
  for (double x : xs) v.push_back(phi(x));
  return check_lemma5(xs, v, L, delta);
}

// phi_a^delta(x) = ||f_a^delta(x) - f_a(x)|| along the leaves of a.
inline std::vector<double> leaf_deviation(const SmoothedField& sf, const CurveFamily3D& fam, const Vec2& a,
                                          const std::vector<double>& xs, std::vector<bool>* reached = nullptr) {
  const ApproxLeaf leaf = approx_leaf_at(sf, a, xs);
  std::vector<double> phi(xs.size(), kNaN);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (leaf.reached[i]) phi[i] = distance(leaf.ys[i], fam.value(a, xs[i]));
  if (reached) *reached = leaf.reached;
  return phi;
}

inline BoundReport check_lemma5(const SmoothedField& sf, const CurveFamily3D& fam, const Vec2& a,
                                const std::vector<double>& xs, double L) {
  std::vector<bool> reached;
  const auto phi = leaf_deviation(sf, fam, a, xs, &reached);
  std::vector<double> xr;
  std::vector<double> vr;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (reached[i]) {
      xr.push_back(xs[i]);
      vr.push_back(phi[i]);
    }
  auto r = check_lemma5(xr, vr, L, sf.delta());
  tag(r, sf);
  if (xr.size() < xs.size()) r.notes.push_back(std::to_string(xs.size() - xr.size()) + " stations beyond a box exit");
  return r;
}

inline double corollary1_window(double tau, double L) { return std::log(1.0 / tau) / (2.0 * L); }

// max over leaves and stations of phi_a^delta(x) vs delta^tau on
// |x| <= log(1/tau)/(2L).
inline BoundReport check_corollary1(const SmoothedField& sf, const CurveFamily3D& fam, const std::vector<Vec2>& as,
                                    double tau, double L, std::size_t stations = 100, int workers = 1) {
  if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("tau must lie in (0, 1)");
  const double delta = sf.delta();
  const double bound = std::pow(delta, tau);
  if (!(bound < 0.5)) throw ParameterError("delta^tau must be below 1/2");
  const double W = corollary1_window(tau, L);
  const auto xs = Interval{-W, W}.grid(stations);
  std::vector<std::vector<double>> phis(as.size());
  parallel_for(as.size(), workers, [&](std::size_t i) { phis[i] = leaf_deviation(sf, fam, as[i], xs); });
  BoundReport r;
  r.name = "corollary1";
  tag(r, sf);
  r.params.tau = tau;
  r.params.L = L;
  ProfileBuilder p;
  for (const auto& phi : phis)
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (std::isnan(phi[k])) {
        r.skip("leaf left the box inside the window");
        continue;
      }
      r.observe(phi[k], bound);
      p.add(xs[k], phi[k], bound);
    }
  r.profile = p.points();
  r.grid = std::to_string(as.size()) + " leaves x " + std::to_string(stations) + " stations on |x| <= " +
           format_double(W);
  return r.finalize();
}

struct LeafSeparationReports {
  BoundReport lower;  // delta^{C|x|} ||da|| <= ||df||
  BoundReport upper;  // ||df|| <= delta^{-C|x|} ||da||
  BoundReport rate;   // ||d/dx df|| <= C log(1/delta) ||df||
};

struct LeafPair {
  Vec2 a;
  Vec2 da;
};

inline LeafSeparationReports check_leaf_separation(const SmoothedField& sf, const std::vector<LeafPair>& pairs,
                                                   const std::vector<double>& xs, double C, int workers = 1,
                                                   double slack = 1e-9) {
  const double delta = sf.delta();
  const double ld = std::log(1.0 / delta);
  struct Row {
    double x, lo, df, hi, ddf, rate_bound;
    bool ok;
  };
  std::vector<std::vector<Row>> rows(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t i) {
    const auto& pr = pairs[i];
    const ApproxLeaf l0 = approx_leaf_at(sf, pr.a, xs);
    const ApproxLeaf l1 = approx_leaf_at(sf, pr.a + pr.da, xs);
    const double nda = norm(pr.da);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      Row row{xs[k], 0, 0, 0, 0, 0, l0.reached[k] && l1.reached[k]};
      if (row.ok) {
        const double x = xs[k];
        const Vec2 df = l1.ys[k] - l0.ys[k];
        row.df = norm(df);
        row.lo = std::pow(delta, C * std::abs(x)) * nda;
        row.hi = std::pow(delta, -C * std::abs(x)) * nda;
        row.ddf = distance(sf(x, l1.ys[k]), sf(x, l0.ys[k]));
        row.rate_bound = C * ld * row.df;
      }
      rows[i].push_back(row);
    }
  });
  LeafSeparationReports r;
  r.lower.name = "leaf_separation_lower";
  r.upper.name = "leaf_separation_upper";
  r.rate.name = "leaf_separation_rate";
  ProfileBuilder pl, pu;
  for (const auto& v : rows)
    for (const auto& row : v) {
      if (!row.ok) {
        r.lower.skip("leaf left the box");
        r.upper.skip();
        r.rate.skip();
        continue;
      }
      r.lower.observe(row.lo, row.df);
      r.upper.observe(row.df, row.hi);
      r.rate.observe(row.ddf, row.rate_bound);
      pl.add(row.x, row.lo, row.df);
      pu.add(row.x, row.df, row.hi);
    }
  r.lower.profile = pl.points();
  r.upper.profile = pu.points();
  for (auto* rep : {&r.lower, &r.upper, &r.rate}) {
    tag(*rep, sf);
    rep->params.C = C;
    rep->slack = slack;
    rep->grid = std::to_string(pairs.size()) + " leaf pairs x " + std::to_string(xs.size()) + " stations";
    rep->notes.push_back("the exponent constant is taken to be the smoothing constant C");
    rep->finalize();
  }
  return r;
}

struct FinalBoundReports {
  BoundReport grad;   // ||grad_y pi_delta|| vs 2/sqrt(delta)
  BoundReport final;  // ||d/dx pi_delta(x, f_a(x))|| vs 2 C sqrt(delta) log(1/delta)
};

// At each sample point (x, y) of D_R the leafwise derivative of pi_delta
// along the true leaf through it equals grad_y pi_delta . (F - F_delta),
// since pi_delta is constant along F_delta-solutions; the gradient is the
// finite-difference one.
inline FinalBoundReports check_grad_pi_and_final(const SmoothedField& sf, const Domain& D_R, std::size_t n,
                                                 double C, int workers = 1) {
  const double delta = sf.delta();
  const auto xs = D_R.x().grid(n), y1s = D_R.y().grid(n), y2s = D_R.z().grid(n);
  struct Sample {
    double g = 0, v = 0;
    bool ok = false;
  };
  std::vector<Sample> out(xs.size() * y1s.size() * y2s.size());
  parallel_for(out.size(), workers, [&](std::size_t i) {
    const double x = xs[i / (y1s.size() * y2s.size())];
    const Vec2 y{y1s[(i / y2s.size()) % y1s.size()], y2s[i % y2s.size()]};
    Sample s;
    try {
      const Mat2 G = grad_pi_delta(sf, x, y);
      s.g = operator_norm(G);
      s.v = norm(G * (sf.field().F(x, y) - sf(x, y)));
      s.ok = true;
    } catch (const CoverageError&) {
    }
    out[i] = s;
  });
  FinalBoundReports r;
  r.grad.name = "grad_pi_delta";
  r.final.name = "final_bound";
  const double bg = 2.0 / std::sqrt(delta);
  const double bf = 2.0 * C * std::sqrt(delta) * std::log(1.0 / delta);
  ProfileBuilder pg, pf;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out[i].ok) {
      r.grad.skip("backward solution left the box");
      r.final.skip();
      continue;
    }
    const double x = xs[i / (y1s.size() * y2s.size())];
    r.grad.observe(out[i].g, bg);
    r.final.observe(out[i].v, bf);
    pg.add(x, out[i].g, bg);
    pf.add(x, out[i].v, bf);
  }
  r.grad.profile = pg.points();
  r.final.profile = pf.points();
  for (auto* rep : {&r.grad, &r.final}) {
    tag(*rep, sf);
    rep->params.C = C;
    if (D_R.radius()) rep->params.R = *D_R.radius();
    rep->grid = std::to_string(n) + "^3 grid over " + D_R.describe();
    rep->finalize();
  }
  return r;
}

// psi(x, y) = sum_{j,k} phi(x, f_{(j/J, k/J)}(x)) Lambda_j(pi_delta^1) Lambda_k(pi_delta^2):
// the two-parameter partition of unity composed with pi_delta.
struct PartialSmoothFunctionCurves {
  std::string name;
  std::function<double(double x, const Vec2& y)> value;
};

class CompositeApproximantCurves {
 public:
  CompositeApproximantCurves(PartialSmoothFunctionCurves phi, CurveFamily3D family, SmoothedField sf, int J)
      : phi_(std::move(phi)), family_(std::move(family)), sf_(std::move(sf)), lambda_(J) {}

  const SmoothedField& field() const { return sf_; }
  const PartitionLambda& partition() const { return lambda_; }

  double operator()(double x, const Vec2& y) const {
    const Vec2 a = project_pi_delta(sf_, x, y);
    const auto p = lambda_.active(a.c1);
    const auto q = lambda_.active(a.c2);
    const double wp[2] = {p.w_k, p.w_k1};
    const double wq[2] = {q.w_k, q.w_k1};
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double w = wp[i] * wq[j];
        if (w == 0.0) continue;
        const Vec2 node{lambda_.node(p.k + i), lambda_.node(q.k + j)};
        s += w * phi_.value(x, family_.value(node, x));
      }
    return s;
  }

 private:
  PartialSmoothFunctionCurves phi_;
  CurveFamily3D family_;
  SmoothedField sf_;
  PartitionLambda lambda_;
};

}  // namespace lamsmooth
