#pragma once

// Estimation and checking of the log-Lipschitz (Osgood) modulus
//
//   |F(x, y') - F(x, y)| <= L |y' - y| log(1 / |y' - y|)
//
// by sampling pairs of points. Separations are clamped to (t_min, 1/2) where
// t log(1/t) is positive and increasing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lamsmooth/domain.hpp"
#include "lamsmooth/errors.hpp"
#include "lamsmooth/families.hpp"
#include "lamsmooth/projection.hpp"
#include "lamsmooth/report.hpp"

namespace lamsmooth {

// Smallest constant used downstream: L log 2 > 1 needs L > 1/log 2 ~ 1.4427.
inline constexpr double kMinLEffective = 1.45;

struct LipschitzSampling {
  std::size_t random_pairs = 10000;
  std::size_t grid_x = 8;
  std::size_t grid_y = 32;
  std::size_t grid_t = 32;
  double t_min = 1e-6;
  double t_max = 0.5;
  std::uint64_t seed = 7;
  double margin = 0.0;  // fraction of the box kept clear of samples
};

struct LogLipschitzWitness {
  double x = 0.0;
  Vec2 p;  // first point (transversal coordinates; c2 unused in R^2)
  Vec2 q;  // second point
  double ratio = 0.0;
};

struct LogLipschitzEstimate {
  double L = 0.0;
  double L_effective = kMinLEffective;
  std::size_t samples = 0;
  LogLipschitzWitness witness;
};

inline double osgood_modulus(double t) { return t * std::log(1.0 / t); }

namespace detail {

struct PairSample {
  double x;
  Vec2 p, q;
  double t;  // transversal separation |q - p|
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = hi;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i)
    v[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) /
                                       static_cast<double>(n - 1));
  v.back() = hi;
  return v;
}

// Pairs in a 1-dimensional transversal interval (structured grid + random).
inline std::vector<PairSample> pairs_1d(const Interval& xr, const Interval& yr, const LipschitzSampling& s) {
  std::vector<PairSample> out;
  const auto ts = log_grid(s.t_min, s.t_max, s.grid_t);
  for (double x : xr.grid(s.grid_x))
    for (double y : yr.grid(s.grid_y))
      for (double t : ts) {
        double q = y + t;
        if (q > yr.hi) q = y - t;
        if (q < yr.lo) continue;
        out.push_back({x, {y, 0}, {q, 0}, t});
      }
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> ux(xr.lo, xr.hi), uy(yr.lo, yr.hi),
      ut(std::log(s.t_min), std::log(s.t_max));
  for (std::size_t i = 0; i < s.random_pairs; ++i) {
    const double x = ux(rng), y = uy(rng), t = std::exp(ut(rng));
    double q = y + t;
    if (q > yr.hi) q = y - t;
    if (q < yr.lo) continue;
    out.push_back({x, {y, 0}, {q, 0}, t});
  }
  return out;
}

inline std::vector<PairSample> pairs_2d(const Interval& xr, const Interval& y1, const Interval& y2,
                                        const LipschitzSampling& s) {
  std::vector<PairSample> out;
  const auto ts = log_grid(s.t_min, s.t_max, s.grid_t);
  const std::size_t gy = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(double(s.grid_y)) * 2));
  const double dirs[4] = {0.0, std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4};
  auto push = [&](double x, Vec2 p, double t, double th) {
    const Vec2 d{std::cos(th), std::sin(th)};
    Vec2 q = p + d * t;
    if (!(y1.contains(q.c1) && y2.contains(q.c2))) q = p - d * t;
    if (!(y1.contains(q.c1) && y2.contains(q.c2))) return;
    out.push_back({x, p, q, norm(q - p)});
  };
  for (double x : xr.grid(s.grid_x))
    for (double a : y1.grid(gy))
      for (double b : y2.grid(gy))
        for (double t : ts)
          for (double th : dirs) push(x, {a, b}, t, th);
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> ux(xr.lo, xr.hi), u1(y1.lo, y1.hi), u2(y2.lo, y2.hi),
      ut(std::log(s.t_min), std::log(s.t_max)), uth(0.0, 2 * std::numbers::pi);
  for (std::size_t i = 0; i < s.random_pairs; ++i) {
    const double x = ux(rng), a = u1(rng), b = u2(rng), t = std::exp(ut(rng)), th = uth(rng);
    push(x, {a, b}, t, th);
  }
  return out;
}

// Fold ratios into an estimate; pairs with separation outside (t_min, t_max]
// (including coincident pairs) are skipped.
template <class Ratio>
LogLipschitzEstimate fold(const std::vector<PairSample>& pairs, const LipschitzSampling& s, const Ratio& ratio) {
  LogLipschitzEstimate est;
  for (const auto& pr : pairs) {
    if (!(pr.t > s.t_min * (1 - 1e-12) && pr.t <= s.t_max * (1 + 1e-12))) continue;
    const double r = ratio(pr);
    if (!(r == r)) continue;
    ++est.samples;
    if (r > est.L) {
      est.L = r;
      est.witness = {pr.x, pr.p, pr.q, r};
    }
  }
  if (est.samples == 0) throw InputError("no valid sample pairs for the log-Lipschitz estimate");
  est.L_effective = std::max(est.L, kMinLEffective);
  return est;
}

template <class Ratio>
BoundReport check_with(const std::vector<PairSample>& pairs, const LipschitzSampling& s, double L, double slack,
                       const std::string& name, const Ratio& ratio) {
  if (!(L > 0.0)) throw ParameterError("L must be positive");
  auto est = fold(pairs, s, ratio);
  BoundReport rep;
  rep.name = name;
  rep.params.L = L;
  rep.slack = L * slack;
  rep.observe(est.L, L);
  rep.samples = est.samples;
  rep.grid = std::to_string(est.samples) + " pairs";
  return rep.finalize();
}

}  // namespace detail

// --- slope field on R^2 ---------------------------------------------------

inline LogLipschitzEstimate estimate_log_lipschitz_L(const SlopeField2D& field, const Domain& dom,
                                                     const LipschitzSampling& s = {}) {
  const Domain d = dom.inset(s.margin);
  return detail::fold(detail::pairs_1d(d.x(), d.y(), s), s, [&](const detail::PairSample& pr) {
    return std::abs(field.F(pr.x, pr.q.c1) - field.F(pr.x, pr.p.c1)) / osgood_modulus(pr.t);
  });
}

// --- family slopes on R^2: pairs of points in the box, leaves via pi -------

namespace detail {
inline auto family_ratio(const LeafFamily2D& fam) {
  return [&fam](const PairSample& pr) {
    const double a = project_pi(fam, pr.x, pr.p.c1);
    const double b = project_pi(fam, pr.x, pr.q.c1);
    return std::abs(fam.slope(b, pr.x) - fam.slope(a, pr.x)) / osgood_modulus(pr.t);
  };
}
// p.c1 = z, p.c2 = base y; q differs only in z.
inline auto surface_ratio(const SurfaceFamily3D& fam) {
  return [&fam](const PairSample& pr) {
    const double y = pr.p.c2;
    const double a = project_pi(fam, pr.x, y, pr.p.c1);
    const double b = project_pi(fam, pr.x, y, pr.q.c1);
    const double dx = std::abs(fam.slope_x(b, pr.x, y) - fam.slope_x(a, pr.x, y));
    const double dy = std::abs(fam.slope_y(b, pr.x, y) - fam.slope_y(a, pr.x, y));
    return std::max(dx, dy) / osgood_modulus(pr.t);
  };
}
inline auto field3_ratio(const SlopeField3D& f) {
  return [&f](const PairSample& pr) { return norm(f.F(pr.x, pr.q) - f.F(pr.x, pr.p)) / osgood_modulus(pr.t); };
}

// Surface pairs: base (x, y) and two heights z, z + t.
inline std::vector<PairSample> surface_pairs(const Domain& d, const LipschitzSampling& s) {
  std::vector<PairSample> out;
  LipschitzSampling s1 = s;
  s1.grid_x = std::max<std::size_t>(2, s.grid_x / 2);
  const auto ys = d.y().grid(std::max<std::size_t>(2, s.grid_x / 2));
  for (double yb : ys) {
    auto p = pairs_1d(d.x(), d.z(), {s1.random_pairs / ys.size(), s1.grid_x, s1.grid_y, s1.grid_t, s1.t_min,
                                     s1.t_max, s1.seed + static_cast<std::uint64_t>(out.size()), 0.0});
    for (auto& pr : p) {
      pr.p.c2 = yb;
      pr.q.c2 = yb;
      out.push_back(pr);
    }
  }
  return out;
}
}  // namespace detail

inline LogLipschitzEstimate estimate_log_lipschitz_L(const LeafFamily2D& fam, const Domain& dom,
                                                     const LipschitzSampling& s = {}) {
  const Domain d = dom.inset(s.margin);
  return detail::fold(detail::pairs_1d(d.x(), d.y(), s), s, detail::family_ratio(fam));
}

inline LogLipschitzEstimate estimate_log_lipschitz_L(const SurfaceFamily3D& fam, const Domain& dom,
                                                     const LipschitzSampling& s = {}) {
  const Domain d = dom.inset(s.margin);
  return detail::fold(detail::surface_pairs(d, s), s, detail::surface_ratio(fam));
}

inline LogLipschitzEstimate estimate_log_lipschitz_L(const SlopeField3D& field, const Domain& dom,
                                                     const LipschitzSampling& s = {}) {
  const Domain d = dom.inset(s.margin);
  return detail::fold(detail::pairs_2d(d.x(), d.y(), d.z(), s), s, detail::field3_ratio(field));
}

// Worst sampled ratio against L; passes iff ratio <= L (1 + slack).
inline BoundReport check_basic_assumption(const SlopeField2D& field, const Domain& dom, double L,
                                          const LipschitzSampling& s = {}, double slack = 1e-9) {
  const Domain d = dom.inset(s.margin);
  return detail::check_with(detail::pairs_1d(d.x(), d.y(), s), s, L, slack, "basic_assumption",
                            [&](const detail::PairSample& pr) {
                              return std::abs(field.F(pr.x, pr.q.c1) - field.F(pr.x, pr.p.c1)) /
                                     osgood_modulus(pr.t);
                            });
}

inline BoundReport check_basic_assumption(const LeafFamily2D& fam, const Domain& dom, double L,
                                          const LipschitzSampling& s = {}, double slack = 1e-9) {
  const Domain d = dom.inset(s.margin);
  return detail::check_with(detail::pairs_1d(d.x(), d.y(), s), s, L, slack, "basic_assumption",
                            detail::family_ratio(fam));
}

inline BoundReport check_basic_assumption(const SurfaceFamily3D& fam, const Domain& dom, double L,
                                          const LipschitzSampling& s = {}, double slack = 1e-9) {
  const Domain d = dom.inset(s.margin);
  return detail::check_with(detail::surface_pairs(d, s), s, L, slack, "basic_assumption",
                            detail::surface_ratio(fam));
}

inline BoundReport check_basic_assumption(const SlopeField3D& field, const Domain& dom, double L,
                                          const LipschitzSampling& s = {}, double slack = 1e-9) {
  const Domain d = dom.inset(s.margin);
  return detail::check_with(detail::pairs_2d(d.x(), d.y(), d.z(), s), s, L, slack, "basic_assumption",
                            detail::field3_ratio(field));
}

struct EnvelopeSampling {
  std::size_t samples = 10000;
  double delta_min = 1e-6;
  double delta_max = 0.5;
  std::uint64_t seed = 7;
};

// Two-sided Gronwall envelope for the gap between leaves a and a' = a + delta:
//   e^{-L|x|} log(1/delta) <= log(1/(f_{a'}(x) - f_a(x))) <= e^{L|x|} log(1/delta).
inline BoundReport check_lemma1_envelope(const LeafFamily2D& fam, double L, const Interval& xr,
                                         const EnvelopeSampling& s = {}, double slack = 1e-6) {
  BoundReport rep;
  rep.name = "lemma1";
  rep.params.L = L;
  rep.slack = slack;
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> ua(fam.params.lo, fam.params.hi), ux(xr.lo, xr.hi),
      ud(std::log(s.delta_min), std::log(s.delta_max));
  for (std::size_t i = 0; i < s.samples;) {
    const double a = ua(rng), delta = std::exp(ud(rng)), x = ux(rng);
    const double b = a + delta;
    if (b > fam.params.hi) continue;
    ++i;
    const double gap = fam.value(b, x) - fam.value(a, x);
    if (!(gap > 0.0 && gap < 1.0)) {
      rep.skip("gap outside (0, 1)");
      continue;
    }
    const double mid = std::log(1.0 / gap);
    const double base = std::log(1.0 / (b - a));
    rep.observe(mid, std::exp(L * std::abs(x)) * base);
    rep.observe(std::exp(-L * std::abs(x)) * base, mid);
  }
  rep.grid = std::to_string(s.samples) + " random (a, a', x)";
  return rep.finalize();
}

}  // namespace lamsmooth
