#pragma once

// Fixed-step classical Runge-Kutta with a step-halving refinement pass, plus
// dense cubic Hermite output. Slope fields here are only log-Lipschitz (or
// C^1 with large y-derivatives), so the integrator favours robustness over
// adaptive high order.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lamsmooth/errors.hpp"
#include "lamsmooth/vec2.hpp"

namespace lamsmooth {

struct IntegratorParams {
  double max_step = 1e-3;
  double tolerance = 1e-10;
  int max_refinements = 12;
  double min_step = 1e-13;
};

// Base step used for smoothed fields of spacing delta.
inline double step_for_delta(double delta, double max_step = 1e-3) {
  return std::min(max_step, delta / 10.0);
}

template <class State>
struct Trajectory {
  std::vector<double> xs;      // stations actually reached, in marching order
  std::vector<State> ys;
  bool truncated = false;
  double exit_x = std::numeric_limits<double>::quiet_NaN();  // last valid x before leaving the box
  double step = 0.0;           // step of the accepted run
  int refinements = 0;

  bool reached_all(std::size_t requested) const { return xs.size() == requested; }
};

template <class State, class Field>
State rk4_step(const Field& f, double x, const State& y, double h) {
  const State k1 = f(x, y);
  const State k2 = f(x + 0.5 * h, y + k1 * (0.5 * h));
  const State k3 = f(x + 0.5 * h, y + k2 * (0.5 * h));
  const State k4 = f(x + h, y + k3 * h);
  return y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

namespace detail {

// One pass with base step h. Each station interval is split into equal
// substeps no longer than h, so stations are hit exactly.
template <class State, class Field, class Inside>
Trajectory<State> march(const Field& f, double x0, const State& y0, std::span<const double> stations,
                        double h, const Inside& inside) {
  Trajectory<State> tr;
  tr.step = h;
  tr.xs.reserve(stations.size());
  tr.ys.reserve(stations.size());
  double x = x0;
  State y = y0;
  for (double target : stations) {
    const double len = target - x;
    if (len != 0.0) {
      const auto n = static_cast<long>(std::ceil(std::abs(len) / h - 1e-9));
      const double sub = len / static_cast<double>(std::max(1L, n));
      for (long i = 0; i < std::max(1L, n); ++i) {
        const double xn = (i + 1 == std::max(1L, n)) ? target : x + sub;
        State yn = rk4_step(f, x, y, xn - x);
        if (!inside(xn, yn)) {
          tr.truncated = true;
          tr.exit_x = x;
          return tr;
        }
        x = xn;
        y = yn;
      }
    }
    tr.xs.push_back(target);
    tr.ys.push_back(y);
  }
  return tr;
}

}  // namespace detail

// Integrates y' = f(x, y), y(x0) = y0 through `stations`, which must move
// monotonically away from x0 (x0 itself may be the first station). The step
// starts at params.max_step and is halved until two successive passes agree
// to params.tolerance at every common station.
template <class State, class Field, class Inside>
Trajectory<State> integrate(const Field& f, double x0, const State& y0, std::span<const double> stations,
                            const IntegratorParams& params, const Inside& inside) {
  double h = params.max_step;
  Trajectory<State> prev = detail::march(f, x0, y0, stations, h, inside);
  for (int level = 1; level <= params.max_refinements; ++level) {
    h *= 0.5;
    if (h < params.min_step)
      throw IntegrationError("step-size underflow", prev.xs.empty() ? x0 : prev.xs.back());
    Trajectory<State> next = detail::march(f, x0, y0, stations, h, inside);
    const std::size_t common = std::min(prev.xs.size(), next.xs.size());
    double diff = 0.0;
    for (std::size_t i = 0; i < common; ++i) diff = std::max(diff, distance(prev.ys[i], next.ys[i]));
    const bool same_reach = prev.truncated == next.truncated && prev.xs.size() == next.xs.size();
    if (diff <= params.tolerance && same_reach) {
      next.refinements = level;
      return next;
    }
    prev = std::move(next);
  }
  throw IntegrationError("refinement did not converge to tolerance",
                         prev.xs.empty() ? x0 : prev.xs.back());
}

template <class State, class Field>
Trajectory<State> integrate(const Field& f, double x0, const State& y0, std::span<const double> stations,
                            const IntegratorParams& params) {
  return integrate(f, x0, y0, stations, params, [](double, const State&) { return true; });
}

// Value at a single x, integrating from x0.
template <class State, class Field, class Inside>
State integrate_to(const Field& f, double x0, const State& y0, double x, const IntegratorParams& params,
                   const Inside& inside) {
  if (x == x0) return y0;
  const double st[1] = {x};
  auto tr = integrate(f, x0, y0, std::span<const double>(st, 1), params, inside);
  if (tr.truncated)
    throw TruncationError("solution left the domain before x = " + std::to_string(x), tr.exit_x);
  return tr.ys.back();
}

// Cubic Hermite interpolant through (x_i, y_i) with slopes s_i on a uniform
// grid. C^1 across stations.
template <class State>
class HermiteTable {
 public:
  HermiteTable() = default;
  HermiteTable(double x_first, double spacing, std::vector<State> ys, std::vector<State> slopes)
      : x0_(x_first), h_(spacing), ys_(std::move(ys)), ss_(std::move(slopes)) {}

  double lo() const { return x0_; }
  double hi() const { return x0_ + h_ * static_cast<double>(ys_.size() - 1); }
  bool covers(double x) const { return !ys_.empty() && x >= lo() - 1e-12 && x <= hi() + 1e-12; }

  State operator()(double x) const {
    const double t = (x - x0_) / h_;
    auto i = static_cast<long>(std::floor(t));
    i = std::clamp(i, 0L, static_cast<long>(ys_.size()) - 2);
    const auto k = static_cast<std::size_t>(i);
    const double s = t - static_cast<double>(i);
    if (s == 0.0) return ys_[k];
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return ys_[k] * h00 + ss_[k] * (h10 * h_) + ys_[k + 1] * h01 + ss_[k + 1] * (h11 * h_);
  }

 private:
  double x0_ = 0.0;
  double h_ = 1.0;
  std::vector<State> ys_;
  std::vector<State> ss_;
};

// Integrates forward and backward from x = 0 with y(0) = a over [lo, hi],
// storing a station every `spacing`. Stops at the first station outside the
// box on either side; `reach_lo` / `reach_hi` record how far it got.
template <class State>
struct DenseSolution {
  HermiteTable<State> table;
  double reach_lo = 0.0;
  double reach_hi = 0.0;
  bool truncated = false;
};

template <class State, class Field, class Inside>
DenseSolution<State> integrate_dense(const Field& f, const State& a, double lo, double hi, double spacing,
                                     const IntegratorParams& params, const Inside& inside) {
  const auto n_lo = static_cast<long>(std::ceil(-lo / spacing - 1e-9));
  const auto n_hi = static_cast<long>(std::ceil(hi / spacing - 1e-9));
  std::vector<double> fwd, bwd;
  for (long i = 1; i <= std::max(0L, n_hi); ++i) fwd.push_back(static_cast<double>(i) * spacing);
  for (long i = 1; i <= std::max(0L, n_lo); ++i) bwd.push_back(-static_cast<double>(i) * spacing);
  auto tf = integrate(f, 0.0, a, std::span<const double>(fwd), params, inside);
  auto tb = integrate(f, 0.0, a, std::span<const double>(bwd), params, inside);

  std::vector<State> ys;
  ys.reserve(tb.ys.size() + tf.ys.size() + 1);
  for (auto it = tb.ys.rbegin(); it != tb.ys.rend(); ++it) ys.push_back(*it);
  ys.push_back(a);
  for (const auto& v : tf.ys) ys.push_back(v);
  const double first = -static_cast<double>(tb.ys.size()) * spacing;
  std::vector<State> ss(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) ss[i] = f(first + static_cast<double>(i) * spacing, ys[i]);

  DenseSolution<State> out;
  out.reach_lo = tb.ys.empty() ? 0.0 : tb.xs.back();
  out.reach_hi = tf.ys.empty() ? 0.0 : tf.xs.back();
  out.truncated = tf.truncated || tb.truncated;
  if (ys.size() == 1) {
    // Degenerate single-point table; duplicate so interpolation is defined.
    ys.push_back(a);
    ss.push_back(ss.front());
  }
  out.table = HermiteTable<State>(first, spacing, std::move(ys), std::move(ss));
  return out;
}

}  // namespace lamsmooth
