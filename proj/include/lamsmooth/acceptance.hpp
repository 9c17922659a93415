#pragma once

// The acceptance table: nine numerical criteria A1-A9, shared by the CLI's
// `verify` command and the acceptance test binary. (A10, determinism of the
// CLI output, is checked by running the CLI itself.)

#include <chrono>
#include <cmath>
#include <algorithm>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "lamsmooth/catalog.hpp"
#include "lamsmooth/harness.hpp"
#include "lamsmooth/report.hpp"
#include "lamsmooth/smoothing_r2.hpp"

namespace lamsmooth::acceptance {

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;          // numerical verdict (deterministic)
  std::string detail;         // deterministic one-line summary
  std::vector<SweepEntry> reports;
  double seconds = 0.0;       // wall-clock, reported separately from the verdict
  double limit_seconds = 0.0;

  bool within_limit() const { return seconds < limit_seconds; }
};

inline CriterionResult criterion(std::string id, std::string title, double limit_seconds) {
  CriterionResult r;
  r.id = std::move(id);
  r.title = std::move(title);
  r.limit_seconds = limit_seconds;
  return r;
}

struct Options {
  std::uint64_t seed = 7;
  int workers = 1;
};

namespace detail {

inline bool all_pass(const std::vector<SweepEntry>& v) {
  for (const auto& e : v)
    if (!e.report.pass) return false;
  return true;
}

inline void add(CriterionResult& r, BoundReport rep, double delta = kNaN, int J = 0) {
  rep.name = r.id + "/" + rep.name;
  r.reports.push_back({std::move(rep), delta, J, 0.0});
}

inline bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

inline const Domain& canonical_K() {
  static const Domain K = Domain::plane({-1.0, 1.0}, {0.05, 0.95});
  return K;
}

inline const Domain& curve_K() {
  static const Domain K = Domain::space({-1.0, 1.0}, {0.05, 0.95}, {0.05, 0.95});
  return K;
}

inline const Domain& curve_box() {
  static const Domain B = Domain::space({-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0});
  return B;
}

}  // namespace detail

inline CriterionResult a1_partition_of_unity(const Options& o) {
  auto r = criterion("A1", "partition of unity, J in {4,16,64}", 1.0);
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> ua(0.0, 1.0);
  std::vector<double> as(10000);
  for (double& a : as) a = ua(rng);
  for (int J : {4, 16, 64}) {
    const PartitionLambda lam(J);
    BoundReport rep;
    rep.name = "partition_sum";
    rep.slack = 0.0;
    for (double a : as) {
      const long k = static_cast<long>(std::floor(J * a));
      double s = 0.0;
      for (long j = k - 2; j <= k + 2; ++j) s += lam.weight(j, a);
      rep.observe(std::abs(s - 1.0), 1e-12);
    }
    rep.grid = "10000 uniform a in [0,1]";
    rep.finalize();
    detail::add(r, rep, kNaN, J);
  }
  r.pass = detail::all_pass(r.reports);
  r.detail = "max |sum - 1| = " + format_double(std::max({r.reports[0].report.measured, r.reports[1].report.measured,
                                                          r.reports[2].report.measured}));
  return r;
}

inline CriterionResult a2_grid_leaf_and_plateau(const Options& o) {
  auto r = criterion("A2", "grid-leaf exactness and plateau derivative", 5.0);
  const double delta = 0.05;
  for (const std::string id : {"flat", "affine", "canonical-osgood"}) {
    const LeafFamily2D fam = catalog::family2d(id);
    const Domain K = catalog::default_domain2d(id);
    const auto sm = build_h_delta(fam, delta);
    const Interval base = stencil_base(K.x(), fam.base, kSamplingMargin);
    const double h = kRelativeFdStep * base.width();
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> ux(K.x().lo, K.x().hi), ut(0.0, 1.0);
    const long j_lo = static_cast<long>(std::ceil(fam.params.lo / delta));
    const long j_hi = static_cast<long>(std::floor(fam.params.hi / delta)) - 1;
    std::uniform_int_distribution<long> uj(j_lo, j_hi);
    BoundReport exact;
    exact.name = "grid_leaf_" + id;
    exact.slack = 0.0;
    BoundReport plateau;
    plateau.name = "plateau_" + id;
    plateau.slack = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const long j = uj(rng);
      const double x = ux(rng);
      const double a = sm.grid_label(j);
      exact.observe(std::abs(sm(x, fam.value(a, x)) - a), 1e-12);
    }
    int attempts = 0;
    while (plateau.samples < 1000 && attempts < 100000) {
      ++attempts;
      const long j = uj(rng);
      const double x0 = ux(rng);
      const double t = ut(rng);
      // Relative heights in [0.02, 0.2] or [0.8, 0.98] at x = 0.
      const double theta = t < 0.5 ? 0.02 + 0.36 * t : 0.8 + 0.36 * (t - 0.5);
      const double b = (static_cast<double>(j) + theta) * delta;
      // Every stencil point must sit on the same plateau as x0.
      const GridCell c0 = sm.locate(x0, fam.value(b, x0));
      const bool low = c0.u <= 0.25;
      bool on_plateau = low || c0.u >= 0.75;
      for (double s : {-1.0, -0.5, 0.5, 1.0}) {
        const double x = x0 + s * h;
        const GridCell c = sm.locate(x, fam.value(b, x));
        if (c.j != c0.j || (low ? !(c.u <= 0.25) : !(c.u >= 0.75))) on_plateau = false;
      }
      if (!on_plateau) continue;
      plateau.observe(std::abs(sm.leafwise_derivative(b, x0, base)), 0.0);
    }
    exact.grid = plateau.grid = "1000 samples, delta = 0.05";
    exact.finalize();
    plateau.finalize();
    detail::add(r, exact, delta);
    detail::add(r, plateau, delta);
  }
  r.pass = detail::all_pass(r.reports);
  double worst = 0.0, dmax = 0.0;
  for (const auto& e : r.reports) {
    if (e.report.name.find("grid_leaf") != std::string::npos) worst = std::max(worst, e.report.sup_measured);
    if (e.report.name.find("plateau") != std::string::npos) dmax = std::max(dmax, e.report.sup_measured);
  }
  r.detail = "max |h - j delta| = " + format_double(worst) + ", max plateau |dh/dx| = " + format_double(dmax);
  return r;
}

namespace detail {

inline ExperimentConfig base_config(const std::string& family, const Options& o) {
  ExperimentConfig c;
  c.family = family;
  c.seed = o.seed;
  c.workers = o.workers;
  return c;
}

// Runs a sweep and files its reports under the criterion.
inline void absorb(CriterionResult& r, const ExperimentConfig& c) {
  for (auto& e : run_sweep(c).entries) {
    e.report.name = r.id + "/" + e.report.name;
    r.reports.push_back(std::move(e));
  }
}

inline std::vector<double> sup_series(const CriterionResult& r, const std::string& name) {
  std::vector<double> v;
  for (const auto& e : r.reports)
    if (e.report.name == r.id + "/" + name) v.push_back(e.report.sup_measured);
  return v;
}

}  // namespace detail

using detail::absorb;
using detail::base_config;
using detail::sup_series;

inline CriterionResult a3_r2_convergence(const Options& o) {
  auto r = criterion("A3", "h_delta convergence on canonical-osgood", 30.0);
  auto c = base_config("canonical-osgood", o);
  c.domain = detail::canonical_K();
  c.smoothing.delta = {0.1, 0.05, 0.025, 0.0125};
  c.sampling.grid = 512;
  c.checks = {"h_delta"};
  absorb(r, c);
  const auto c0 = sup_series(r, "h_delta_c0"), c1 = sup_series(r, "h_delta_c1");
  const bool dec = c0.size() == 4 && c1.size() == 4 && detail::strictly_decreasing(c0) &&
                   detail::strictly_decreasing(c1);
  r.pass = detail::all_pass(r.reports) && dec;
  const double L = r.reports.empty() ? kNaN : r.reports.front().report.params.L;
  r.detail = "L = " + format_double(L) + "; sup|h-pi| = " + detail::join(c0) + "; sup|dh/dx| = " + detail::join(c1) +
             (dec ? "; strictly decreasing" : "; not strictly decreasing");
  return r;
}

inline CriterionResult a4_lemma1_envelope(const Options& o) {
  auto r = criterion("A4", "leaf-gap envelope on canonical-osgood", 5.0);
  auto c = base_config("canonical-osgood", o);
  c.domain = detail::canonical_K();
  c.sampling.envelope_samples = 10000;
  c.checks = {"lemma1"};
  absorb(r, c);
  r.pass = detail::all_pass(r.reports);
  const auto& rep = r.reports.front().report;
  r.detail = "L = " + format_double(rep.params.L) + ", worst margin " + format_double(rep.margin) + " over " +
             std::to_string(rep.samples) + " inequalities";
  return r;
}

inline CriterionResult a5_ode_oracle(const Options&) {
  auto r = criterion("A5", "integrated leaves of y' = y log(1/y) vs a^(e^-x)", 5.0);
  const auto fam = family_from_slope_field(catalog::osgood_field(), Domain::plane({-2.0, 2.0}, {0.0, 1.0}));
  BoundReport rep;
  rep.name = "ode_oracle";
  rep.slack = 0.0;
  const auto xs = Interval{-2.0, 2.0}.grid(161);
  for (int i = 0; i < 100; ++i) {
    const double a = 0.005 + 0.99 * i / 99.0;
    for (double x : xs) rep.observe(std::abs(fam.value(a, x) - catalog::osgood_leaf(a, x)), 1e-8);
  }
  rep.grid = "100 leaves x 161 stations on |x| <= 2";
  rep.finalize();
  r.pass = rep.pass;
  r.detail = "max error " + format_double(rep.sup_measured);
  detail::add(r, rep);
  return r;
}

inline CriterionResult a6_lemma3(const Options& o) {
  auto r = criterion("A6", "F_delta sup and Jacobian bounds on canonical-osgood-3d", 60.0);
  auto c = base_config("canonical-osgood-3d", o);
  c.domain = detail::curve_K();
  c.smoothing.delta = {0.04, 0.02, 0.01};
  c.sampling.lemma3_grid = 256;
  c.checks = {"lemma3"};
  absorb(r, c);
  r.pass = detail::all_pass(r.reports);
  r.detail = "sup|F_delta - F| = " + detail::join(sup_series(r, "lemma3_sup")) +
             "; sup|J_y F_delta| = " + detail::join(sup_series(r, "lemma3_jacobian")) +
             (r.reports.empty() ? "" : "; C = " + format_double(r.reports.front().report.params.C));
  return r;
}

inline CriterionResult a7_corollary1(const Options& o) {
  auto r = criterion("A7", "leaf deviation under F_delta, tau = 1/2, delta = 1e-4", 60.0);
  auto c = base_config("canonical-osgood-3d", o);
  c.domain = detail::curve_K();
  c.smoothing.delta = {1e-4};
  c.smoothing.tau = 0.5;
  c.sampling.leaves = 100;
  c.sampling.stations = 100;
  c.checks = {"corollary1"};
  absorb(r, c);
  r.pass = detail::all_pass(r.reports);
  const auto& rep = r.reports.front().report;
  r.detail = "L = " + format_double(rep.params.L) + ", window |x| <= " +
             format_double(corollary1_window(0.5, rep.params.L)) + ", max phi = " + format_double(rep.sup_measured) +
             " vs " + format_double(std::sqrt(1e-4));
  return r;
}

inline CriterionResult a8_leaf_separation(const Options& o) {
  auto r = criterion("A8", "leaf separation envelopes, delta = 1e-3", 30.0);
  auto c = base_config("canonical-osgood-3d", o);
  c.domain = detail::curve_K();
  c.smoothing.delta = {1e-3};
  c.sampling.pairs = 50;
  c.checks = {"leaf_separation"};
  absorb(r, c);
  r.pass = detail::all_pass(r.reports);
  double worst = kInf;
  for (const auto& e : r.reports) worst = std::min(worst, e.report.margin);
  const auto& rep = r.reports.front().report;
  r.detail = "C = " + format_double(rep.params.C) + ", R = " + format_double(rep.params.R) + ", worst margin " +
             format_double(worst);
  return r;
}

inline CriterionResult a9_final_bound(const Options& o) {
  auto r = criterion("A9", "leafwise derivative of pi_delta on D_R", 120.0);
  auto c = base_config("canonical-osgood-3d", o);
  c.domain = detail::curve_K();
  c.smoothing.delta = {1e-2, 1e-3, 1e-4};
  c.sampling.final_grid = 9;
  c.checks = {"final_bound"};
  absorb(r, c);
  const auto fin = sup_series(r, "final_bound");
  const bool dec = fin.size() == 3 && fin.back() < fin.front();
  r.pass = detail::all_pass(r.reports) && dec;
  r.detail = "sup leafwise |d/dx pi_delta| = " + detail::join(fin) +
             (dec ? "; delta = 1e-4 below delta = 1e-2" : "; delta = 1e-4 not below delta = 1e-2");
  return r;
}

struct Criterion {
  std::string id;
  std::function<CriterionResult(const Options&)> run;
};

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"A1", a1_partition_of_unity}, {"A2", a2_grid_leaf_and_plateau}, {"A3", a3_r2_convergence},
      {"A4", a4_lemma1_envelope},    {"A5", a5_ode_oracle},            {"A6", a6_lemma3},
      {"A7", a7_corollary1},         {"A8", a8_leaf_separation},       {"A9", a9_final_bound}};
  return all;
}

inline CriterionResult run_criterion(const Criterion& c, const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = c.run(o);
  } catch (const std::exception& e) {
    r.id = c.id;
    r.pass = false;
    r.detail = std::string("aborted: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline constexpr const char* kSummaryCsvHeader = "criterion,pass,detail";

// Deterministic summary table: no timings.
inline void write_summary_csv(std::ostream& os, const std::vector<CriterionResult>& results) {
  os << kSummaryCsvHeader << '\n';
  for (const auto& r : results) {
    std::string d = r.detail;
    std::replace(d.begin(), d.end(), '"', '\'');
    os << r.id << ',' << (r.pass ? "true" : "false") << ",\"" << d << "\"\n";
  }
}

inline void write_reports_csv(std::ostream& os, const std::vector<CriterionResult>& results) {
  std::vector<SweepEntry> all;
  for (const auto& r : results) all.insert(all.end(), r.reports.begin(), r.reports.end());
  write_bound_csv(os, all);
}

}  // namespace lamsmooth::acceptance
