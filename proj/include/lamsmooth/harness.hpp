#pragma once

// Sweep orchestration: runs a suite of bound checks over the configured
// delta (and J) lists, collects the reports in a deterministic order, and
// writes them as CSV tables and plot-data files.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "lamsmooth/catalog.hpp"
#include "lamsmooth/config.hpp"
#include "lamsmooth/log_lipschitz.hpp"
#include "lamsmooth/report.hpp"
#include "lamsmooth/sampled_field.hpp"
#include "lamsmooth/smoothing_r2.hpp"
#include "lamsmooth/smoothing_r3_curves.hpp"
#include "lamsmooth/smoothing_r3_surfaces.hpp"

namespace lamsmooth {

struct SweepEntry {
  BoundReport report;
  double delta = kNaN;
  int J = 0;
  double seconds = 0.0;  // wall-clock of the cell; never written to CSV
};

// One line of the experiment tables (h_delta / theorem rows).
struct ExperimentRow {
  std::string experiment;
  double delta = kNaN;
  int J = 0;
  double c0 = kNaN, c1 = kNaN, c1y = kNaN;
  double bound_c0 = kNaN, bound_c1 = kNaN;
  bool pass = false;
};

struct SweepResult {
  Suite suite = Suite::r2;
  std::string family;
  std::vector<SweepEntry> entries;
  std::vector<ExperimentRow> rows;

  bool pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const SweepEntry& e) { return e.report.pass; });
  }

  // Reports by check name, then delta descending, then J ascending; NaN
  // deltas (delta-free checks) come first within a name.
  void sort() {
    auto key_delta = [](double d) { return std::isnan(d) ? kInf : d; };
    std::stable_sort(entries.begin(), entries.end(), [&](const SweepEntry& a, const SweepEntry& b) {
      if (a.report.name != b.report.name) return a.report.name < b.report.name;
      if (key_delta(a.delta) != key_delta(b.delta)) return key_delta(a.delta) > key_delta(b.delta);
      return a.J < b.J;
    });
    std::stable_sort(rows.begin(), rows.end(), [&](const ExperimentRow& a, const ExperimentRow& b) {
      if (a.experiment != b.experiment) return a.experiment < b.experiment;
      if (key_delta(a.delta) != key_delta(b.delta)) return key_delta(a.delta) > key_delta(b.delta);
      return a.J < b.J;
    });
  }
};

namespace detail {

inline BoundReport failed_report(const std::string& name, const std::string& why) {
  BoundReport r;
  r.name = name;
  r.notes.push_back("cell aborted: " + why);
  r.pass = false;
  r.margin = kNaN;
  r.measured = kNaN;
  r.bound = kNaN;
  return r;
}

// Runs one cell; a thrown error turns into failed reports under `names`.
class CellRunner {
 public:
  explicit CellRunner(SweepResult& out) : out_(out) {}

  void run(const std::vector<std::string>& names, double delta, int J,
           const std::function<std::vector<BoundReport>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<BoundReport> reps;
    try {
      reps = body();
    } catch (const std::exception& e) {
      reps.clear();
      for (const auto& n : names) reps.push_back(failed_report(n, e.what()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& r : reps) {
      if (!std::isnan(delta)) r.params.delta = delta;
      if (J) r.params.J = J;
      out_.entries.push_back({std::move(r), delta, J, secs / static_cast<double>(reps.size())});
    }
  }

 private:
  SweepResult& out_;
};

inline bool wants(const ExperimentConfig& c, const std::string& check) {
  return c.checks.empty() || std::find(c.checks.begin(), c.checks.end(), check) != c.checks.end();
}

inline LipschitzSampling lipschitz_sampling(const ExperimentConfig& c) {
  LipschitzSampling s;
  s.random_pairs = static_cast<std::size_t>(c.sampling.lipschitz_pairs);
  s.seed = c.seed;
  return s;
}

inline IntegratorParams integrator_params(const ExperimentConfig& c) {
  IntegratorParams p;
  p.max_step = c.integrator.step;
  p.tolerance = c.integrator.tolerance;
  return p;
}

// Middle of the delta-cell around the middle of the parameter range.
inline double mid_gap_leaf(const Interval& params, double delta) {
  const double j = std::floor(params.mid() / delta);
  return (j + 0.5) * delta;
}

inline PartialSmoothFunction2D phi2d(const std::string& id, const LeafFamily2D& fam) {
  if (id == "x") return catalog::phi_x();
  if (id == "y") return catalog::phi_y();
  if (id == "pi") return catalog::phi_pi(fam);
  throw ConfigError("phi '" + id + "' is not available for curves in R^2", -1, "smoothing.phi");
}

inline PartialSmoothFunction3D phi3d(const std::string& id, const SurfaceFamily3D& fam) {
  if (id == "x") return catalog::phi3_x();
  if (id == "z") return catalog::phi3_z();
  if (id == "pi") return catalog::phi3_pi(fam);
  throw ConfigError("phi '" + id + "' is not available for surfaces", -1, "smoothing.phi");
}

inline void run_r2(const ExperimentConfig& c, SweepResult& out) {
  const LeafFamily2D fam = catalog::family2d(c.family);
  const Domain K = c.domain.value_or(catalog::default_domain2d(c.family));
  const double L =
      c.smoothing.L.value_or(estimate_log_lipschitz_L(fam, K, lipschitz_sampling(c)).L_effective);
  const CutoffChi chi(c.smoothing.chi);
  const auto n = static_cast<std::size_t>(c.sampling.grid);
  SweepGrid grid{n, n, c.workers, kSamplingMargin};
  const Interval base = stencil_base(K.x(), fam.base, kSamplingMargin);
  CellRunner runner(out);
  if (wants(c, "basic_assumption"))
    runner.run({"basic_assumption"}, kNaN, 0,
             [&] { return std::vector{check_basic_assumption(fam, K, L, lipschitz_sampling(c))}; });
  if (wants(c, "lemma1"))
    runner.run({"lemma1"}, kNaN, 0, [&] {
      EnvelopeSampling s;
      s.samples = static_cast<std::size_t>(c.sampling.envelope_samples);
      s.seed = c.seed;
      return std::vector{check_lemma1_envelope(fam, L, K.x(), s)};
    });
  for (double delta : c.smoothing.delta) {
    if (wants(c, "lemma2"))
      runner.run({"lemma2"}, delta, 0, [&] {
        return std::vector{check_lemma2(fam, delta, mid_gap_leaf(fam.params, delta), K.x().grid(1000), L, base)};
      });
    if (wants(c, "h_delta"))
      runner.run({"h_delta_c0", "h_delta_c1"}, delta, 0, [&] {
        const auto sm = build_h_delta(fam, delta, chi);
        auto r = report_h_delta(sm, K, L, grid);
        out.rows.push_back({"h_delta", delta, 0, r.c0.sup_measured, r.c1.sup_measured, kNaN, r.c0.bound,
                            r.c1.bound, r.c0.pass && r.c1.pass});
        return std::vector{r.c0, r.c1};
      });
  }
  if (wants(c, "theorem1")) {
    const auto phi = phi2d(c.smoothing.phi, fam);
    for (int J : c.smoothing.J) {
      const double delta = default_delta_for(c.smoothing.epsilon, J);
      runner.run({"theorem1_c0", "theorem1_c1"}, delta, J, [&] {
        const auto psi = build_psi(phi, build_h_delta(fam, delta, chi), J);
        auto r = report_theorem1(phi, psi, K, c.smoothing.epsilon, grid);
        out.rows.push_back({"theorem1", delta, J, r.c0.sup_measured, r.c1.sup_measured, kNaN, r.c0.bound,
                            r.c1.bound, r.c0.pass && r.c1.pass});
        return std::vector{r.c0, r.c1};
      });
    }
  }
}

inline void run_surface(const ExperimentConfig& c, SweepResult& out) {
  const SurfaceFamily3D fam = catalog::surface_family(c.family);
  const Domain K = c.domain.value_or(catalog::default_domain_surface(c.family));
  const double L =
      c.smoothing.L.value_or(estimate_log_lipschitz_L(fam, K, lipschitz_sampling(c)).L_effective);
  const CutoffChi chi(c.smoothing.chi);
  const auto nb = static_cast<std::size_t>(c.sampling.surface_grid);
  const auto nv = static_cast<std::size_t>(c.sampling.volume_grid);
  const Domain base_box = Domain::plane(K.x(), K.y());
  CellRunner runner(out);
  if (wants(c, "basic_assumption"))
    runner.run({"basic_assumption"}, kNaN, 0,
             [&] { return std::vector{check_basic_assumption(fam, K, L, lipschitz_sampling(c))}; });
  for (double delta : c.smoothing.delta) {
    if (wants(c, "prop2"))
      runner.run({"prop2_dx", "prop2_dy"}, delta, 0, [&] {
        const auto sm = build_h_delta_surface(fam, delta, chi);
        auto r = check_prop2_bounds(sm, mid_gap_leaf(fam.params, delta), base_box, nb, L, c.smoothing.l_factor,
                                    c.workers);
        out.rows.push_back({"prop2", delta, 0, kNaN, r.dx.sup_measured, r.dy.sup_measured, kNaN,
                            std::min(r.dx.bound, r.dy.bound), r.dx.pass && r.dy.pass});
        return std::vector{r.dx, r.dy};
      });
    if (wants(c, "h_delta"))
      runner.run({"h_delta_c0", "h_delta_c1x", "h_delta_c1y"}, delta, 0, [&] {
        const auto sm = build_h_delta_surface(fam, delta, chi);
        auto r = report_h_delta_surface(sm, K, L, nv, c.smoothing.l_factor, c.workers);
        out.rows.push_back({"h_delta", delta, 0, r.c0.sup_measured, r.c1x.sup_measured, r.c1y.sup_measured,
                            r.c0.bound, r.c1x.bound, r.c0.pass && r.c1x.pass && r.c1y.pass});
        return std::vector{r.c0, r.c1x, r.c1y};
      });
  }
  if (wants(c, "theorem2")) {
    const auto phi = phi3d(c.smoothing.phi, fam);
    for (int J : c.smoothing.J) {
      const double delta = default_delta_for(c.smoothing.epsilon, J);
      runner.run({"theorem2_c0", "theorem2_c1x", "theorem2_c1y"}, delta, J, [&] {
        const auto psi = build_psi_surface(phi, build_h_delta_surface(fam, delta, chi), J);
        auto r = report_theorem2(phi, psi, K, c.smoothing.epsilon, nv, c.workers);
        out.rows.push_back({"theorem2", delta, J, r.c0.sup_measured, r.c1x.sup_measured, r.c1y.sup_measured,
                            r.c0.bound, r.c1x.bound, r.c0.pass && r.c1x.pass && r.c1y.pass});
        return std::vector{r.c0, r.c1x, r.c1y};
      });
    }
  }
}

struct CurveSetup {
  SlopeField3D field;
  CurveFamily3D family;  // true leaves of the field
  Domain K;
  Domain box;
};

inline CurveSetup curve_setup(const ExperimentConfig& c) {
  const Domain unit_box = Domain::space({-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0});
  if (c.family.rfind("slope-field:", 0) == 0) {
    const std::string path = c.family.substr(std::string("slope-field:").size());
    const SampledField s = load_sampled_field(path);
    auto field = slope_field_from_samples(s, c.family);
    const Domain box = c.field_box.value_or(s.hull());
    IntegratorParams p;
    p.tolerance = c.integrator.tolerance;
    p.max_step = c.integrator.step;
    auto fam = family_from_slope_field(field, box, p);
    return {field, fam, c.domain.value_or(box.inset(kSamplingMargin)), box};
  }
  const Domain K = c.domain.value_or(catalog::default_domain_curves(c.family));
  const Domain box = c.field_box.value_or(unit_box);
  if (c.family == "flat") return {catalog::flat_field3(), catalog::flat_curves(), K, box};
  if (c.family == "affine") return {catalog::unit_field3(), catalog::unit_curves(), K, box};
  if (c.family == "canonical-osgood-3d") return {catalog::osgood_field3(), catalog::osgood_curves(), K, box};
  throw InputError("unknown family id for curves in R^3: " + c.family);
}

// n x n leaf labels spread over the y-box of K.
inline std::vector<Vec2> leaf_labels(const Domain& K, int count) {
  const auto side = static_cast<std::size_t>(std::max(1.0, std::round(std::sqrt(double(count)))));
  std::vector<Vec2> as;
  for (double a1 : K.y().inset(0.05).grid(side))
    for (double a2 : K.z().inset(0.05).grid(side)) as.push_back({a1, a2});
  return as;
}

inline std::vector<LeafPair> separation_pairs(const Domain& K, int count, double da, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u1(K.y().lo, K.y().hi), u2(K.z().lo, K.z().hi),
      ut(0.0, 2.0 * std::numbers::pi);
  std::vector<LeafPair> pairs;
  for (int i = 0; i < count; ++i) {
    const Vec2 a{u1(rng), u2(rng)};
    const double t = ut(rng);
    pairs.push_back({a, Vec2{std::cos(t), std::sin(t)} * da});
  }
  return pairs;
}

inline SmoothingParams smoothing_params(const ExperimentConfig& c, double L) {
  SmoothingParams p;
  p.delta0 = c.smoothing.delta0;
  p.L = L;
  p.integrator = integrator_params(c);
  return p;
}

inline void run_curve(const ExperimentConfig& c, SweepResult& out) {
  const CurveSetup setup = curve_setup(c);
  // L of the whole field box enters the construction constant C; the leaf
  // comparison windows use L estimated on K, where the compared leaves start.
  const double L = c.smoothing.L.value_or(
      estimate_log_lipschitz_L(setup.field, setup.box, lipschitz_sampling(c)).L_effective);
  const double L_K =
      c.smoothing.L.value_or(estimate_log_lipschitz_L(setup.field, setup.K, lipschitz_sampling(c)).L_effective);
  CellRunner runner(out);
  if (wants(c, "basic_assumption"))
    runner.run({"basic_assumption"}, kNaN, 0, [&] {
      return std::vector{check_basic_assumption(setup.field, setup.box, L, lipschitz_sampling(c))};
    });
  const double tau = c.smoothing.tau;
  for (double delta : c.smoothing.delta) {
    std::optional<SmoothedField> sf;
    auto field = [&]() -> const SmoothedField& {
      if (!sf) sf.emplace(build_F_delta(setup.field, delta, setup.box, smoothing_params(c, L)));
      return *sf;
    };
    std::optional<RSelection> rsel;
    auto radius = [&]() -> const RSelection& {
      if (!rsel) rsel = select_R(field());
      return *rsel;
    };
    if (wants(c, "lemma3"))
      runner.run({"lemma3_sup", "lemma3_jacobian"}, delta, 0, [&] {
        auto r = report_lemma3(field(), setup.K, static_cast<std::size_t>(c.sampling.lemma3_grid), c.workers);
        return std::vector{r.c0, r.c1};
      });
    if (wants(c, "lemma5"))
      runner.run({"lemma5"}, delta, 0, [&] {
        const auto xs =
            Interval{0.0, corollary1_window(tau, L_K)}.grid(static_cast<std::size_t>(c.sampling.stations));
        std::vector<double> all_x, all_phi;
        for (const Vec2& a : leaf_labels(setup.K, 9)) {
          std::vector<bool> reached;
          const auto phi = leaf_deviation(field(), setup.family, a, xs, &reached);
          for (std::size_t i = 0; i < xs.size(); ++i)
            if (reached[i]) {
              all_x.push_back(xs[i]);
              all_phi.push_back(phi[i]);
            }
        }
        auto r = check_lemma5(all_x, all_phi, L_K, delta);
        tag(r, field());
        r.params.L = L_K;
        r.params.tau = tau;
        r.grid = "9 leaves x " + std::to_string(xs.size()) + " stations on [0, " + format_double(xs.back()) + "]";
        return std::vector{r};
      });
    if (wants(c, "corollary1"))
      runner.run({"corollary1"}, delta, 0, [&] {
        return std::vector{check_corollary1(field(), setup.family, leaf_labels(setup.K, c.sampling.leaves), tau, L_K,
                                            static_cast<std::size_t>(c.sampling.stations), c.workers)};
      });
    if (wants(c, "leaf_separation"))
      runner.run({"leaf_separation_lower", "leaf_separation_upper", "leaf_separation_rate"}, delta, 0, [&] {
        const double R = radius().R;
        const auto pairs = separation_pairs(setup.K, c.sampling.pairs, 1e-4, c.seed);
        auto r = check_leaf_separation(field(), pairs, Interval{-R, R}.grid(41), field().C(), c.workers);
        for (auto* rep : {&r.lower, &r.upper, &r.rate}) rep->params.R = R;
        return std::vector{r.lower, r.upper, r.rate};
      });
    if (wants(c, "final_bound"))
      runner.run({"grad_pi_delta", "final_bound"}, delta, 0, [&] {
        const auto& rs = radius();
        auto r = check_grad_pi_and_final(field(), Domain::polydisk(rs.R),
                                         static_cast<std::size_t>(c.sampling.final_grid), field().C(), c.workers);
        for (auto* rep : {&r.grad, &r.final})
          for (const auto& note : rs.notes) rep->notes.push_back(note);
        return std::vector{r.grad, r.final};
      });
  }
}

}  // namespace detail

inline SweepResult run_sweep(ExperimentConfig config) {
  validate(config);
  SweepResult out;
  out.suite = config.effective_suite();
  out.family = config.family;
  switch (out.suite) {
    case Suite::r2: detail::run_r2(config, out); break;
    case Suite::surface: detail::run_surface(config, out); break;
    case Suite::curve: detail::run_curve(config, out); break;
  }
  out.sort();
  return out;
}

// --- emission ---------------------------------------------------------------

inline constexpr const char* kBoundCsvHeader = "check,delta,tau,L,C,R,measured,bound,margin,pass";
inline constexpr const char* kR2CsvHeader =
    "experiment,family,delta,J,sup_err_c0,sup_err_c1,bound_c0,bound_c1,pass";
inline constexpr const char* kSurfaceCsvHeader =
    "experiment,family,delta,J,sup_err_c0,sup_err_c1x,sup_err_c1y,bound_c0,bound_c1,pass";

namespace detail {

// NaN cells are left empty.
inline std::string cell(double v) { return std::isnan(v) ? std::string{} : format_double(v); }
inline std::string cell(int v) { return v ? std::to_string(v) : std::string{}; }
inline const char* cell(bool b) { return b ? "true" : "false"; }

}  // namespace detail

inline void write_bound_csv(std::ostream& os, const std::vector<SweepEntry>& entries,
                            const std::string& prefix = {}) {
  os << kBoundCsvHeader << '\n';
  for (const auto& e : entries) {
    const auto& r = e.report;
    os << prefix << r.name << ',' << detail::cell(r.params.delta) << ',' << detail::cell(r.params.tau) << ','
       << detail::cell(r.params.L) << ',' << detail::cell(r.params.C) << ',' << detail::cell(r.params.R) << ','
       << detail::cell(r.measured) << ',' << detail::cell(r.bound) << ',' << detail::cell(r.margin) << ','
       << detail::cell(r.pass) << '\n';
  }
}

inline void write_experiment_csv(std::ostream& os, Suite suite, const std::string& family,
                                 const std::vector<ExperimentRow>& rows) {
  const bool surface = suite == Suite::surface;
  os << (surface ? kSurfaceCsvHeader : kR2CsvHeader) << '\n';
  for (const auto& r : rows) {
    os << r.experiment << ',' << family << ',' << detail::cell(r.delta) << ',' << detail::cell(r.J) << ','
       << detail::cell(r.c0) << ',' << detail::cell(r.c1) << ',';
    if (surface) os << detail::cell(r.c1y) << ',';
    os << detail::cell(r.bound_c0) << ',' << detail::cell(r.bound_c1) << ',' << detail::cell(r.pass) << '\n';
  }
}

inline void write_plot_data(std::ostream& os, const BoundReport& r) {
  os << "# " << r.name << ": x measured bound\n";
  for (const auto& p : r.profile)
    os << format_double(p.x) << ' ' << format_double(p.measured) << ' ' << format_double(p.bound) << '\n';
}

inline std::string plot_file_name(const std::string& stem, const SweepEntry& e) {
  std::string s = stem + "_" + e.report.name;
  if (!std::isnan(e.delta)) s += "_d" + format_double(e.delta);
  if (e.J) s += "_J" + std::to_string(e.J);
  return s + ".dat";
}

inline std::string summary_line(const SweepResult& r) {
  const auto passed = std::count_if(r.entries.begin(), r.entries.end(), [](const auto& e) { return e.report.pass; });
  return "suite " + to_string(r.suite) + " family " + r.family + ": " + std::to_string(passed) + "/" +
         std::to_string(r.entries.size()) + " reports pass -> " + (r.pass() ? "PASS" : "FAIL");
}

struct OutputPaths {
  std::filesystem::path dir;
  std::string stem;  // file-name prefix, defaults to the suite name
};

inline void ensure_dir(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw InputError("cannot create directory '" + p.string() + "': " + ec.message());
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw InputError("cannot write '" + p.string() + "'");
  return f;
}

// Writes <stem>_reports.csv, <stem>_experiments.csv (r2 and surface suites),
// and plots/<stem>_<check>_d<delta>[_J<J>].dat; prints the summary line.
inline void emit_reports(const SweepResult& result, const OutputPaths& paths, std::ostream& summary = std::cout) {
  const std::string stem = paths.stem.empty() ? to_string(result.suite) : paths.stem;
  ensure_dir(paths.dir);
  {
    auto f = open_out(paths.dir / (stem + "_reports.csv"));
    write_bound_csv(f, result.entries);
  }
  if (result.suite != Suite::curve) {
    auto f = open_out(paths.dir / (stem + "_experiments.csv"));
    write_experiment_csv(f, result.suite, result.family, result.rows);
  }
  const auto plots = paths.dir / "plots";
  for (const auto& e : result.entries) {
    if (e.report.profile.empty()) continue;
    ensure_dir(plots);
    auto f = open_out(plots / plot_file_name(stem, e));
    write_plot_data(f, e.report);
  }
  summary << summary_line(result) << '\n';
}

}  // namespace lamsmooth
