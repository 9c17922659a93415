// Command-line front end: single-suite runs, config-driven sweeps, and the
// acceptance table.

#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lamsmooth/lamsmooth.hpp"

namespace ls = lamsmooth;

namespace {

struct CommonFlags {
  std::string family;
  std::string config;
  std::vector<double> delta;
  std::vector<int> grid_j;
  std::optional<double> tau;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> tol;
};

void add_common(CLI::App* app, CommonFlags& f, bool with_family = true) {
  if (with_family) app->add_option("--family", f.family, "family id (flat, affine, canonical-osgood, ...)");
  app->add_option("--config", f.config, "YAML experiment config");
  app->add_option("--delta", f.delta, "delta list")->delimiter(',');
  app->add_option("--grid-j", f.grid_j, "partition sizes J")->delimiter(',');
  app->add_option("--tau", f.tau, "leaf-deviation exponent tau in (0,1)");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--workers", f.workers, "worker threads (LAMIN_SMOOTH_WORKERS overrides)");
  app->add_option("--tol", f.tol, "ODE integrator tolerance");
}

std::optional<int> env_workers() {
  const char* v = std::getenv("LAMIN_SMOOTH_WORKERS");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const int n = std::stoi(v, &used);
    if (used != std::string(v).size() || n < 1) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ls::InputError(std::string("LAMIN_SMOOTH_WORKERS must be a positive integer, got '") + v + "'");
  }
}

int resolve_workers(const CommonFlags& f, int fallback) {
  if (auto w = env_workers()) return *w;
  return f.workers.value_or(fallback);
}

ls::ExperimentConfig build_config(const CommonFlags& f, std::optional<ls::Suite> suite) {
  ls::ExperimentConfig c;
  if (!f.config.empty()) c = ls::load_config(f.config);
  if (!f.family.empty()) c.family = f.family;
  if (c.family.empty()) throw ls::InputError("no family given (use --family or a config file)");
  if (suite) c.suite = suite;
  if (!f.delta.empty()) c.smoothing.delta = f.delta;
  if (!f.grid_j.empty()) c.smoothing.J = f.grid_j;
  if (f.tau) c.smoothing.tau = *f.tau;
  if (f.out) c.out_dir = *f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.tol) c.integrator.tolerance = *f.tol;
  c.workers = resolve_workers(f, c.workers);
  ls::validate(c);
  return c;
}

std::string file_stem(const ls::ExperimentConfig& c) {
  std::string fam = c.family;
  for (char& ch : fam)
    if (ch == ':' || ch == '/' || ch == '\\' || ch == ' ') ch = '_';
  return ls::to_string(c.effective_suite()) + "_" + fam;
}

int run_suite(const ls::ExperimentConfig& c) {
  const auto result = ls::run_sweep(c);
  for (const auto& e : result.entries) {
    const auto& r = e.report;
    std::cout << "  " << std::left << std::setw(24) << r.name << " delta=" << std::setw(8)
              << (std::isnan(e.delta) ? std::string("-") : ls::format_double(e.delta));
    if (e.J) std::cout << " J=" << e.J;
    std::cout << " measured=" << ls::format_double(r.measured) << " bound=" << ls::format_double(r.bound) << ' '
              << (r.pass ? "pass" : "FAIL");
    if (r.vacuous) std::cout << " (vacuous)";
    for (const auto& n : r.notes)
      if (n.rfind("cell aborted", 0) == 0) std::cout << " [" << n << "]";
    std::cout << '\n';
  }
  ls::emit_reports(result, {c.out_dir, file_stem(c)}, std::cout);
  return result.pass() ? 0 : 1;
}

int run_verify(const CommonFlags& f, const std::vector<std::string>& only) {
  ls::acceptance::Options o;
  o.seed = f.seed.value_or(7);
  o.workers = resolve_workers(f, 1);
  const std::filesystem::path dir = f.out.value_or("out");
  std::vector<ls::acceptance::CriterionResult> results;
  for (const auto& c : ls::acceptance::criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    auto r = ls::acceptance::run_criterion(c, o);
    std::cout << r.id << ' ' << (r.pass ? "PASS" : "FAIL") << "  " << r.title << "  [" << std::fixed
              << std::setprecision(2) << r.seconds << " s, limit " << std::setprecision(0) << r.limit_seconds
              << " s]" << std::defaultfloat << std::setprecision(6) << "\n    " << r.detail << '\n';
    results.push_back(std::move(r));
  }
  if (results.empty()) throw ls::InputError("no acceptance criterion matches the selection");
  ls::ensure_dir(dir);
  {
    auto out = ls::open_out(dir / "acceptance_reports.csv");
    ls::acceptance::write_reports_csv(out, results);
  }
  {
    auto out = ls::open_out(dir / "acceptance_summary.csv");
    ls::acceptance::write_summary_csv(out, results);
  }
  const bool pass = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  std::cout << "acceptance: " << std::count_if(results.begin(), results.end(), [](const auto& r) { return r.pass; })
            << "/" << results.size() << " criteria pass -> " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothing of partially smooth functions on laminations: constructions and bound checks"};
  app.require_subcommand(1);

  CommonFlags assume_f, r2_f, surf_f, curve_f, sweep_f, verify_f;
  std::string assume_suite, sweep_suite;
  bool verify_all = false;
  std::vector<std::string> verify_only;

  auto* assume = app.add_subcommand("check-assumption", "sample the log-Lipschitz condition (and the leaf-gap envelope in R^2)");
  add_common(assume, assume_f);
  assume->add_option("--suite", assume_suite, "r2, surface or curve (default: inferred from the family)")
      ->check(CLI::IsMember({"r2", "surface", "curve"}));
  auto* r2 = app.add_subcommand("smooth2d", "transversal smoother and composite approximant for curves in R^2");
  add_common(r2, r2_f);
  auto* surf = app.add_subcommand("smooth3d-surface", "smoother and composite approximant for surfaces in R^3");
  add_common(surf, surf_f);
  auto* curve = app.add_subcommand("smooth3d-curve", "smoothed field F_delta and pi_delta for curves in R^3");
  add_common(curve, curve_f);
  auto* sweep = app.add_subcommand("sweep", "run the checks listed in a config file");
  add_common(sweep, sweep_f);
  sweep->add_option("--suite", sweep_suite, "override the config's suite")
      ->check(CLI::IsMember({"r2", "surface", "curve"}));
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria A1-A9");
  add_common(verify, verify_f, false);
  verify->add_flag("--all", verify_all, "run every criterion (the default)");
  verify->add_option("--only", verify_only, "criterion ids, e.g. A3,A7")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  auto suite_of = [](const std::string& s) -> std::optional<ls::Suite> {
    if (s == "r2") return ls::Suite::r2;
    if (s == "surface") return ls::Suite::surface;
    if (s == "curve") return ls::Suite::curve;
    return std::nullopt;
  };

  try {
    if (*assume) {
      auto c = build_config(assume_f, suite_of(assume_suite));
      c.checks = {"basic_assumption"};
      if (c.effective_suite() == ls::Suite::r2) c.checks.push_back("lemma1");
      return run_suite(c);
    }
    if (*r2) return run_suite(build_config(r2_f, ls::Suite::r2));
    if (*surf) return run_suite(build_config(surf_f, ls::Suite::surface));
    if (*curve) return run_suite(build_config(curve_f, ls::Suite::curve));
    if (*sweep) {
      if (sweep_f.config.empty()) throw ls::InputError("sweep needs --config <path>");
      return run_suite(build_config(sweep_f, suite_of(sweep_suite)));
    }
    if (*verify) {
      if (verify_all) verify_only.clear();
      return run_verify(verify_f, verify_only);
    }
  } catch (const ls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ls::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const ls::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
