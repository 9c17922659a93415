#pragma once

// Experiment configuration: a YAML document with nested sections. Loading
// fills defaults, rejects unknown keys, and validates values; errors carry
// the line number and the offending field.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lamsmooth/catalog.hpp"
#include "lamsmooth/cutoff.hpp"
#include "lamsmooth/domain.hpp"
#include "lamsmooth/errors.hpp"
#include "lamsmooth/format.hpp"
#include "lamsmooth/smoothing_r3_curves.hpp"

namespace lamsmooth {

enum class Suite { r2, surface, curve };

inline std::string to_string(Suite s) {
  switch (s) {
    case Suite::r2: return "r2";
    case Suite::surface: return "surface";
    case Suite::curve: return "curve";
  }
  return "r2";
}

inline const std::vector<std::string>& suite_checks(Suite s) {
  static const std::vector<std::string> r2{"basic_assumption", "lemma1", "lemma2", "h_delta", "theorem1"};
  static const std::vector<std::string> surface{"basic_assumption", "prop2", "h_delta", "theorem2"};
  static const std::vector<std::string> curve{"basic_assumption", "lemma3",          "lemma5",
                                              "corollary1",       "leaf_separation", "final_bound"};
  switch (s) {
    case Suite::r2: return r2;
    case Suite::surface: return surface;
    case Suite::curve: return curve;
  }
  return r2;
}

struct SmoothingConfig {
  std::vector<double> delta;  // empty until defaults are filled
  std::vector<int> J;
  double tau = 0.5;
  ChiVariant chi = ChiVariant::cubic;
  double delta0 = kDefaultDelta0;
  double l_factor = 1.5;
  double epsilon = 0.01;
  std::string phi = "pi";   // pi | x | y (z for surfaces)
  std::optional<double> L;  // overrides the estimated L_effective
  bool operator==(const SmoothingConfig&) const = default;
};

struct IntegratorConfig {
  double step = 1e-3;
  double tolerance = 1e-10;
  bool operator==(const IntegratorConfig&) const = default;
};

struct SamplingConfig {
  int grid = 512;          // per axis, 2D sup grids
  int surface_grid = 128;  // per axis, base grids for surfaces
  int volume_grid = 32;    // per axis, 3D sup grids for surfaces
  int lemma3_grid = 128;   // per axis, field sup grids for curves
  int final_grid = 9;      // per axis, D_R grid for the gradient and final bound
  int leaves = 100;
  int stations = 100;
  int pairs = 50;
  int lipschitz_pairs = 10000;
  int envelope_samples = 10000;
  bool operator==(const SamplingConfig&) const = default;
};

struct ExperimentConfig {
  std::string family;
  std::optional<Suite> suite;
  std::optional<Domain> domain;     // K
  std::optional<Domain> field_box;  // curves: box carrying F_delta and the leaves
  SmoothingConfig smoothing;
  IntegratorConfig integrator;
  SamplingConfig sampling;
  std::vector<std::string> checks;
  std::string out_dir = "out";
  std::uint64_t seed = 7;
  int workers = 1;

  bool operator==(const ExperimentConfig&) const = default;

  Suite effective_suite() const {
    if (suite) return *suite;
    return catalog::is_curve_family_id(family) ? Suite::curve : Suite::r2;
  }
};

namespace detail {

inline int line_of(const YAML::Node& n) { return n.Mark().is_null() ? -1 : n.Mark().line + 1; }

inline void reject_unknown(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
  if (!map.IsMap()) throw ConfigError("'" + where + "' must be a mapping", line_of(map), where);
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      const std::string field = where.empty() ? key : where + "." + key;
      throw ConfigError("unknown key '" + field + "'", line_of(kv.first), field);
    }
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("invalid value for '" + field + "'", line_of(n), field);
  }
}

template <class T>
std::vector<T> list(const YAML::Node& n, const std::string& field) {
  std::vector<T> out;
  if (n.IsSequence()) {
    for (const auto& v : n) out.push_back(scalar<T>(v, field));
  } else {
    out.push_back(scalar<T>(n, field));
  }
  return out;
}

inline Interval interval(const YAML::Node& n, const std::string& field) {
  const auto v = list<double>(n, field);
  if (v.size() != 2 || !(v[0] <= v[1]))
    throw ConfigError("'" + field + "' must be [lo, hi] with lo <= hi", line_of(n), field);
  return {v[0], v[1]};
}

inline Domain domain(const YAML::Node& n, const std::string& field) {
  reject_unknown(n, {"x", "y", "z"}, field);
  if (!n["x"] || !n["y"]) throw ConfigError("'" + field + "' needs x and y", line_of(n), field);
  const Interval x = interval(n["x"], field + ".x"), y = interval(n["y"], field + ".y");
  if (n["z"]) return Domain::space(x, y, interval(n["z"], field + ".z"));
  return Domain::plane(x, y);
}

inline Suite suite_from_string(const std::string& s, int line) {
  if (s == "r2") return Suite::r2;
  if (s == "surface") return Suite::surface;
  if (s == "curve") return Suite::curve;
  throw ConfigError("suite must be r2, surface or curve, got '" + s + "'", line, "suite");
}

inline bool known_family(const std::string& id, Suite s) {
  static const std::set<std::string> plain{"flat", "affine", "canonical-osgood", "perturbed-affine"};
  if (s == Suite::curve)
    return id == "flat" || id == "affine" || id == "canonical-osgood-3d" || id.rfind("slope-field:", 0) == 0;
  return plain.count(id) > 0;
}

}  // namespace detail

inline std::vector<double> default_deltas(Suite s) {
  switch (s) {
    case Suite::r2: return {0.1, 0.05, 0.025, 0.0125};
    case Suite::surface: return {0.1, 0.05, 0.025};
    case Suite::curve: return {1e-2, 1e-3, 1e-4};
  }
  return {};
}

// Fills defaults and checks every field; `line` is reported for errors that
// come from a parsed document (-1 otherwise).
inline void validate(ExperimentConfig& c) {
  auto bad = [](const std::string& field, const std::string& what) { throw ConfigError(what, -1, field); };
  if (c.family.empty()) bad("family", "family is required");
  const Suite s = c.effective_suite();
  if (!detail::known_family(c.family, s)) bad("family", "unknown family '" + c.family + "' for suite " + to_string(s));
  if (c.smoothing.delta.empty()) c.smoothing.delta = default_deltas(s);
  if (c.smoothing.J.empty()) c.smoothing.J = {32};
  if (!(c.smoothing.delta0 > 0.0 && c.smoothing.delta0 < 1.0)) bad("smoothing.delta0", "delta0 must lie in (0, 1)");
  for (double d : c.smoothing.delta)
    if (!(d > 0.0 && d < c.smoothing.delta0))
      bad("smoothing.delta", "delta = " + format_double(d) + " must lie in (0, delta0 = " +
                                 format_double(c.smoothing.delta0) + ")");
  for (int j : c.smoothing.J)
    if (j < 1) bad("smoothing.J", "J must be positive");
  if (!(c.smoothing.tau > 0.0 && c.smoothing.tau < 1.0)) bad("smoothing.tau", "tau must lie in (0, 1)");
  if (!(c.smoothing.l_factor >= 1.0)) bad("smoothing.l_factor", "l_factor must be at least 1");
  if (!(c.smoothing.epsilon > 0.0)) bad("smoothing.epsilon", "epsilon must be positive");
  if (c.smoothing.L && !(*c.smoothing.L > 0.0)) bad("smoothing.L", "L must be positive");
  static const std::set<std::string> phis{"pi", "x", "y", "z"};
  if (!phis.count(c.smoothing.phi)) bad("smoothing.phi", "phi must be one of pi, x, y, z");
  if (!(c.integrator.step > 0.0)) bad("integrator.step", "step must be positive");
  if (!(c.integrator.tolerance > 0.0)) bad("integrator.tolerance", "tolerance must be positive");
  const auto& sm = c.sampling;
  for (auto [v, f] : {std::pair{sm.grid, "sampling.grid"}, {sm.surface_grid, "sampling.surface_grid"},
                      {sm.volume_grid, "sampling.volume_grid"}, {sm.lemma3_grid, "sampling.lemma3_grid"},
                      {sm.final_grid, "sampling.final_grid"}, {sm.stations, "sampling.stations"}})
    if (v < 2) bad(f, std::string(f) + " must be at least 2");
  for (auto [v, f] : {std::pair{sm.leaves, "sampling.leaves"}, {sm.pairs, "sampling.pairs"},
                      {sm.lipschitz_pairs, "sampling.lipschitz_pairs"},
                      {sm.envelope_samples, "sampling.envelope_samples"}})
    if (v < 1) bad(f, std::string(f) + " must be positive");
  const int dim = s == Suite::r2 ? 2 : 3;
  if (c.domain && c.domain->dimension() != dim)
    bad("domain", "domain must have " + std::to_string(dim) + " axes for suite " + to_string(s));
  if (c.field_box && c.field_box->dimension() != 3) bad("field_box", "field_box must have 3 axes");
  const auto& allowed = suite_checks(s);
  for (const auto& ch : c.checks)
    if (std::find(allowed.begin(), allowed.end(), ch) == allowed.end())
      bad("checks", "check '" + ch + "' is not part of suite " + to_string(s));
  if (c.workers < 1) bad("workers", "workers must be positive");
  if (c.out_dir.empty()) bad("output.dir", "output directory must not be empty");
}

inline ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error: " + e.msg, e.mark.is_null() ? -1 : e.mark.line + 1);
  }
  if (!root.IsMap()) throw ConfigError("configuration must be a mapping", detail::line_of(root));
  using detail::line_of;
  using detail::list;
  using detail::scalar;
  detail::reject_unknown(root, {"family", "suite", "domain", "field_box", "smoothing", "integrator", "sampling",
                                "checks", "output", "seed", "workers"},
                         "");
  ExperimentConfig c;
  if (!root["family"]) throw ConfigError("family is required", line_of(root), "family");
  c.family = scalar<std::string>(root["family"], "family");
  if (auto n = root["suite"]) c.suite = detail::suite_from_string(scalar<std::string>(n, "suite"), line_of(n));
  if (auto n = root["domain"]) c.domain = detail::domain(n, "domain");
  if (auto n = root["field_box"]) c.field_box = detail::domain(n, "field_box");
  if (auto n = root["smoothing"]) {
    detail::reject_unknown(n, {"delta", "J", "tau", "chi", "delta0", "l_factor", "epsilon", "phi", "L"},
                           "smoothing");
    if (n["delta"]) c.smoothing.delta = list<double>(n["delta"], "smoothing.delta");
    if (n["J"]) c.smoothing.J = list<int>(n["J"], "smoothing.J");
    if (n["tau"]) c.smoothing.tau = scalar<double>(n["tau"], "smoothing.tau");
    if (n["chi"]) {
      try {
        c.smoothing.chi = chi_variant_from_string(scalar<std::string>(n["chi"], "smoothing.chi"));
      } catch (const Error& e) {
        throw ConfigError(e.what(), line_of(n["chi"]), "smoothing.chi");
      }
    }
    if (n["delta0"]) c.smoothing.delta0 = scalar<double>(n["delta0"], "smoothing.delta0");
    if (n["l_factor"]) c.smoothing.l_factor = scalar<double>(n["l_factor"], "smoothing.l_factor");
    if (n["epsilon"]) c.smoothing.epsilon = scalar<double>(n["epsilon"], "smoothing.epsilon");
    if (n["phi"]) c.smoothing.phi = scalar<std::string>(n["phi"], "smoothing.phi");
    if (n["L"]) c.smoothing.L = scalar<double>(n["L"], "smoothing.L");
  }
  if (auto n = root["integrator"]) {
    detail::reject_unknown(n, {"step", "tolerance"}, "integrator");
    if (n["step"]) c.integrator.step = scalar<double>(n["step"], "integrator.step");
    if (n["tolerance"]) c.integrator.tolerance = scalar<double>(n["tolerance"], "integrator.tolerance");
  }
  if (auto n = root["sampling"]) {
    auto& s = c.sampling;
    const std::vector<std::pair<const char*, int*>> fields{
        {"grid", &s.grid},         {"surface_grid", &s.surface_grid},     {"volume_grid", &s.volume_grid},
        {"lemma3_grid", &s.lemma3_grid}, {"final_grid", &s.final_grid},   {"leaves", &s.leaves},
        {"stations", &s.stations}, {"pairs", &s.pairs},                   {"lipschitz_pairs", &s.lipschitz_pairs},
        {"envelope_samples", &s.envelope_samples}};
    std::set<std::string> keys;
    for (const auto& f : fields) keys.insert(f.first);
    detail::reject_unknown(n, keys, "sampling");
    for (const auto& [key, dst] : fields)
      if (n[key]) *dst = scalar<int>(n[key], std::string("sampling.") + key);
  }
  if (auto n = root["checks"]) c.checks = list<std::string>(n, "checks");
  if (auto n = root["output"]) {
    detail::reject_unknown(n, {"dir"}, "output");
    if (n["dir"]) c.out_dir = scalar<std::string>(n["dir"], "output.dir");
  }
  if (auto n = root["seed"]) c.seed = scalar<std::uint64_t>(n, "seed");
  if (auto n = root["workers"]) c.workers = scalar<int>(n, "workers");

  // Re-raise validation errors with the line of the offending section.
  try {
    validate(c);
  } catch (const ConfigError& e) {
    const std::string top = e.field().substr(0, e.field().find('.'));
    const auto sub = e.field().find('.') == std::string::npos ? std::string{} : e.field().substr(e.field().find('.') + 1);
    YAML::Node at = root[top];
    if (at && !sub.empty() && at.IsMap() && at[sub]) at = at[sub];
    if (top == "output" && at && at.IsMap() && at["dir"]) at = at["dir"];
    throw ConfigError(e.message(), at ? line_of(at) : -1, e.field());
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace detail {

inline void emit_domain(YAML::Emitter& out, const char* key, const Domain& d) {
  out << YAML::Key << key << YAML::Value << YAML::BeginMap;
  const char* names[3] = {"x", "y", "z"};
  for (int i = 0; i < d.dimension(); ++i) {
    out << YAML::Key << names[i] << YAML::Value << YAML::Flow << YAML::BeginSeq
        << format_double(d.axis(i).lo) << format_double(d.axis(i).hi) << YAML::EndSeq;
  }
  out << YAML::EndMap;
}

}  // namespace detail

// Block-style YAML that parse_config reads back to an equal config.
inline std::string serialize_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "family" << YAML::Value << c.family;
  if (c.suite) out << YAML::Key << "suite" << YAML::Value << to_string(*c.suite);
  if (c.domain) detail::emit_domain(out, "domain", *c.domain);
  if (c.field_box) detail::emit_domain(out, "field_box", *c.field_box);
  out << YAML::Key << "smoothing" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "delta" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double d : c.smoothing.delta) out << format_double(d);
  out << YAML::EndSeq;
  out << YAML::Key << "J" << YAML::Value << YAML::Flow << c.smoothing.J;
  out << YAML::Key << "tau" << YAML::Value << format_double(c.smoothing.tau);
  out << YAML::Key << "chi" << YAML::Value << to_string(c.smoothing.chi);
  out << YAML::Key << "delta0" << YAML::Value << format_double(c.smoothing.delta0);
  out << YAML::Key << "l_factor" << YAML::Value << format_double(c.smoothing.l_factor);
  out << YAML::Key << "epsilon" << YAML::Value << format_double(c.smoothing.epsilon);
  out << YAML::Key << "phi" << YAML::Value << c.smoothing.phi;
  if (c.smoothing.L) out << YAML::Key << "L" << YAML::Value << format_double(*c.smoothing.L);
  out << YAML::EndMap;
  out << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "step" << YAML::Value << format_double(c.integrator.step);
  out << YAML::Key << "tolerance" << YAML::Value << format_double(c.integrator.tolerance);
  out << YAML::EndMap;
  const auto& s = c.sampling;
  out << YAML::Key << "sampling" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "grid" << YAML::Value << s.grid;
  out << YAML::Key << "surface_grid" << YAML::Value << s.surface_grid;
  out << YAML::Key << "volume_grid" << YAML::Value << s.volume_grid;
  out << YAML::Key << "lemma3_grid" << YAML::Value << s.lemma3_grid;
  out << YAML::Key << "final_grid" << YAML::Value << s.final_grid;
  out << YAML::Key << "leaves" << YAML::Value << s.leaves;
  out << YAML::Key << "stations" << YAML::Value << s.stations;
  out << YAML::Key << "pairs" << YAML::Value << s.pairs;
  out << YAML::Key << "lipschitz_pairs" << YAML::Value << s.lipschitz_pairs;
  out << YAML::Key << "envelope_samples" << YAML::Value << s.envelope_samples;
  out << YAML::EndMap;
  if (!c.checks.empty()) out << YAML::Key << "checks" << YAML::Value << YAML::Flow << c.checks;
  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap << YAML::Key << "dir" << YAML::Value << c.out_dir
      << YAML::EndMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "workers" << YAML::Value << c.workers;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace lamsmooth
