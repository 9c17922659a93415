#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lamsmooth/harness.hpp"

using namespace lamsmooth;

namespace {

const std::filesystem::path kSource = LAMSMOOTH_SOURCE_DIR;

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<double> measured(const SweepResult& r, const std::string& name) {
  std::vector<double> v;
  for (const auto& e : r.entries)
    if (e.report.name == name) v.push_back(e.report.measured);
  return v;
}

}  // namespace

TEST(Config, MinimalConfigFillsDefaults) {
  auto c = parse_config("family: flat\n");
  EXPECT_EQ(c.family, "flat");
  EXPECT_EQ(c.effective_suite(), Suite::r2);
  EXPECT_FALSE(c.smoothing.delta.empty());
  EXPECT_EQ(c.smoothing.J, std::vector<int>{32});
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.workers, 1);
  EXPECT_EQ(c.out_dir, "out");
}

TEST(Config, CurveFamilySelectsCurveSuite) {
  EXPECT_EQ(parse_config("family: canonical-osgood-3d\n").effective_suite(), Suite::curve);
}

TEST(Config, DeltaOutsideRangeNamesField) {
  try {
    parse_config("family: flat\nsmoothing:\n  delta: [0.5]\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "smoothing.delta");
  }
}

TEST(Config, UnknownKeyReportsLine) {
  try {
    parse_config("family: flat\nsmoothing:\n  delta: [0.1]\n  bogus: 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
}

TEST(Config, SyntaxErrorReportsLine) {
  try {
    parse_config("family: flat\nsmoothing: [1, 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_GT(e.line(), 0);
    EXPECT_EQ(std::string(e.what()).rfind("line ", 0), 0u);
  }
}

TEST(Config, RejectsMismatchedCheckAndFamily) {
  EXPECT_THROW(parse_config("family: flat\nchecks: [lemma3]\n"), ConfigError);
  EXPECT_THROW(parse_config("family: no-such-family\n"), ConfigError);
  EXPECT_THROW(parse_config("smoothing:\n  delta: [0.1]\n"), ConfigError);
}

TEST(Config, SerializeRoundTrips) {
  auto c = load_config((kSource / "samples/canonical_3d.yaml").string());
  c.seed = 11;
  c.workers = 2;
  c.smoothing.L = 1.7;
  const auto back = parse_config(serialize_config(c));
  EXPECT_EQ(back, c);
}

TEST(Config, SampleConfigsLoad) {
  for (const auto& e : std::filesystem::directory_iterator(kSource / "samples"))
    if (e.path().extension() == ".yaml") {
      EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
    }
  EXPECT_THROW(load_config("/nonexistent/config.yaml"), InputError);
}

TEST(Sweep, FlatFamilyHasZeroDerivativeErrors) {
  auto c = parse_config("family: flat\nsmoothing:\n  delta: [0.1]\nsampling:\n  grid: 32\n");
  const auto r = run_sweep(c);
  ASSERT_FALSE(r.entries.empty());
  EXPECT_TRUE(r.pass());
  for (const char* name : {"h_delta_c1", "lemma2", "theorem1_c1"})
    for (double m : measured(r, name)) EXPECT_EQ(m, 0.0) << name;
}

TEST(Sweep, CanonicalErrorsDecreaseWithDelta) {
  auto c = parse_config(
      "family: canonical-osgood\ndomain:\n  x: [-1, 1]\n  y: [0.05, 0.95]\n"
      "smoothing:\n  delta: [0.1, 0.05, 0.025]\nsampling:\n  grid: 128\nchecks: [h_delta]\n");
  const auto r = run_sweep(c);
  EXPECT_TRUE(r.pass());
  const auto m = measured(r, "h_delta_c0");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_GT(m[0], m[1]);
  EXPECT_GT(m[1], m[2]);
}

TEST(Sweep, CurveSuiteProducesEveryReport) {
  auto c = parse_config(
      "family: canonical-osgood-3d\ndomain:\n  x: [-1, 1]\n  y: [0.05, 0.95]\n  z: [0.05, 0.95]\n"
      "field_box:\n  x: [-1, 1]\n  y: [-1, 1]\n  z: [-1, 1]\n"
      "smoothing:\n  delta: [0.001]\nsampling:\n  lemma3_grid: 32\n  leaves: 10\n  stations: 20\n  pairs: 5\n");
  const auto r = run_sweep(c);
  std::set<std::string> names;
  for (const auto& e : r.entries) names.insert(e.report.name);
  for (const char* want : {"basic_assumption", "lemma3_sup", "lemma3_jacobian", "lemma5", "corollary1",
                           "leaf_separation_lower", "leaf_separation_upper", "final_bound"})
    EXPECT_TRUE(names.count(want)) << want;
  EXPECT_TRUE(r.pass());
}

TEST(Sweep, SampledFieldSweepPasses) {
  const auto cwd = std::filesystem::current_path();
  std::filesystem::current_path(kSource);
  auto c = load_config("samples/sampled_field.yaml");
  c.sampling.lemma3_grid = 16;
  c.sampling.leaves = 4;
  c.sampling.pairs = 4;
  const auto r = run_sweep(c);
  std::filesystem::current_path(cwd);
  EXPECT_TRUE(r.pass());
  EXPECT_FALSE(r.entries.empty());
}

TEST(Emission, EmptyResultWritesHeaderOnly) {
  std::ostringstream os;
  write_bound_csv(os, {});
  EXPECT_EQ(os.str(), std::string(kBoundCsvHeader) + "\n");
}

TEST(Emission, OneReportIsOneRowWithEmptyNaNCells) {
  SweepEntry e;
  e.report.name = "lemma3_sup";
  e.report.measured = 0.25;
  e.report.bound = 0.5;
  e.report.margin = 0.25;
  e.report.pass = true;
  std::ostringstream os;
  write_bound_csv(os, {e});
  const auto l = lines_of(os.str());
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[1].rfind("lemma3_sup,", 0), 0u);
  EXPECT_NE(l[1].find(",0.25,0.5,0.25,true"), std::string::npos);
}

TEST(Emission, WritesOneRowPerDeltaAndCheck) {
  auto c = parse_config("family: affine\nsmoothing:\n  delta: [0.1, 0.05]\n  J: [4]\nsampling:\n  grid: 32\n"
                        "checks: [h_delta]\n");
  const auto r = run_sweep(c);
  const auto dir = std::filesystem::temp_directory_path() / "lamsmooth_emit_test";
  std::filesystem::remove_all(dir);
  std::ostringstream summary;
  emit_reports(r, {dir, "t"}, summary);
  std::ifstream f(dir / "t_reports.csv");
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(lines_of(ss.str()).size(), r.entries.size() + 1);
  std::set<std::string> names;
  for (const auto& e : r.entries) names.insert(e.report.name);
  EXPECT_EQ(names, (std::set<std::string>{"h_delta_c0", "h_delta_c1"}));
  EXPECT_EQ(r.entries.size(), 4u);
  EXPECT_TRUE(std::filesystem::exists(dir / "t_experiments.csv"));
  EXPECT_NE(summary.str().find("PASS"), std::string::npos);
  std::filesystem::remove_all(dir);
}
