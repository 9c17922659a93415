#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace lamsmooth {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReportParams {
  double delta = kNaN;
  double tau = kNaN;
  double L = kNaN;
  double C = kNaN;
  double R = kNaN;
  int J = 0;
};

struct ProfilePoint {
  double x = 0.0;
  double measured = 0.0;
  double bound = 0.0;
};

// One measured quantity against one bound. For pointwise bounds the report
// keeps the binding sample (smallest margin): `measured` and `bound` are the
// two sides there and margin = bound - measured. `sup_measured` is the
// largest left-hand side seen anywhere. Sample grids only ever give a lower
// bound on a true supremum.
struct BoundReport {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  double sup_measured = 0.0;
  double slack = 0.0;
  bool pass = true;
  bool vacuous = false;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  ReportParams params;
  std::string grid;
  std::vector<std::string> notes;
  std::vector<ProfilePoint> profile;

  void observe(double lhs, double rhs) {
    ++samples;
    if (!(lhs == lhs) || !(rhs == rhs)) {
      margin = -std::numeric_limits<double>::infinity();
      measured = lhs;
      bound = rhs;
      sup_measured = kNaN;
      return;
    }
    sup_measured = std::max(sup_measured, lhs);
    const double m = rhs - lhs;
    if (m < margin) {
      margin = m;
      measured = lhs;
      bound = rhs;
    }
  }

  void skip(const std::string& why = {}) {
    ++skipped;
    if (!why.empty() && notes.size() < 8) notes.push_back(why);
  }

  // pass <=> margin >= -slack. No samples at all is a flagged vacuous pass.
  BoundReport& finalize() {
    if (samples == 0) {
      vacuous = true;
      pass = true;
      margin = 0.0;
      notes.push_back("vacuous: no sample satisfied the hypotheses");
    } else {
      pass = margin >= -slack;
    }
    return *this;
  }
};

// Collects (x, measured, bound) triples, keeping per x the largest measured
// value and the bound at the tightest sample.
class ProfileBuilder {
 public:
  void add(double x, double measured, double bound) {
    auto [it, inserted] = pts_.try_emplace(x, ProfilePoint{x, measured, bound});
    if (!inserted) {
      auto& p = it->second;
      if (bound - measured < p.bound - p.measured) p.bound = bound;
      p.measured = std::max(p.measured, measured);
    }
  }
  std::vector<ProfilePoint> points() const {
    std::vector<ProfilePoint> out;
    out.reserve(pts_.size());
    for (const auto& [x, p] : pts_) out.push_back(p);
    return out;
  }

 private:
  std::map<double, ProfilePoint> pts_;
};

}  // namespace lamsmooth
