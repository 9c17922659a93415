#pragma once

// Slope fields F(x, y1, y2) given on a rectilinear grid in a plain-text file:
//
//   nx ny1 ny2
//   x y1 y2 F1 F2      (nx * ny1 * ny2 rows, any order)
//
// Lines starting with '#' are ignored. Values are interpolated trilinearly;
// nx == 1 declares an autonomous field.

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lamsmooth/domain.hpp"
#include "lamsmooth/errors.hpp"
#include "lamsmooth/families.hpp"
#include "lamsmooth/format.hpp"
#include "lamsmooth/vec2.hpp"

namespace lamsmooth {

class SampledField {
 public:
  SampledField(std::vector<double> xs, std::vector<double> y1s, std::vector<double> y2s, std::vector<Vec2> values)
      : xs_(std::move(xs)), y1s_(std::move(y1s)), y2s_(std::move(y2s)), v_(std::move(values)) {
    if (v_.size() != xs_.size() * y1s_.size() * y2s_.size()) throw InputError("sampled field: value count mismatch");
    if (y1s_.size() < 2 || y2s_.size() < 2) throw InputError("sampled field: need at least 2 nodes along y1 and y2");
  }

  bool autonomous() const { return xs_.size() == 1; }

  // Hull of the grid; x is unbounded for autonomous fields.
  Domain hull() const {
    const Interval xr = autonomous() ? Interval{-1.0, 1.0} : Interval{xs_.front(), xs_.back()};
    return Domain::space(xr, {y1s_.front(), y1s_.back()}, {y2s_.front(), y2s_.back()});
  }

  Vec2 operator()(double x, const Vec2& y) const {
    const auto [i, tx] = autonomous() ? std::pair<std::size_t, double>{0, 0.0} : locate(xs_, x, "x");
    const auto [j, ty] = locate(y1s_, y.c1, "y1");
    const auto [k, tz] = locate(y2s_, y.c2, "y2");
    const std::size_t ni = autonomous() ? 1 : 2;
    Vec2 s;
    for (std::size_t a = 0; a < ni; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t c = 0; c < 2; ++c) {
          const double w = (ni == 1 ? 1.0 : (a ? tx : 1.0 - tx)) * (b ? ty : 1.0 - ty) * (c ? tz : 1.0 - tz);
          if (w != 0.0) s = s + at(i + a, j + b, k + c) * w;
        }
    return s;
  }

 private:
  static std::pair<std::size_t, double> locate(const std::vector<double>& g, double v, const char* axis) {
    if (!(v >= g.front() && v <= g.back()))
      throw DomainError(std::string("sampled field: ") + axis + " = " + format_double(v) + " outside [" +
                        format_double(g.front()) + ", " + format_double(g.back()) + "]");
    auto it = std::upper_bound(g.begin(), g.end(), v);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - g.begin()) - 1));
    i = std::min(i, g.size() - 2);
    return {i, (v - g[i]) / (g[i + 1] - g[i])};
  }

  const Vec2& at(std::size_t i, std::size_t j, std::size_t k) const {
    return v_[(i * y1s_.size() + j) * y2s_.size() + k];
  }

  std::vector<double> xs_, y1s_, y2s_;
  std::vector<Vec2> v_;
};

inline SampledField parse_sampled_field(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  int lineno = 0;
  auto next = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      const auto p = out.find_first_not_of(" \t\r");
      if (p == std::string::npos || out[p] == '#') continue;
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& what) {
    throw InputError(source + ":" + std::to_string(lineno) + ": " + what);
  };
  if (!next(line)) fail("missing header line with grid dimensions");
  long nx = 0, ny1 = 0, ny2 = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> nx >> ny1 >> ny2) || nx < 1 || ny1 < 2 || ny2 < 2)
      fail("header must be 'nx ny1 ny2' with nx >= 1 and ny1, ny2 >= 2");
  }
  struct Row {
    double x, y1, y2, f1, f2;
  };
  std::vector<Row> rows;
  while (next(line)) {
    std::istringstream ls(line);
    Row r;
    if (!(ls >> r.x >> r.y1 >> r.y2 >> r.f1 >> r.f2)) fail("expected 'x y1 y2 F1 F2'");
    std::string extra;
    if (ls >> extra) fail("trailing data '" + extra + "'");
    rows.push_back(r);
  }
  const auto expected = static_cast<std::size_t>(nx * ny1 * ny2);
  if (rows.size() != expected)
    fail("expected " + std::to_string(expected) + " data rows, found " + std::to_string(rows.size()));
  auto axis = [&](auto get, long n, const char* name) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(get(r));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (static_cast<long>(v.size()) != n)
      fail(std::string("axis ") + name + " has " + std::to_string(v.size()) + " distinct values, header says " +
           std::to_string(n));
    return v;
  };
  auto xs = axis([](const Row& r) { return r.x; }, nx, "x");
  auto y1s = axis([](const Row& r) { return r.y1; }, ny1, "y1");
  auto y2s = axis([](const Row& r) { return r.y2; }, ny2, "y2");
  std::vector<Vec2> values(expected);
  std::vector<bool> seen(expected, false);
  auto index = [](const std::vector<double>& g, double v) {
    return static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), v) - g.begin());
  };
  for (const auto& r : rows) {
    const std::size_t id = (index(xs, r.x) * y1s.size() + index(y1s, r.y1)) * y2s.size() + index(y2s, r.y2);
    if (seen[id]) fail("duplicate grid node (" + format_double(r.x) + ", " + format_double(r.y1) + ", " +
                       format_double(r.y2) + ")");
    seen[id] = true;
    values[id] = {r.f1, r.f2};
  }
  return SampledField(std::move(xs), std::move(y1s), std::move(y2s), std::move(values));
}

inline SampledField load_sampled_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open slope-field file '" + path + "'");
  return parse_sampled_field(in, path);
}

// The slope field of the samples, extended outside the sampled hull by
// nearest-point projection onto it (continuous, same modulus). The smoothing
// construction evaluates one grid ring and one kernel width beyond the box.
inline SlopeField3D slope_field_from_samples(const SampledField& s, const std::string& name) {
  auto shared = std::make_shared<const SampledField>(s);
  const Domain h = s.hull();
  return {name,
          [shared, h](double x, const Vec2& y) {
            return (*shared)(std::clamp(x, h.x().lo, h.x().hi),
                             {std::clamp(y.c1, h.y().lo, h.y().hi), std::clamp(y.c2, h.z().lo, h.z().hi)});
          },
          s.autonomous()};
}

}  // namespace lamsmooth
