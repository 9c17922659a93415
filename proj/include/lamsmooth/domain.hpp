#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lamsmooth/errors.hpp"

namespace lamsmooth {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool empty() const { return !(hi >= lo); }
  bool operator==(const Interval&) const = default;

  // The interval with `frac` of its width removed from each end.
  Interval inset(double frac) const {
    const double m = frac * width();
    return {lo + m, hi - m};
  }

  // n equally spaced points including both ends (n == 1 gives the midpoint).
  std::vector<double> grid(std::size_t n) const {
    std::vector<double> pts(n);
    if (n == 1) {
      pts[0] = mid();
      return pts;
    }
    for (std::size_t i = 0; i < n; ++i)
      pts[i] = lo + width() * static_cast<double>(i) / static_cast<double>(n - 1);
    return pts;
  }
};

// A compact box in R^2 (x, y) or R^3 (x, y, z) / (x, y1, y2). For the
// curves-in-R^3 setting an optional polydisk radius R is recorded.
class Domain {
 public:
  Domain() = default;

  static Domain plane(Interval x, Interval y) { return Domain(2, {x, y, Interval{}}); }
  static Domain space(Interval x, Interval y, Interval z) { return Domain(3, {x, y, z}); }
  // D_R = {|x| <= R, |y_i - c_i| <= R}.
  static Domain polydisk(double radius, double c1 = 0.0, double c2 = 0.0) {
    if (!(radius > 0.0)) throw ParameterError("polydisk radius must be positive");
    Domain d(3, {Interval{-radius, radius}, Interval{c1 - radius, c1 + radius},
                 Interval{c2 - radius, c2 + radius}});
    d.radius_ = radius;
    return d;
  }

  int dimension() const { return dim_; }
  const Interval& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
  const Interval& x() const { return axes_[0]; }
  const Interval& y() const { return axes_[1]; }
  const Interval& z() const { return axes_[2]; }
  std::optional<double> radius() const { return radius_; }

  bool contains(double x, double y) const { return axes_[0].contains(x) && axes_[1].contains(y); }
  bool contains(double x, double y, double z) const {
    return contains(x, y) && axes_[2].contains(z);
  }

  // Sampling box: each axis shrunk by `frac` of its width at both ends.
  Domain inset(double frac) const {
    Domain d = *this;
    for (int i = 0; i < dim_; ++i) d.axes_[static_cast<std::size_t>(i)] = axes_[static_cast<std::size_t>(i)].inset(frac);
    return d;
  }

  double max_abs_x() const { return std::max(std::abs(axes_[0].lo), std::abs(axes_[0].hi)); }

  std::string describe() const;

  bool operator==(const Domain&) const = default;

 private:
  Domain(int dim, std::array<Interval, 3> axes) : dim_(dim), axes_(axes) {
    for (int i = 0; i < dim_; ++i)
      if (axes_[static_cast<std::size_t>(i)].empty())
        throw ParameterError("domain axis " + std::to_string(i) + " is empty");
  }

  int dim_ = 2;
  std::array<Interval, 3> axes_{};
  std::optional<double> radius_;
};

// Default margin kept between sample grids and the boundary of a box.
inline constexpr double kSamplingMargin = 0.10;

}  // namespace lamsmooth

#include "lamsmooth/format.hpp"

inline std::string lamsmooth::Domain::describe() const {
  std::string s = "[" + format_double(axes_[0].lo) + "," + format_double(axes_[0].hi) + "]";
  for (int i = 1; i < dim_; ++i) {
    const auto& a = axes_[static_cast<std::size_t>(i)];
    s += "x[" + format_double(a.lo) + "," + format_double(a.hi) + "]";
  }
  return s;
}
