#pragma once

#include <cmath>

namespace lamsmooth {

// A point or vector in the transversal plane R^2 (leaf labels a, positions
// y, slope values F all live here in the curves-in-R^3 setting).
struct Vec2 {
  double c1 = 0.0;
  double c2 = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    c1 += o.c1;
    c2 += o.c2;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    c1 -= o.c1;
    c2 -= o.c2;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    c1 *= s;
    c2 *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

inline double norm(const Vec2& v) { return std::hypot(v.c1, v.c2); }
inline double dot(const Vec2& a, const Vec2& b) { return a.c1 * b.c1 + a.c2 * b.c2; }

inline double distance(double a, double b) { return std::abs(a - b); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

// 2x2 matrix, row i = component i of the image, column j = derivative in y_j.
struct Mat2 {
  double m11 = 0.0, m12 = 0.0, m21 = 0.0, m22 = 0.0;

  Vec2 operator*(const Vec2& v) const {
    return {m11 * v.c1 + m12 * v.c2, m21 * v.c1 + m22 * v.c2};
  }
  static Mat2 from_columns(const Vec2& d1, const Vec2& d2) {
    return {d1.c1, d2.c1, d1.c2, d2.c2};
  }
};

// Spectral norm (largest singular value).
inline double operator_norm(const Mat2& m) {
  const double a = m.m11 * m.m11 + m.m21 * m.m21;
  const double b = m.m11 * m.m12 + m.m21 * m.m22;
  const double d = m.m12 * m.m12 + m.m22 * m.m22;
  const double tr = a + d;
  const double disc = std::sqrt(std::max(0.0, (a - d) * (a - d) + 4.0 * b * b));
  return std::sqrt(std::max(0.0, 0.5 * (tr + disc)));
}

}  // namespace lamsmooth
