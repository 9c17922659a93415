#pragma once

// Cutoff and partition-of-unity profiles.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lamsmooth/errors.hpp"

namespace lamsmooth {

enum class ChiVariant { cubic, bump };

inline std::string to_string(ChiVariant v) { return v == ChiVariant::cubic ? "cubic" : "bump"; }

inline ChiVariant chi_variant_from_string(const std::string& s) {
  if (s == "cubic") return ChiVariant::cubic;
  if (s == "bump") return ChiVariant::bump;
  throw InputError("unknown cutoff variant '" + s + "' (expected cubic or bump)");
}

// chi: [0,1] -> [0,1], equal to 1 on [0, 1/4] and 0 on [3/4, 1], C^1.
// On [1/4, 3/4] chi(t) = s(2 (3/4 - t)) where s is either the cubic
// smoothstep 3u^2 - 2u^3 (C^1, |chi'| <= 3) or the C^infinity transition
// e(u) / (e(u) + e(1-u)), e(u) = exp(-1/u).
class CutoffChi {
 public:
  explicit CutoffChi(ChiVariant v = ChiVariant::cubic) : variant_(v) {
    if (v == ChiVariant::cubic) {
      bound_ = 3.0;
    } else {
      // The transition is symmetric about t = 1/2; dense sampling includes it.
      constexpr int n = 20000;
      double m = 0.0;
      for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(derivative(0.25 + 0.5 * i / n)));
      bound_ = m;
    }
  }

  ChiVariant variant() const { return variant_; }

  // sup |chi'|.
  double bound() const { return bound_; }

  double operator()(double t) const {
    if (t <= 0.25) return 1.0;
    if (t >= 0.75) return 0.0;
    const double u = 2.0 * (0.75 - t);
    if (variant_ == ChiVariant::cubic) return u * u * (3.0 - 2.0 * u);
    const double e0 = edge(u), e1 = edge(1.0 - u);
    return e0 / (e0 + e1);
  }

  double derivative(double t) const {
    if (t <= 0.25 || t >= 0.75) return 0.0;
    const double u = 2.0 * (0.75 - t);
    if (variant_ == ChiVariant::cubic) return -2.0 * 6.0 * u * (1.0 - u);
    const double e0 = edge(u), e1 = edge(1.0 - u);
    const double de0 = e0 / (u * u), de1 = e1 / ((1.0 - u) * (1.0 - u));
    const double s = e0 + e1;
    return -2.0 * (de0 * e1 + e0 * de1) / (s * s);
  }

 private:
  static double edge(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

  ChiVariant variant_;
  double bound_ = 3.0;
};

// Lambda_j(a) = cos^2(pi J / 2 (a - j/J)) on [(j-1)/J, (j+1)/J], 0 elsewhere.
// On [k/J, (k+1)/J] only j = k and j = k+1 are nonzero and they sum to 1.
class PartitionLambda {
 public:
  explicit PartitionLambda(int J) : J_(J) {
    if (J < 1) throw ParameterError("partition size J must be at least 1");
  }

  int J() const { return J_; }
  double node(long j) const { return static_cast<double>(j) / J_; }

  double weight(long j, double a) const {
    const double s = J_ * a - static_cast<double>(j);
    if (std::abs(s) >= 1.0) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * s);
    return c * c;
  }

  double weight_derivative(long j, double a) const {
    const double s = J_ * a - static_cast<double>(j);
    if (std::abs(s) >= 1.0) return 0.0;
    return -0.5 * std::numbers::pi * J_ * std::sin(std::numbers::pi * s);
  }

  struct Active {
    long k;
    double w_k;   // Lambda_k(a)
    double w_k1;  // Lambda_{k+1}(a), exactly 0 when a = k/J
  };

  Active active(double a) const {
    const double ja = J_ * a;
    const double k = std::floor(ja);
    const double s = ja - k;
    const double c = std::cos(0.5 * std::numbers::pi * s);
    const double sn = std::sin(0.5 * std::numbers::pi * s);
    return {static_cast<long>(k), c * c, sn * sn};
  }

 private:
  int J_;
};

// Lambda(t) = cos^2 t on [-pi/2, pi/2], 0 elsewhere; the profile of the
// grid blend that smooths a slope field in its transversal variables.
struct BumpLambda {
  static double value(double t) {
    if (std::abs(t) > 0.5 * std::numbers::pi) return 0.0;
    const double c = std::cos(t);
    return c * c;
  }
  static double derivative(double t) {
    if (std::abs(t) > 0.5 * std::numbers::pi) return 0.0;
    return -std::sin(2.0 * t);
  }
};

}  // namespace lamsmooth
