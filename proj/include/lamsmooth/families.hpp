#pragma once

// Leaf families, slope fields and partially smooth functions. Families are
// type-erased so the catalog and the CLI can choose them at run time; the
// algorithms that consume them are templates or plain functions over these
// value types.

#include <cstdint>
#include <cstring>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>

#include "lamsmooth/domain.hpp"
#include "lamsmooth/errors.hpp"
#include "lamsmooth/ode.hpp"
#include "lamsmooth/vec2.hpp"

namespace lamsmooth {

enum class Provenance { closed_form, ode_integrated };

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr Interval kWholeLine{-kInf, kInf};

// Curves y = f_a(x) in R^2 with f_a(0) = a.
struct LeafFamily2D {
  std::string name;
  std::function<double(double a, double x)> value;
  std::function<double(double a, double x)> slope;
  Interval params;
  Interval base = kWholeLine;  // x-range on which leaves are available
  Provenance provenance = Provenance::closed_form;
};

// Surfaces z = f_a(x, y) in R^3.
struct SurfaceFamily3D {
  std::string name;
  std::function<double(double a, double x, double y)> value;
  std::function<double(double a, double x, double y)> slope_x;
  std::function<double(double a, double x, double y)> slope_y;
  Interval params;
};

// Curves y = f_a(x) in R^3 with y, a in R^2 and f_a(0) = a. `project` is the
// leaf label map pi(x, y).
struct CurveFamily3D {
  std::string name;
  std::function<Vec2(const Vec2& a, double x)> value;
  std::function<Vec2(const Vec2& a, double x)> slope;
  std::function<Vec2(double x, const Vec2& y)> project;
  Provenance provenance = Provenance::closed_form;
};

struct SlopeField2D {
  std::string name;
  std::function<double(double x, double y)> F;
};

struct SlopeField3D {
  std::string name;
  std::function<Vec2(double x, const Vec2& y)> F;
  // F does not depend on x; strands along x are constant.
  bool autonomous = false;
};

// A member of the class of continuous, leafwise C^1 functions. When the
// leafwise derivative is not supplied it is measured by finite differences
// along the leaf.
struct PartialSmoothFunction2D {
  std::string name;
  std::function<double(double x, double y)> value;
  std::function<double(double x, double y)> leaf_derivative;  // may be empty
};

struct PartialSmoothFunction3D {
  std::string name;
  std::function<double(double x, double y, double z)> value;
  std::function<double(double x, double y, double z)> leaf_dx;  // may be empty
  std::function<double(double x, double y, double z)> leaf_dy;  // may be empty
};

// Per-leaf solution cache. Each leaf is built exactly once under its own
// once_flag; the map itself is guarded by a shared mutex, so lookups of
// existing leaves only take a shared lock.
template <class Leaf>
class LeafCache {
 public:
  explicit LeafCache(std::size_t max_entries = 4096) : max_entries_(max_entries) {}

  template <class Build>
  std::shared_ptr<const Leaf> get(std::uint64_t k1, std::uint64_t k2, const Build& build) const {
    const Key key{k1, k2};
    std::shared_ptr<Entry> entry;
    {
      std::shared_lock lock(mu_);
      if (auto it = map_.find(key); it != map_.end()) entry = it->second;
    }
    if (!entry) {
      std::unique_lock lock(mu_);
      if (map_.size() >= max_entries_) map_.clear();
      auto [it, inserted] = map_.try_emplace(key, nullptr);
      if (inserted) it->second = std::make_shared<Entry>();
      entry = it->second;
    }
    std::call_once(entry->once, [&] {
      try {
        entry->leaf = std::make_shared<const Leaf>(build());
      } catch (...) {
        entry->error = std::current_exception();
      }
    });
    if (entry->error) std::rethrow_exception(entry->error);
    return entry->leaf;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return map_.size();
  }

 private:
  struct Key {
    std::uint64_t a, b;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<std::uint64_t>{}(k.a * 0x9E3779B97F4A7C15ULL ^ (k.b + 0x632BE59BD9B4E019ULL));
    }
  };
  struct Entry {
    std::once_flag once;
    std::shared_ptr<const Leaf> leaf;
    std::exception_ptr error;
  };

  std::size_t max_entries_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<Key, std::shared_ptr<Entry>, KeyHash> map_;
};

inline std::uint64_t bits_of(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  return u;
}

namespace detail {

template <class State>
State eval_dense(const DenseSolution<State>& leaf, double x) {
  if (x < leaf.reach_lo - 1e-12 || x > leaf.reach_hi + 1e-12) {
    if (leaf.truncated)
      throw TruncationError("leaf leaves the domain before x = " + format_double(x),
                            x < 0 ? leaf.reach_lo : leaf.reach_hi);
    throw DomainError("x = " + format_double(x) + " outside the integrated range");
  }
  return leaf.table(x);
}

}  // namespace detail

// Leaves reconstructed by integrating y' = F(x, y) forward and backward from
// x = 0. Solutions are cached per leaf at stations spaced by the integrator
// step and interpolated by cubic Hermite using F as the slope.
inline LeafFamily2D family_from_slope_field(const SlopeField2D& field, const Domain& domain,
                                            const IntegratorParams& params = {}) {
  auto cache = std::make_shared<LeafCache<DenseSolution<double>>>();
  const Interval xr = domain.x();
  const Interval yr = domain.y();
  auto F = field.F;
  auto leaf = [=](double a) {
    return cache->get(bits_of(a), 0, [&] {
      return integrate_dense<double>(F, a, xr.lo, xr.hi, params.max_step, params,
                                     [yr](double, double y) { return yr.contains(y); });
    });
  };
  LeafFamily2D fam;
  fam.name = "ode:" + field.name;
  fam.params = yr;
  fam.base = xr;
  fam.provenance = Provenance::ode_integrated;
  fam.value = [leaf](double a, double x) { return detail::eval_dense(*leaf(a), x); };
  fam.slope = [leaf, F](double a, double x) { return F(x, detail::eval_dense(*leaf(a), x)); };
  return fam;
}

// Leaf label of (x, y) for curves in R^3 defined by a slope field: flow back
// to x = 0.
inline Vec2 project_by_flow(const std::function<Vec2(double, const Vec2&)>& F, double x, const Vec2& y,
                            const IntegratorParams& params,
                            const std::function<bool(double, const Vec2&)>& inside) {
  if (x == 0.0) return y;
  const double st[1] = {0.0};
  auto tr = integrate(F, x, y, std::span<const double>(st, 1), params, inside);
  if (tr.truncated)
    throw CoverageError("backward solution through (" + format_double(x) + ", ...) leaves the box at x = " +
                        format_double(tr.exit_x));
  return tr.ys.back();
}

inline CurveFamily3D family_from_slope_field(const SlopeField3D& field, const Domain& domain,
                                             const IntegratorParams& params = {}) {
  if (domain.dimension() != 3) throw ParameterError("curve family needs a 3-dimensional domain");
  auto cache = std::make_shared<LeafCache<DenseSolution<Vec2>>>();
  const Interval xr = domain.x();
  const Interval y1 = domain.y();
  const Interval y2 = domain.z();
  auto F = field.F;
  auto inside = [y1, y2](double, const Vec2& y) { return y1.contains(y.c1) && y2.contains(y.c2); };
  auto leaf = [=](const Vec2& a) {
    return cache->get(bits_of(a.c1), bits_of(a.c2), [&] {
      return integrate_dense<Vec2>(F, a, xr.lo, xr.hi, params.max_step, params, inside);
    });
  };
  CurveFamily3D fam;
  fam.name = "ode:" + field.name;
  fam.provenance = Provenance::ode_integrated;
  fam.value = [leaf](const Vec2& a, double x) { return detail::eval_dense(*leaf(a), x); };
  fam.slope = [leaf, F](const Vec2& a, double x) { return F(x, detail::eval_dense(*leaf(a), x)); };
  fam.project = [F, params, inside](double x, const Vec2& y) {
    return project_by_flow(F, x, y, params, inside);
  };
  return fam;
}

// The common slope function of a family, F(x, y) = f_a'(x) at y = f_a(x);
// requires the leaf label, so it is built from a projection.
inline SlopeField2D slope_field_of(const LeafFamily2D& fam,
                                   std::function<double(double, double)> project) {
  SlopeField2D f;
  f.name = fam.name;
  f.F = [slope = fam.slope, project = std::move(project)](double x, double y) {
    return slope(project(x, y), x);
  };
  return f;
}

}  // namespace lamsmooth
