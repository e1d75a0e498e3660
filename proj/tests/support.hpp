#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "thermolie/diagnostics.hpp"

namespace testing {

using namespace thermolie;

class Rng {
 public:
  explicit Rng(unsigned seed = 7u) : g_(seed) {}
  double normal() { return n_(g_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g_); }
  Vec3 vec(double scale = 1.0) { return {scale * normal(), scale * normal(), scale * normal()}; }
  Vec3 unit() {
    Vec3 v = vec();
    while (norm(v) < 1e-3) v = vec();
    return v / norm(v);
  }

 private:
  std::mt19937_64 g_;
  std::normal_distribution<double> n_{0.0, 1.0};
};

inline double max_abs_diff(const Vec3& a, const Vec3& b) { return norm_inf(a - b); }

inline double max_abs_diff(const Mat3& a, const Mat3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 9; ++i) m = std::max(m, std::fabs(a.a[i] - b.a[i]));
  return m;
}

inline double rel_err(const Vec3& got, const Vec3& want) { return norm(got - want) / std::max(norm(want), 1e-300); }

/// The standard configuration: 5 cm aluminium ball, 60/40 split, in a 0.1 Pa s fluid.
inline HeavyTopSystem reference_top() { return HeavyTopSystem(derive_params(HeavyTopParams{})); }

inline HeavyTopSystem top_with(double viscosity, double gravity) {
  HeavyTopParams p;
  p.viscosity = viscosity;
  p.gravity = gravity;
  return HeavyTopSystem(derive_params(p));
}

inline ReducedState reference_initial() { return {{0.0, 1.0, 1.0}, {0.0, 0.0, 1.0}, 0.0}; }

/// Independent Cayley map: I + 4/(4 + |x|^2) (hat(x) + hat(x)^2 / 2).
inline Mat3 cayley_closed_form(const Vec3& x) {
  const Mat3 w = hat(x);
  return Mat3::identity() + (4.0 / (4.0 + dot(x, x))) * (w + 0.5 * (w * w));
}

/// Independent dcay^{-1}: d - x x d / 2 + (x . d) x / 4.
inline Vec3 dcay_inv_closed_form(const Vec3& x, const Vec3& d) {
  return d - 0.5 * cross(x, d) + 0.25 * dot(x, d) * x;
}

}  // namespace testing
