#pragma once

// Reduced simple thermodynamic systems on SO(3): a Lagrangian l(xi, a, S) on
// so(3) x Orb(e3) x R together with friction/external forces and heat power.
// Two instances ship: the heavy top in Stokes flow and the double-bracket
// dissipative rigid body.

#include <functional>
#include <optional>

#include "thermolie/so3.hpp"

namespace thermolie {

/// Reduced state (Omega, Gamma, S). Gamma is the advected direction R^{-1} e3.
struct ReducedState {
  Vec3 omega;
  Vec3 gamma{0.0, 0.0, 1.0};
  double entropy = 0.0;

  friend bool operator==(const ReducedState&, const ReducedState&) = default;
};

inline constexpr double kGammaNormTolerance = 1e-6;

/// Throws InvalidParameter if a component is non-finite or |gamma| is off the unit sphere.
void check_state(const ReducedState& st, double gamma_tol = kGammaNormTolerance);

/// Dulong-Petit solid: U = c_v T, T = T0 exp((S - S0)/c_v).
struct ThermalModel {
  double reference_temperature = 300.0;  // K
  double reference_entropy = 0.0;        // J/K
  double heat_capacity = 1.0;            // J/K

  double temperature(double entropy) const;
  double internal_energy(double entropy) const { return heat_capacity * temperature(entropy); }
};

double temperature(double entropy, const ThermalModel& thermal);
double internal_energy(double entropy, const ThermalModel& thermal);

/// J(a, p) = a x p; <J(a, p), xi> = p . (xi x a).
constexpr Vec3 momentum_map_J(const Vec3& a, const Vec3& p) { return cross(a, p); }

// ---------------------------------------------------------------------------
// Heavy top in Stokes flow

struct HeavyTopParams {
  double radius = 0.05;                  // m
  double viscosity = 0.1;                // kg m^-1 s^-1
  double density = 2700.0;               // kg m^-3
  double upper_mass_fraction = 0.6;      // plain upper hemisphere share of the mass
  double gravity = 9.81;                 // m s^-2
  double molar_mass = 26.981539e-3;      // kg mol^-1
  double gas_constant = 8.314462618;     // J mol^-1 K^-1
  double reference_temperature = 300.0;  // K
  double reference_entropy = 0.0;        // J K^-1

  /// Throws InvalidParameter naming the offending field.
  void validate() const;
};

struct HeavyTopDerived {
  double total_mass = 0.0;
  double upper_mass = 0.0;
  double lower_mass = 0.0;
  double com_offset = 0.0;  // signed G_z
  double lever = 0.0;       // |G_z|
  Vec3 axis{0.0, 0.0, 1.0};
  Mat3 inertia = Mat3::identity();
  double friction_coeff = 0.0;  // 8 pi mu a^3
  double moles = 0.0;
  double gravity = 0.0;
  ThermalModel thermal;

  double mgl() const { return total_mass * gravity * lever; }
};

/// Throws DegenerateLever when the center of mass sits on the fixed point.
HeavyTopDerived derive_params(const HeavyTopParams& p);
/// Same, but with an explicit unit axis chi (used when the lever degenerates).
HeavyTopDerived derive_params(const HeavyTopParams& p, const Vec3& axis);

double lagrangian(const ReducedState& st, const HeavyTopDerived& d);
/// -gamma Omega.
Vec3 friction_stokes(const ReducedState& st, const HeavyTopDerived& d);

// ---------------------------------------------------------------------------
// Double-bracket rigid body

using LambdaFn = std::function<double(const Vec3& mu, double entropy)>;

LambdaFn constant_lambda(double lambda);

struct DoubleBracketParams {
  Mat3 inertia = Mat3::identity();
  LambdaFn lambda = constant_lambda(0.0);
  ThermalModel thermal;

  void validate() const;
};

/// lambda(mu,S) * mu x (mu x I^{-1} mu).
Vec3 friction_double_bracket(const Vec3& mu, double entropy, const DoubleBracketParams& p);

// ---------------------------------------------------------------------------
// Reduced system interface

/// Reduced Lagrangian system with thermodynamics. All shipped systems are
/// quadratic in xi with dl/dxi = I xi.
class ThermoSystem {
 public:
  virtual ~ThermoSystem() = default;

  virtual const Mat3& inertia() const = 0;
  virtual const Mat3& inertia_inverse() const = 0;
  virtual const ThermalModel& thermal() const = 0;
  virtual bool has_advected_parameter() const = 0;

  virtual double lagrangian(const ReducedState& st) const = 0;
  Vec3 dl_domega(const ReducedState& st) const { return inertia() * st.omega; }
  virtual Vec3 dl_dgamma(const ReducedState& st) const = 0;
  double dl_dentropy(const ReducedState& st) const { return -temperature(st.entropy); }

  virtual Vec3 friction_force(const ReducedState& st) const = 0;
  virtual Vec3 external_force(const ReducedState&) const { return {}; }
  virtual double external_heat_power(const ReducedState&) const { return 0.0; }

  double temperature(double entropy) const { return thermal().temperature(entropy); }
  double internal_energy(double entropy) const { return thermal().internal_energy(entropy); }
  double kinetic_energy(const ReducedState& st) const { return 0.5 * dot(dl_domega(st), st.omega); }
  virtual double potential_energy(const ReducedState& st) const = 0;

  /// Body-frame point tracked in output (center of mass for the heavy top).
  virtual std::optional<Vec3> body_marker() const { return std::nullopt; }
};

/// Reduced energy <dl/dxi, xi> - l.
double reduced_energy(const ReducedState& st, const ThermoSystem& sys);

/// (-<f_fr, xi> + p_H) / T; non-negative for dissipative friction.
double entropy_production_rate(const ReducedState& st, const ThermoSystem& sys);

class HeavyTopSystem final : public ThermoSystem {
 public:
  explicit HeavyTopSystem(const HeavyTopDerived& d);

  const HeavyTopDerived& derived() const { return d_; }
  const Mat3& inertia() const override { return d_.inertia; }
  const Mat3& inertia_inverse() const override { return inertia_inv_; }
  const ThermalModel& thermal() const override { return d_.thermal; }
  bool has_advected_parameter() const override { return true; }

  double lagrangian(const ReducedState& st) const override { return thermolie::lagrangian(st, d_); }
  Vec3 dl_dgamma(const ReducedState&) const override { return -d_.mgl() * d_.axis; }
  Vec3 friction_force(const ReducedState& st) const override { return friction_stokes(st, d_); }
  double potential_energy(const ReducedState& st) const override {
    return d_.mgl() * dot(st.gamma, d_.axis);
  }
  std::optional<Vec3> body_marker() const override { return d_.lever * d_.axis; }

 private:
  HeavyTopDerived d_;
  Mat3 inertia_inv_;
};

/// No gravity and no advected parameter; gamma is carried but never used.
class DoubleBracketSystem final : public ThermoSystem {
 public:
  explicit DoubleBracketSystem(DoubleBracketParams p);

  const DoubleBracketParams& params() const { return p_; }
  const Mat3& inertia() const override { return p_.inertia; }
  const Mat3& inertia_inverse() const override { return inertia_inv_; }
  const ThermalModel& thermal() const override { return p_.thermal; }
  bool has_advected_parameter() const override { return false; }

  double lagrangian(const ReducedState& st) const override;
  Vec3 dl_dgamma(const ReducedState&) const override { return {}; }
  Vec3 friction_force(const ReducedState& st) const override;
  double potential_energy(const ReducedState&) const override { return 0.0; }

 private:
  DoubleBracketParams p_;
  Mat3 inertia_inv_;
};

}  // namespace thermolie
