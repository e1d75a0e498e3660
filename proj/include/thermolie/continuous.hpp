#pragma once

// Continuous reduced dynamics and Runge-Kutta reference steppers.
//
//   d/dt (dl/dxi) = ad*_xi (dl/dxi) - J(a, dl/da) + f_ext + f_fr
//   dS/dt         = (-<f_fr, xi> + p_H) / T
//   da/dt         = -xi x a
//
// Runge-Kutta steppers integrate (Omega, Gamma, S) in R^7 with no projection,
// so drift of |Gamma| and of the total energy stays observable.

#include "thermolie/systems.hpp"

namespace thermolie {

struct StateDerivative {
  Vec3 d_omega;
  Vec3 d_gamma;
  double d_entropy = 0.0;
};

StateDerivative rhs(const ReducedState& st, const ThermoSystem& sys);

/// st + h * k, componentwise.
ReducedState advance(const ReducedState& st, double h, const StateDerivative& k);

enum class Rk2Variant { heun, midpoint };

/// Heun (explicit trapezoidal) by default. Throws NonFiniteState.
ReducedState rk2_step(const ReducedState& st, double h, const ThermoSystem& sys,
                      Rk2Variant variant = Rk2Variant::heun);
/// Classical 4-stage Runge-Kutta. Throws NonFiniteState.
ReducedState rk4_step(const ReducedState& st, double h, const ThermoSystem& sys);

/// Attitude for RK output only: R_k cay(h (Omega_k + Omega_{k+1}) / 2).
Rotation reconstruct_rotation(const Rotation& r_k, const Vec3& omega_k, const Vec3& omega_next, double h);

struct EnergyParts {
  double kinetic = 0.0;
  double potential = 0.0;
  double internal = 0.0;
  double total = 0.0;  // kinetic + potential + internal
};

EnergyParts energy_parts(const ReducedState& st, const ThermoSystem& sys);
double energy(const ReducedState& st, const ThermoSystem& sys);

/// Gradient of the total energy with respect to (Omega, Gamma, S), paired with rhs.
/// Zero for an isolated system.
double energy_rate(const ReducedState& st, const ThermoSystem& sys);

/// d/dt (I Omega . Gamma) = <Gamma, f_ext + f_fr>, i.e. -gamma Gamma.Omega for the heavy top.
double kelvin_noether_rate(const ReducedState& st, const ThermoSystem& sys);

}  // namespace thermolie
