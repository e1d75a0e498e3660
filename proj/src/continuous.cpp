#include "thermolie/continuous.hpp"

#include <cmath>
#include <string>

namespace thermolie {

namespace {

void require_finite_state(const ReducedState& st) {
  if (!is_finite(st.omega) || !is_finite(st.gamma) || !std::isfinite(st.entropy))
    throw NonFiniteState("state became non-finite");
}

}  // namespace

StateDerivative rhs(const ReducedState& st, const ThermoSystem& sys) {
  const Vec3 mu = sys.dl_domega(st);
  Vec3 d_mu = coad(st.omega, mu) + sys.external_force(st) + sys.friction_force(st);
  StateDerivative out;
  if (sys.has_advected_parameter()) {
    d_mu -= momentum_map_J(st.gamma, sys.dl_dgamma(st));
    out.d_gamma = cross(st.gamma, st.omega);
  }
  out.d_omega = sys.inertia_inverse() * d_mu;
  out.d_entropy = entropy_production_rate(st, sys);
  return out;
}

ReducedState advance(const ReducedState& st, double h, const StateDerivative& k) {
  return {st.omega + h * k.d_omega, st.gamma + h * k.d_gamma, st.entropy + h * k.d_entropy};
}

ReducedState rk2_step(const ReducedState& st, double h, const ThermoSystem& sys, Rk2Variant variant) {
  const StateDerivative k1 = rhs(st, sys);
  ReducedState out;
  if (variant == Rk2Variant::heun) {
    const StateDerivative k2 = rhs(advance(st, h, k1), sys);
    out = {st.omega + (0.5 * h) * (k1.d_omega + k2.d_omega),
           st.gamma + (0.5 * h) * (k1.d_gamma + k2.d_gamma),
           st.entropy + (0.5 * h) * (k1.d_entropy + k2.d_entropy)};
  } else {
    const StateDerivative k2 = rhs(advance(st, 0.5 * h, k1), sys);
    out = advance(st, h, k2);
  }
  require_finite_state(out);
  return out;
}

ReducedState rk4_step(const ReducedState& st, double h, const ThermoSystem& sys) {
  const StateDerivative k1 = rhs(st, sys);
  const StateDerivative k2 = rhs(advance(st, 0.5 * h, k1), sys);
  const StateDerivative k3 = rhs(advance(st, 0.5 * h, k2), sys);
  const StateDerivative k4 = rhs(advance(st, h, k3), sys);
  const double w = h / 6.0;
  ReducedState out{
      st.omega + w * (k1.d_omega + 2.0 * k2.d_omega + 2.0 * k3.d_omega + k4.d_omega),
      st.gamma + w * (k1.d_gamma + 2.0 * k2.d_gamma + 2.0 * k3.d_gamma + k4.d_gamma),
      st.entropy + w * (k1.d_entropy + 2.0 * k2.d_entropy + 2.0 * k3.d_entropy + k4.d_entropy)};
  require_finite_state(out);
  return out;
}

Rotation reconstruct_rotation(const Rotation& r_k, const Vec3& omega_k, const Vec3& omega_next, double h) {
  const Vec3 xi = (0.5 * h) * (omega_k + omega_next);
  try {
    return r_k * cay(xi);
  } catch (const SingularLinearSolve&) {
    throw NonFiniteState("attitude reconstruction overflowed at |h Omega| = " + std::to_string(norm(xi)));
  }
}

EnergyParts energy_parts(const ReducedState& st, const ThermoSystem& sys) {
  EnergyParts e;
  e.kinetic = sys.kinetic_energy(st);
  e.potential = sys.potential_energy(st);
  e.internal = sys.internal_energy(st.entropy);
  e.total = e.kinetic + e.potential + e.internal;
  return e;
}

double energy(const ReducedState& st, const ThermoSystem& sys) { return energy_parts(st, sys).total; }

double energy_rate(const ReducedState& st, const ThermoSystem& sys) {
  const StateDerivative d = rhs(st, sys);
  // e = 1/2 I Omega.Omega - <dl/dGamma, Gamma> + U(S) for Lagrangians linear in Gamma.
  const double kinetic = dot(sys.dl_domega(st), d.d_omega);
  const double potential = -dot(sys.dl_dgamma(st), d.d_gamma);
  const double internal = sys.temperature(st.entropy) * d.d_entropy;
  return kinetic + potential + internal;
}

double kelvin_noether_rate(const ReducedState& st, const ThermoSystem& sys) {
  return dot(st.gamma, sys.external_force(st) + sys.friction_force(st));
}

}  // namespace thermolie
