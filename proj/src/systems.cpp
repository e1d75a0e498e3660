#include "thermolie/systems.hpp"

#include <cmath>
#include <numbers>

namespace thermolie {

namespace {

void require_finite(const char* field, double v) {
  if (!std::isfinite(v)) throw InvalidParameter(field, "must be finite");
}

void require_positive(const char* field, double v) {
  require_finite(field, v);
  if (!(v > 0.0)) throw InvalidParameter(field, "must be strictly positive");
}

void require_nonnegative(const char* field, double v) {
  require_finite(field, v);
  if (!(v >= 0.0)) throw InvalidParameter(field, "must be non-negative");
}

Mat3 checked_inverse(const Mat3& m) {
  try {
    return inverse(m);
  } catch (const SingularLinearSolve&) {
    throw SingularInertia();
  }
}

}  // namespace

void check_state(const ReducedState& st, double gamma_tol) {
  if (!is_finite(st.omega)) throw InvalidParameter("omega", "must be finite");
  if (!is_finite(st.gamma)) throw InvalidParameter("gamma", "must be finite");
  require_finite("entropy", st.entropy);
  if (std::fabs(norm(st.gamma) - 1.0) > gamma_tol)
    throw InvalidParameter("gamma", "must have unit norm");
}

double ThermalModel::temperature(double entropy) const {
  return reference_temperature * std::exp((entropy - reference_entropy) / heat_capacity);
}

double temperature(double entropy, const ThermalModel& thermal) {
  return thermal.temperature(entropy);
}

double internal_energy(double entropy, const ThermalModel& thermal) {
  return thermal.internal_energy(entropy);
}

// ---------------------------------------------------------------------------

void HeavyTopParams::validate() const {
  require_positive("radius", radius);
  require_nonnegative("viscosity", viscosity);
  require_positive("density", density);
  require_finite("upper_mass_fraction", upper_mass_fraction);
  if (!(upper_mass_fraction > 0.0 && upper_mass_fraction < 1.0))
    throw InvalidParameter("upper_mass_fraction", "must lie in (0, 1)");
  require_nonnegative("gravity", gravity);
  require_positive("molar_mass", molar_mass);
  require_positive("gas_constant", gas_constant);
  require_positive("reference_temperature", reference_temperature);
  require_finite("reference_entropy", reference_entropy);
}

namespace {

HeavyTopDerived derive_common(const HeavyTopParams& p) {
  p.validate();
  const double a = p.radius;
  const double a2 = a * a;
  const double a3 = a2 * a;
  HeavyTopDerived d;
  d.total_mass = 4.0 / 3.0 * std::numbers::pi * a3 * p.density;
  d.upper_mass = p.upper_mass_fraction * d.total_mass;
  d.lower_mass = d.total_mass - d.upper_mass;
  // Plain upper hemisphere centroid at +3a/8, hollow lower shell at -a/2.
  d.com_offset = 3.0 * d.upper_mass * a / (8.0 * d.total_mass) - d.lower_mass * a / (2.0 * d.total_mass);
  d.lever = std::fabs(d.com_offset);
  const double i_perp = 83.0 * a2 / 320.0 * d.upper_mass + a2 / 12.0 * d.lower_mass;
  const double i_axial = 2.0 * a2 / 5.0 * d.upper_mass + a2 / 3.0 * d.lower_mass;
  d.inertia = Mat3::diagonal({i_perp, i_perp, i_axial});
  d.friction_coeff = 8.0 * std::numbers::pi * p.viscosity * a3;
  d.moles = d.total_mass / p.molar_mass;
  d.gravity = p.gravity;
  d.thermal.reference_temperature = p.reference_temperature;
  d.thermal.reference_entropy = p.reference_entropy;
  d.thermal.heat_capacity = 3.0 * d.moles * p.gas_constant;
  return d;
}

}  // namespace

HeavyTopDerived derive_params(const HeavyTopParams& p) {
  HeavyTopDerived d = derive_common(p);
  if (d.lever <= 1e-12 * p.radius) throw DegenerateLever();
  d.axis = {0.0, 0.0, d.com_offset > 0.0 ? 1.0 : -1.0};
  return d;
}

HeavyTopDerived derive_params(const HeavyTopParams& p, const Vec3& axis) {
  HeavyTopDerived d = derive_common(p);
  const double n = norm(axis);
  if (!is_finite(axis) || !(n > 0.0)) throw InvalidParameter("axis", "must be a non-zero finite vector");
  d.axis = axis / n;
  return d;
}

double lagrangian(const ReducedState& st, const HeavyTopDerived& d) {
  return 0.5 * dot(d.inertia * st.omega, st.omega) - d.mgl() * dot(st.gamma, d.axis) -
         d.thermal.internal_energy(st.entropy);
}

Vec3 friction_stokes(const ReducedState& st, const HeavyTopDerived& d) {
  return -d.friction_coeff * st.omega;
}

// ---------------------------------------------------------------------------

LambdaFn constant_lambda(double lambda) {
  return [lambda](const Vec3&, double) { return lambda; };
}

void DoubleBracketParams::validate() const {
  if (!is_finite(inertia)) throw InvalidParameter("inertia", "must be finite");
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      if (std::fabs(inertia(i, j) - inertia(j, i)) > 1e-12 * norm_inf(inertia))
        throw InvalidParameter("inertia", "must be symmetric");
  // Sylvester's criterion.
  const double m1 = inertia(0, 0);
  const double m2 = inertia(0, 0) * inertia(1, 1) - inertia(0, 1) * inertia(1, 0);
  if (!(m1 > 0.0 && m2 > 0.0 && determinant(inertia) > 0.0))
    throw InvalidParameter("inertia", "must be positive definite");
  if (!lambda) throw InvalidParameter("lambda", "must be set");
  require_positive("reference_temperature", thermal.reference_temperature);
  require_finite("reference_entropy", thermal.reference_entropy);
  require_positive("heat_capacity", thermal.heat_capacity);
}

Vec3 friction_double_bracket(const Vec3& mu, double entropy, const DoubleBracketParams& p) {
  const Vec3 omega_h = solve(p.inertia, mu);
  const double lambda = p.lambda(mu, entropy);
  if (!(lambda >= 0.0)) throw InvalidParameter("lambda", "must be non-negative");
  // ad*_{(ad*_{omega_h} mu)^#} mu with the Euclidean sharp.
  return lambda * coad(coad(omega_h, mu), mu);
}

// ---------------------------------------------------------------------------

double reduced_energy(const ReducedState& st, const ThermoSystem& sys) {
  return dot(sys.dl_domega(st), st.omega) - sys.lagrangian(st);
}

double entropy_production_rate(const ReducedState& st, const ThermoSystem& sys) {
  const double power = -dot(sys.friction_force(st), st.omega) + sys.external_heat_power(st);
  return power / sys.temperature(st.entropy);
}

HeavyTopSystem::HeavyTopSystem(const HeavyTopDerived& d) : d_(d), inertia_inv_(checked_inverse(d.inertia)) {}

DoubleBracketSystem::DoubleBracketSystem(DoubleBracketParams p) : p_(std::move(p)) {
  p_.validate();
  inertia_inv_ = checked_inverse(p_.inertia);
}

double DoubleBracketSystem::lagrangian(const ReducedState& st) const {
  return 0.5 * dot(p_.inertia * st.omega, st.omega) - p_.thermal.internal_energy(st.entropy);
}

Vec3 DoubleBracketSystem::friction_force(const ReducedState& st) const {
  return friction_double_bracket(p_.inertia * st.omega, st.entropy, p_);
}

}  // namespace thermolie
