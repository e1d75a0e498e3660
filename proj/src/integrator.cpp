#include "thermolie/integrator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "thermolie/continuous.hpp"

namespace thermolie {

void SolverSettings::validate() const {
  if (!(newton_tol > 0.0) || !std::isfinite(newton_tol)) throw InvalidParameter("newton_tol", "must be > 0");
  if (max_iterations < 1) throw InvalidParameter("max_iterations", "must be >= 1");
  if (!(fd_step > 0.0) || !std::isfinite(fd_step)) throw InvalidParameter("fd_step", "must be > 0");
}

namespace {

void require_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidParameter("h", "must be > 0");
}

// Newton update J^{-1} r, with an infinity-norm condition estimate guarding it.
Vec3 newton_update(const Mat3& j, const Vec3& r) {
  if (!is_finite(j)) throw SingularJacobian(std::numeric_limits<double>::infinity());
  Mat3 j_inv;
  try {
    j_inv = inverse(j);
  } catch (const SingularLinearSolve&) {
    throw SingularJacobian(std::numeric_limits<double>::infinity());
  }
  const double cond = norm_inf(j) * norm_inf(j_inv);
  if (!std::isfinite(cond) || cond > 1.0 / std::numeric_limits<double>::epsilon()) throw SingularJacobian(cond);
  return j_inv * r;
}

// Friction coefficient multiplying Omega_{k+1} in the closed-form residual.
double next_friction_weight(double gamma, FrictionPairing pairing) {
  return pairing == FrictionPairing::endpoint ? gamma : 0.5 * gamma;
}

Vec3 bracket_v(const Vec3& omega, const Vec3& pi) { return cross(omega, cross(pi, omega)) - dot(omega, omega) * pi; }

// Total node force -J(Gamma, dl/dGamma) + f_ext + f_fr.
Vec3 node_force(const ReducedState& st, const ThermoSystem& sys) {
  Vec3 f = sys.external_force(st) + sys.friction_force(st);
  if (sys.has_advected_parameter()) f -= momentum_map_J(st.gamma, sys.dl_dgamma(st));
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------

Mat3 finite_difference_jacobian(const ResidualFn& residual, const Vec3& x, const Vec3& r_at_x, double fd_step) {
  Mat3 j;
  for (std::size_t c = 0; c < 3; ++c) {
    Vec3 xp = x;
    const double step = fd_step * std::fmax(1.0, std::fabs(x[c]));
    xp[c] += step;
    const double actual = xp[c] - x[c];
    const Vec3 col = (residual(xp) - r_at_x) / actual;
    for (std::size_t r = 0; r < 3; ++r) j(r, c) = col[r];
  }
  return j;
}

NewtonResult newton_solve(const ResidualFn& residual, const Vec3& guess, const SolverSettings& settings,
                          const JacobianFn& jacobian) {
  settings.validate();
  NewtonResult out;
  Vec3 x = guess;
  Vec3 r = residual(x);
  double rn = norm(r);
  out.history.push_back(rn);
  const bool analytic = jacobian && settings.jacobian_mode == JacobianMode::analytic;
  int it = 0;
  while (!(rn <= settings.newton_tol)) {
    if (!std::isfinite(rn)) throw NonFiniteState("Newton residual became non-finite");
    if (it == settings.max_iterations) throw NoConvergence(it, rn);
    const Mat3 j = analytic ? jacobian(x) : finite_difference_jacobian(residual, x, r, settings.fd_step);
    x -= newton_update(j, r);
    ++it;
    r = residual(x);
    rn = norm(r);
    out.history.push_back(rn);
  }
  out.root = x;
  out.iterations = it;
  out.residual_norm = rn;
  return out;
}

// ---------------------------------------------------------------------------

double entropy_update(const ReducedState& st_k, double h, const ThermoSystem& sys) {
  require_step(h);
  return st_k.entropy + h * entropy_production_rate(st_k, sys);
}

double phenomenological_residual(const ReducedState& st_k, double entropy_next, double h,
                                 const ThermoSystem& sys) {
  require_step(h);
  return (entropy_next - st_k.entropy) / h - entropy_production_rate(st_k, sys);
}

Vec3 advect(const Vec3& gamma_k, const Vec3& omega_k, double h) { return cay(-h * omega_k) * gamma_k; }

Vec3 momentum_residual_heavytop(const Vec3& omega_next, const Vec3& omega_k, const Vec3& gamma_next, double h,
                                const HeavyTopDerived& d, FrictionPairing pairing) {
  const Vec3 pi_next = d.inertia * omega_next;
  const Vec3 pi_k = d.inertia * omega_k;
  Vec3 r = (pi_next - pi_k) / h + 0.5 * (cross(omega_next, pi_next) + cross(omega_k, pi_k)) -
           (0.25 * h) * (bracket_v(omega_next, pi_next) - bracket_v(omega_k, pi_k)) -
           d.mgl() * cross(gamma_next, d.axis);
  const double gamma = d.friction_coeff;
  if (pairing == FrictionPairing::endpoint)
    r += gamma * omega_next;
  else
    r += (0.5 * gamma) * (omega_next + omega_k);
  return r;
}

Mat3 momentum_jacobian_heavytop(const Vec3& omega_next, double h, const HeavyTopDerived& d,
                                FrictionPairing pairing) {
  const Mat3& inertia = d.inertia;
  const Vec3 pi = inertia * omega_next;
  // d(v)/dx = -(2 x (I x)^T + (x . I x) Id) since v = -(x . I x) x.
  return (1.0 / h) * inertia + 0.5 * (hat(omega_next) * inertia - hat(pi)) +
         (0.25 * h) * (2.0 * outer(omega_next, pi) + dot(omega_next, pi) * Mat3::identity()) +
         next_friction_weight(d.friction_coeff, pairing) * Mat3::identity();
}

Vec3 momentum_residual_generic(const Vec3& xi_next, const ReducedState& st_k, const Vec3& gamma_next,
                               double entropy_next, double h, const ThermoSystem& sys,
                               const GroupDifferenceMap& tau, FrictionPairing pairing) {
  const ReducedState st_next{xi_next, gamma_next, entropy_next};
  // D1 l_d = h dl/dxi; D2 l_d = h dl/da.
  Vec3 r = tau.dtau_inv_star(h * xi_next, h * sys.dl_domega(st_next)) -
           tau.dtau_inv_star(-h * st_k.omega, h * sys.dl_domega(st_k));
  if (sys.has_advected_parameter()) r += h * momentum_map_J(gamma_next, h * sys.dl_dgamma(st_next));
  const Vec3 f_next = sys.external_force(st_next) + sys.friction_force(st_next);
  const Vec3 f_prev = pairing == FrictionPairing::endpoint
                          ? f_next
                          : sys.external_force(st_k) + sys.friction_force(st_k);
  r -= (0.5 * h * h) * (f_next + f_prev);
  return r / (h * h);
}

double kelvin_noether_discrete(const ReducedState& st_k, double h, const ThermoSystem& sys,
                               const GroupDifferenceMap& tau) {
  return dot(st_k.gamma, tau.dtau_inv_star(h * st_k.omega, h * sys.dl_domega(st_k)));
}

double kelvin_noether_discrete(const ReducedState& st_k, double h, const ThermoSystem& sys) {
  return kelvin_noether_discrete(st_k, h, sys, CayleyMap{});
}

Vec3 node_momentum(const Vec3& omega_prev, const ReducedState& st_k, double h, const ThermoSystem& sys,
                   const GroupDifferenceMap& tau) {
  const ReducedState prev{omega_prev, st_k.gamma, st_k.entropy};
  return tau.dtau_inv_star(-h * omega_prev, h * sys.dl_domega(prev)) / h + (0.5 * h) * node_force(st_k, sys);
}

Vec3 node_velocity(const Vec3& omega_prev, const ReducedState& st_k, double h, const ThermoSystem& sys) {
  return sys.inertia_inverse() * node_momentum(omega_prev, st_k, h, sys, CayleyMap{});
}

Vec3 discrete_initial_velocity(const ReducedState& st0, double h, const ThermoSystem& sys,
                               const SolverSettings& settings) {
  require_step(h);
  const CayleyMap tau;
  const Vec3 target = sys.dl_domega(st0);
  const auto residual = [&](const Vec3& x) {
    const ReducedState st{x, st0.gamma, st0.entropy};
    return tau.dtau_inv_star(h * x, h * sys.dl_domega(st)) / h - (0.5 * h) * node_force(st, sys) - target;
  };
  return newton_solve(residual, st0.omega, settings).root;
}

// ---------------------------------------------------------------------------

VariationalIntegrator::VariationalIntegrator(const ThermoSystem& sys, SolverSettings settings, SchemeOptions scheme)
    : sys_(sys),
      heavy_top_(dynamic_cast<const HeavyTopSystem*>(&sys)),
      settings_(settings),
      scheme_(scheme) {
  settings_.validate();
}

DiscreteStep VariationalIntegrator::step(const ReducedState& st_k, const Rotation& r_k, double h) const {
  require_step(h);
  const double entropy_next = entropy_update(st_k, h, sys_);
  const Vec3 gamma_next = sys_.has_advected_parameter() ? advect(st_k.gamma, st_k.omega, h) : st_k.gamma;

  Vec3 guess = st_k.omega;
  if (settings_.initial_guess == InitialGuess::rhs_predictor) guess += h * rhs(st_k, sys_).d_omega;

  NewtonResult nr;
  if (heavy_top_ && scheme_.residual == ResidualPath::closed_form) {
    const HeavyTopDerived& d = heavy_top_->derived();
    const FrictionPairing pairing = scheme_.friction;
    nr = newton_solve(
        [&](const Vec3& x) { return momentum_residual_heavytop(x, st_k.omega, gamma_next, h, d, pairing); }, guess,
        settings_, [&](const Vec3& x) { return momentum_jacobian_heavytop(x, h, d, pairing); });
  } else {
    nr = newton_solve(
        [&](const Vec3& x) {
          return momentum_residual_generic(x, st_k, gamma_next, entropy_next, h, sys_, tau_, scheme_.friction);
        },
        guess, settings_);
  }

  DiscreteStep out;
  out.state_next = {nr.root, gamma_next, entropy_next};
  if (!is_finite(nr.root) || !std::isfinite(entropy_next)) throw NonFiniteState("state became non-finite");
  out.rotation_next = r_k * tau_.tau(h * st_k.omega);
  out.newton_iterations = nr.iterations;
  out.residual_norm = nr.residual_norm;
  out.kn_value = kelvin_noether_discrete(out.state_next, h, sys_, tau_);
  return out;
}

DiscreteStep vi_step(const ReducedState& st_k, const Rotation& r_k, double h, const ThermoSystem& sys,
                     const SolverSettings& settings, const SchemeOptions& scheme) {
  return VariationalIntegrator(sys, settings, scheme).step(st_k, r_k, h);
}

}  // namespace thermolie
