#pragma once

// Discrete thermodynamic Euler-Poincare integrator on so(3).
//
// One step (Omega_k, Gamma_k, S_k, R_k) -> (Omega_{k+1}, Gamma_{k+1}, S_{k+1}, R_{k+1}):
//   S_{k+1}     explicit root of the discrete phenomenological constraint at S_k
//   Gamma_{k+1} = cay(-h Omega_k) Gamma_k
//   Omega_{k+1} Newton root of the transported momentum balance (needs Gamma_{k+1})
//   R_{k+1}     = R_k cay(h Omega_k)
//
// Omega_k is the interval velocity on [t_k, t_{k+1}], not a node value; see
// discrete_initial_velocity / node_velocity for consistent conversions.

#include <functional>
#include <vector>

#include "thermolie/systems.hpp"

namespace thermolie {

enum class JacobianMode { analytic, finite_difference };
enum class InitialGuess { previous_omega, rhs_predictor };

/// How the trapezoidal discrete friction forces are paired in the momentum balance.
///  endpoint: f_d^+(k) and f_d^-(k+1) both evaluate f at node k+1, giving gamma Omega_{k+1}.
///            The discrete Kelvin-Noether identity I_k - I_{k-1} = h^2 <Gamma_k, f_k> is exact.
///  averaged: the printed heavy-top form (gamma/2)(Omega_{k+1} + Omega_k); the exact identity
///            becomes I_k - I_{k-1} = (h^2/2) <Gamma_k, f_k + f_{k-1}>.
enum class FrictionPairing { endpoint, averaged };

/// closed_form needs a HeavyTopSystem; other systems always take the generic path.
enum class ResidualPath { closed_form, generic };

struct SolverSettings {
  double newton_tol = 1e-12;
  int max_iterations = 50;
  JacobianMode jacobian_mode = JacobianMode::analytic;
  double fd_step = 1e-7;
  InitialGuess initial_guess = InitialGuess::previous_omega;

  void validate() const;
};

struct SchemeOptions {
  FrictionPairing friction = FrictionPairing::endpoint;
  ResidualPath residual = ResidualPath::closed_form;
};

// ---------------------------------------------------------------------------
// Newton

using ResidualFn = std::function<Vec3(const Vec3&)>;
using JacobianFn = std::function<Mat3(const Vec3&)>;

struct NewtonResult {
  Vec3 root;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> history;  // residual norm before each update, then the final one
};

/// Dense Newton on R^3 until ||residual||_2 <= newton_tol. Uses `jacobian` when
/// given and jacobian_mode is analytic, forward differences otherwise.
/// Throws NoConvergence or SingularJacobian.
NewtonResult newton_solve(const ResidualFn& residual, const Vec3& guess, const SolverSettings& settings,
                          const JacobianFn& jacobian = {});

Mat3 finite_difference_jacobian(const ResidualFn& residual, const Vec3& x, const Vec3& r_at_x, double fd_step);

// ---------------------------------------------------------------------------
// Scheme pieces

/// Root of p_d(xi_k, a_k, S_k, S_{k+1}) = 0 with the temperature frozen at S_k.
double entropy_update(const ReducedState& st_k, double h, const ThermoSystem& sys);

/// (S_next - S_k)/h - (-<f_fr, xi_k> + p_H)/T(S_k).
double phenomenological_residual(const ReducedState& st_k, double entropy_next, double h,
                                 const ThermoSystem& sys);

/// cay(-h Omega_k) Gamma_k.
Vec3 advect(const Vec3& gamma_k, const Vec3& omega_k, double h);

/// Closed-form heavy-top momentum residual, divided by h^2:
///   (Pi_{k+1} - Pi_k)/h + 1/2 (Omega_{k+1} x Pi_{k+1} + Omega_k x Pi_k)
///   - h/4 (v_{k+1} - v_k) - mgl Gamma_{k+1} x chi + friction,
/// with v = Omega x (Pi x Omega) - |Omega|^2 Pi.
Vec3 momentum_residual_heavytop(const Vec3& omega_next, const Vec3& omega_k, const Vec3& gamma_next, double h,
                                const HeavyTopDerived& d, FrictionPairing pairing = FrictionPairing::endpoint);

/// Analytic Jacobian of momentum_residual_heavytop with respect to omega_next.
Mat3 momentum_jacobian_heavytop(const Vec3& omega_next, double h, const HeavyTopDerived& d,
                                FrictionPairing pairing = FrictionPairing::endpoint);

/// Transported discrete momentum balance through a generic group difference map,
/// with l_d = h l(xi_k, a_k, S_k) and trapezoidal discrete forces (h/2) f. Divided by h^2
/// so that it coincides with momentum_residual_heavytop for the heavy top.
Vec3 momentum_residual_generic(const Vec3& xi_next, const ReducedState& st_k, const Vec3& gamma_next,
                               double entropy_next, double h, const ThermoSystem& sys,
                               const GroupDifferenceMap& tau, FrictionPairing pairing = FrictionPairing::endpoint);

/// I_k = <Gamma_k, (dtau^{-1}_{h Omega_k})^* (h dl/dOmega)>; for Cayley this is
/// Gamma_k . dcay_inv(-h Omega_k, h I Omega_k).
double kelvin_noether_discrete(const ReducedState& st_k, double h, const ThermoSystem& sys,
                               const GroupDifferenceMap& tau);
double kelvin_noether_discrete(const ReducedState& st_k, double h, const ThermoSystem& sys);

/// Momentum at node k from the interval velocity Omega_{k-1} and the node state
/// (Gamma_k, S_k, and Omega_k for velocity-dependent forces):
///   (dtau^{-1}_{-h Omega_{k-1}})^* (h I Omega_{k-1}) / h + (h/2) F_k,
/// F_k = -J(Gamma_k, dl/dGamma) + f_ext + f_fr. Second-order accurate at t_k.
Vec3 node_momentum(const Vec3& omega_prev, const ReducedState& st_k, double h, const ThermoSystem& sys,
                   const GroupDifferenceMap& tau);
Vec3 node_velocity(const Vec3& omega_prev, const ReducedState& st_k, double h, const ThermoSystem& sys);

/// Interval velocity Omega_0 whose discrete Legendre transform matches the
/// continuous momentum I * st0.omega at t = 0. Throws NoConvergence / SingularJacobian.
Vec3 discrete_initial_velocity(const ReducedState& st0, double h, const ThermoSystem& sys,
                               const SolverSettings& settings);

// ---------------------------------------------------------------------------
// Stepping

struct DiscreteStep {
  ReducedState state_next;
  Rotation rotation_next;
  int newton_iterations = 0;
  double residual_norm = 0.0;
  double kn_value = 0.0;  // I_{k+1}
};

/// Immutable stepper configuration; step() is a pure function of its arguments.
class VariationalIntegrator {
 public:
  VariationalIntegrator(const ThermoSystem& sys, SolverSettings settings = {}, SchemeOptions scheme = {});

  DiscreteStep step(const ReducedState& st_k, const Rotation& r_k, double h) const;

  const SolverSettings& settings() const { return settings_; }
  const SchemeOptions& scheme() const { return scheme_; }
  const ThermoSystem& system() const { return sys_; }

 private:
  const ThermoSystem& sys_;
  const HeavyTopSystem* heavy_top_;  // non-null when the closed-form path applies
  SolverSettings settings_;
  SchemeOptions scheme_;
  CayleyMap tau_;
};

DiscreteStep vi_step(const ReducedState& st_k, const Rotation& r_k, double h, const ThermoSystem& sys,
                     const SolverSettings& settings = {}, const SchemeOptions& scheme = {});

}  // namespace thermolie
