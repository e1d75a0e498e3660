#pragma once

// Trajectory records, runs, and the checks built on them: energy drift,
// entropy monotonicity, discrete Kelvin-Noether residuals, constraint drift
// and convergence-order fits.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "thermolie/continuous.hpp"
#include "thermolie/integrator.hpp"

namespace thermolie {

struct SolverStats {
  int newton_iterations = 0;
  double residual_norm = 0.0;
};

struct TrajectoryRecord {
  std::size_t step = 0;
  double t = 0.0;
  Vec3 omega;
  Vec3 gamma;
  double entropy = 0.0;
  double temperature = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double internal = 0.0;
  double total = 0.0;
  std::optional<double> kn_value;  // only for systems with an advected parameter
  double pi_norm = 0.0;
  double gamma_norm = 0.0;
  std::optional<Vec3> com;  // spatial R * marker, when the system has one
  double orthogonality_defect = 0.0;
  std::optional<int> newton_iterations;
  std::optional<double> residual_norm;
};

/// t = k h; total = kinetic + potential + internal.
TrajectoryRecord record(const ReducedState& st, const Rotation& r, const ThermoSystem& sys, std::size_t k, double h,
                        std::optional<SolverStats> stats = std::nullopt);

// ---------------------------------------------------------------------------
// Runs

enum class Method { vi, rk2, rk4 };

struct RunOptions {
  Method method = Method::vi;
  double h = 0.1;
  std::size_t steps = 2000;
  SolverSettings solver;
  SchemeOptions scheme;
  Rk2Variant rk2_variant = Rk2Variant::heun;
  bool keep_partial = false;  // on failure return the records so far instead of throwing
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;  // steps + 1 entries, starting at the initial state
  ReducedState final_state;
  Rotation final_rotation;
  double wall_seconds = 0.0;
  std::optional<std::size_t> failed_step;  // set only with keep_partial
  std::string failure;
};

/// Steps the initial state; solver failures are rethrown as StepFailure carrying
/// the index of the failing step (1-based: the step producing record k).
Trajectory run_trajectory(const ThermoSystem& sys, const ReducedState& st0, const Rotation& r0,
                          const RunOptions& options);

// ---------------------------------------------------------------------------
// Checks

struct DriftStats {
  double max_rel_deviation = 0.0;  // max_k |e_k - e_0| / |e_0|
  double slope = 0.0;              // least-squares slope of e_k against t_k, J/s
};

/// Throws InsufficientData for fewer than two records.
DriftStats energy_drift_stats(const std::vector<TrajectoryRecord>& records);

/// r_k = I_k - I_{k-1} - h^2 <Gamma_k, f_k> (endpoint pairing), or
/// r_k = I_k - I_{k-1} - (h^2/2) <Gamma_k, f_k + f_{k-1}> (averaged), with f = f_ext + f_fr.
/// For the heavy top with endpoint pairing this is I_k - I_{k-1} + gamma h^2 Gamma_k.Omega_k.
/// Empty for fewer than two records or for systems without an advected parameter.
std::vector<double> kn_identity_residuals(const std::vector<TrajectoryRecord>& records, double h,
                                          const ThermoSystem& sys,
                                          FrictionPairing pairing = FrictionPairing::endpoint);

/// S_k - S_{k-1} for k >= 1.
std::vector<double> entropy_increments(const std::vector<TrajectoryRecord>& records);

struct RunSummary {
  double max_rel_energy_deviation = 0.0;
  double energy_slope = 0.0;
  double min_entropy_increment = 0.0;
  double max_kn_residual = 0.0;
  double max_kn_value = 0.0;
  double max_gamma_norm_deviation = 0.0;
  double max_orthogonality_defect = 0.0;
  double wall_seconds = 0.0;
};

/// Throws InsufficientData for fewer than two records.
RunSummary summarize(const Trajectory& traj, double h, const ThermoSystem& sys,
                     FrictionPairing pairing = FrictionPairing::endpoint);

// ---------------------------------------------------------------------------
// Convergence

struct StateWeights {
  double omega = 1.0;
  double gamma = 1.0;
  double entropy = 1.0;  // set to 1/c_v by default_weights
};

StateWeights default_weights(const ThermoSystem& sys);

double state_distance(const ReducedState& a, const ReducedState& b, const StateWeights& w);

/// The node state at t_final = N h, as a continuous-time approximation.
/// For VI: Omega_0 from discrete_initial_velocity and Omega read out with node_velocity,
/// so that interval velocities are compared at the right time. RK: the plain step result.
ReducedState final_node_state(const ThermoSystem& sys, const ReducedState& st0, Method method, double h,
                              std::size_t steps, const SolverSettings& solver = {},
                              const SchemeOptions& scheme = {});

struct ConvergenceEntry {
  double h = 0.0;
  double error = 0.0;
  std::optional<double> local_order;  // log(e_{i-1}/e_i) / log(h_{i-1}/h_i)
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;
  double order = 0.0;  // least-squares slope of log error against log h
  double h_ref = 0.0;
  ReducedState reference;
};

/// h_list strictly descending with at least three entries; t_final an integer
/// multiple of each h and of h_ref; h_ref <= min(h_list)/10, else ReferenceTooCoarse.
/// The reference is an rk4 run at h_ref.
ConvergenceReport convergence_order(const std::vector<double>& h_list, const ThermoSystem& sys,
                                    const ReducedState& st0, double t_final, double h_ref, Method method,
                                    const SolverSettings& solver = {}, const SchemeOptions& scheme = {});

/// Same, against a caller-supplied reference state at t_final.
ConvergenceReport convergence_order(const std::vector<double>& h_list, const ThermoSystem& sys,
                                    const ReducedState& st0, double t_final, const ReducedState& reference,
                                    Method method, const SolverSettings& solver = {},
                                    const SchemeOptions& scheme = {});

/// Number of steps N with N h = t_final; throws InvalidParameter otherwise.
std::size_t steps_for(double t_final, double h);

/// Least-squares slope of y against x. Throws InsufficientData for fewer than two points.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace thermolie
