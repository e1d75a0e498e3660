#include "thermolie/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace thermolie {

TrajectoryRecord record(const ReducedState& st, const Rotation& r, const ThermoSystem& sys, std::size_t k, double h,
                        std::optional<SolverStats> stats) {
  TrajectoryRecord rec;
  rec.step = k;
  rec.t = static_cast<double>(k) * h;
  rec.omega = st.omega;
  rec.gamma = st.gamma;
  rec.entropy = st.entropy;
  rec.temperature = sys.temperature(st.entropy);
  const EnergyParts e = energy_parts(st, sys);
  rec.kinetic = e.kinetic;
  rec.potential = e.potential;
  rec.internal = e.internal;
  rec.total = e.total;
  if (sys.has_advected_parameter()) rec.kn_value = kelvin_noether_discrete(st, h, sys);
  rec.pi_norm = norm(sys.dl_domega(st));
  rec.gamma_norm = norm(st.gamma);
  if (const auto marker = sys.body_marker()) rec.com = r * *marker;
  rec.orthogonality_defect = r.orthogonality_defect();
  if (stats) {
    rec.newton_iterations = stats->newton_iterations;
    rec.residual_norm = stats->residual_norm;
  }
  return rec;
}

// ---------------------------------------------------------------------------

Trajectory run_trajectory(const ThermoSystem& sys, const ReducedState& st0, const Rotation& r0,
                          const RunOptions& options) {
  if (!(options.h > 0.0) || !std::isfinite(options.h)) throw InvalidParameter("h", "must be > 0");
  if (options.steps < 1) throw InvalidParameter("steps", "must be >= 1");
  check_state(st0);

  const auto start = std::chrono::steady_clock::now();
  const double h = options.h;
  Trajectory traj;
  traj.records.reserve(options.steps + 1);
  traj.records.push_back(record(st0, r0, sys, 0, h));

  const VariationalIntegrator vi(sys, options.solver, options.scheme);
  ReducedState st = st0;
  Rotation r = r0;
  for (std::size_t k = 1; k <= options.steps; ++k) {
    try {
      if (options.method == Method::vi) {
        const DiscreteStep step = vi.step(st, r, h);
        st = step.state_next;
        r = step.rotation_next;
        traj.records.push_back(record(st, r, sys, k, h, SolverStats{step.newton_iterations, step.residual_norm}));
      } else {
        const ReducedState next = options.method == Method::rk2 ? rk2_step(st, h, sys, options.rk2_variant)
                                                                : rk4_step(st, h, sys);
        r = reconstruct_rotation(r, st.omega, next.omega, h);
        st = next;
        traj.records.push_back(record(st, r, sys, k, h));
      }
    } catch (const SolverError& e) {
      if (!options.keep_partial) throw StepFailure(k, e.what());
      traj.failed_step = k;
      traj.failure = e.what();
      break;
    } catch (const NotARotation& e) {
      if (!options.keep_partial) throw StepFailure(k, e.what());
      traj.failed_step = k;
      traj.failure = e.what();
      break;
    }
  }
  traj.final_state = st;
  traj.final_rotation = r;
  traj.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

// ---------------------------------------------------------------------------

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidParameter("series", "x and y lengths differ");
  if (x.size() < 2) throw InsufficientData("least-squares slope needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw InsufficientData("least-squares slope needs distinct abscissae");
  return sxy / sxx;
}

DriftStats energy_drift_stats(const std::vector<TrajectoryRecord>& records) {
  if (records.size() < 2) throw InsufficientData("energy drift needs at least two records");
  const double e0 = records.front().total;
  std::vector<double> t;
  std::vector<double> de;
  t.reserve(records.size());
  de.reserve(records.size());
  DriftStats out;
  for (const auto& rec : records) {
    // Offsets from e_0 keep the fit well conditioned when e_0 dwarfs the drift.
    const double d = rec.total - e0;
    out.max_rel_deviation = std::max(out.max_rel_deviation, std::fabs(d) / std::fabs(e0));
    t.push_back(rec.t);
    de.push_back(d);
  }
  out.slope = least_squares_slope(t, de);
  return out;
}

std::vector<double> kn_identity_residuals(const std::vector<TrajectoryRecord>& records, double h,
                                          const ThermoSystem& sys, FrictionPairing pairing) {
  std::vector<double> out;
  if (records.size() < 2 || !sys.has_advected_parameter()) return out;
  const auto force = [&](const TrajectoryRecord& rec) {
    const ReducedState st{rec.omega, rec.gamma, rec.entropy};
    return sys.external_force(st) + sys.friction_force(st);
  };
  const auto kn = [&](const TrajectoryRecord& rec) {
    return rec.kn_value ? *rec.kn_value : kelvin_noether_discrete({rec.omega, rec.gamma, rec.entropy}, h, sys);
  };
  out.reserve(records.size() - 1);
  for (std::size_t k = 1; k < records.size(); ++k) {
    const TrajectoryRecord& cur = records[k];
    const TrajectoryRecord& prev = records[k - 1];
    const Vec3 f = pairing == FrictionPairing::endpoint ? force(cur) : 0.5 * (force(cur) + force(prev));
    out.push_back(kn(cur) - kn(prev) - h * h * dot(cur.gamma, f));
  }
  return out;
}

std::vector<double> entropy_increments(const std::vector<TrajectoryRecord>& records) {
  std::vector<double> out;
  for (std::size_t k = 1; k < records.size(); ++k) out.push_back(records[k].entropy - records[k - 1].entropy);
  return out;
}

RunSummary summarize(const Trajectory& traj, double h, const ThermoSystem& sys, FrictionPairing pairing) {
  const DriftStats drift = energy_drift_stats(traj.records);
  RunSummary s;
  s.max_rel_energy_deviation = drift.max_rel_deviation;
  s.energy_slope = drift.slope;
  const std::vector<double> dS = entropy_increments(traj.records);
  s.min_entropy_increment = *std::min_element(dS.begin(), dS.end());
  for (const double r : kn_identity_residuals(traj.records, h, sys, pairing))
    s.max_kn_residual = std::max(s.max_kn_residual, std::fabs(r));
  for (const auto& rec : traj.records) {
    if (rec.kn_value) s.max_kn_value = std::max(s.max_kn_value, std::fabs(*rec.kn_value));
    s.max_gamma_norm_deviation = std::max(s.max_gamma_norm_deviation, std::fabs(rec.gamma_norm - 1.0));
    s.max_orthogonality_defect = std::max(s.max_orthogonality_defect, rec.orthogonality_defect);
  }
  s.wall_seconds = traj.wall_seconds;
  return s;
}

// ---------------------------------------------------------------------------

StateWeights default_weights(const ThermoSystem& sys) { return {1.0, 1.0, 1.0 / sys.thermal().heat_capacity}; }

double state_distance(const ReducedState& a, const ReducedState& b, const StateWeights& w) {
  const Vec3 dw = a.omega - b.omega;
  const Vec3 dg = a.gamma - b.gamma;
  const double ds = a.entropy - b.entropy;
  return std::sqrt(w.omega * w.omega * dot(dw, dw) + w.gamma * w.gamma * dot(dg, dg) +
                   w.entropy * w.entropy * ds * ds);
}

std::size_t steps_for(double t_final, double h) {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw InvalidParameter("t_final", "must be > 0");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidParameter("h", "must be > 0");
  const double n = std::round(t_final / h);
  if (n < 1.0 || std::fabs(n * h - t_final) > 1e-9 * t_final)
    throw InvalidParameter("h", "t_final " + std::to_string(t_final) + " is not a multiple of " + std::to_string(h));
  return static_cast<std::size_t>(n);
}

ReducedState final_node_state(const ThermoSystem& sys, const ReducedState& st0, Method method, double h,
                              std::size_t steps, const SolverSettings& solver, const SchemeOptions& scheme) {
  RunOptions opts;
  opts.method = method;
  opts.h = h;
  opts.steps = steps;
  opts.solver = solver;
  opts.scheme = scheme;
  if (method != Method::vi) return run_trajectory(sys, st0, Rotation::identity(), opts).final_state;

  ReducedState start = st0;
  start.omega = discrete_initial_velocity(st0, h, sys, solver);
  const Trajectory traj = run_trajectory(sys, start, Rotation::identity(), opts);
  const TrajectoryRecord& prev = traj.records[traj.records.size() - 2];
  ReducedState out = traj.final_state;
  out.omega = node_velocity(prev.omega, traj.final_state, h, sys);
  return out;
}

namespace {

void check_h_list(const std::vector<double>& h_list) {
  if (h_list.size() < 3) throw InsufficientData("convergence needs at least three step sizes");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0) || !std::isfinite(h_list[i])) throw InvalidParameter("h_list", "entries must be > 0");
    if (i > 0 && !(h_list[i] < h_list[i - 1])) throw InvalidParameter("h_list", "must be strictly descending");
  }
}

}  // namespace

ConvergenceReport convergence_order(const std::vector<double>& h_list, const ThermoSystem& sys,
                                    const ReducedState& st0, double t_final, const ReducedState& reference,
                                    Method method, const SolverSettings& solver, const SchemeOptions& scheme) {
  check_h_list(h_list);
  const StateWeights w = default_weights(sys);
  ConvergenceReport rep;
  rep.reference = reference;
  std::vector<double> log_h;
  std::vector<double> log_e;
  for (const double h : h_list) {
    const ReducedState fin = final_node_state(sys, st0, method, h, steps_for(t_final, h), solver, scheme);
    ConvergenceEntry entry;
    entry.h = h;
    entry.error = state_distance(fin, reference, w);
    if (!rep.entries.empty()) {
      const ConvergenceEntry& last = rep.entries.back();
      entry.local_order = std::log(last.error / entry.error) / std::log(last.h / entry.h);
    }
    rep.entries.push_back(entry);
    log_h.push_back(std::log(h));
    log_e.push_back(std::log(entry.error));
  }
  rep.order = least_squares_slope(log_h, log_e);
  return rep;
}

ConvergenceReport convergence_order(const std::vector<double>& h_list, const ThermoSystem& sys,
                                    const ReducedState& st0, double t_final, double h_ref, Method method,
                                    const SolverSettings& solver, const SchemeOptions& scheme) {
  check_h_list(h_list);
  const double bound = h_list.back() / 10.0;
  if (!(h_ref > 0.0) || h_ref > bound * (1.0 + 1e-12)) throw ReferenceTooCoarse(h_ref, bound);
  const ReducedState reference = final_node_state(sys, st0, Method::rk4, h_ref, steps_for(t_final, h_ref));
  ConvergenceReport rep = convergence_order(h_list, sys, st0, t_final, reference, method, solver, scheme);
  rep.h_ref = h_ref;
  return rep;
}

}  // namespace thermolie
