#include "thermolie/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "thermolie/cli/csv.hpp"
#include "thermolie/cli/svg.hpp"

namespace thermolie::cli {

using nlohmann::json;

Trajectory simulate(const RunConfig& config, std::optional<Method> method) {
  const auto sys = make_system(config);
  RunOptions opts = config.run;
  if (method) opts.method = *method;
  return run_trajectory(*sys, config.initial, config.r0, opts);
}

json summary_json(const RunSummary& s) {
  return {{"max_rel_energy_deviation", s.max_rel_energy_deviation},
          {"energy_slope", s.energy_slope},
          {"min_entropy_increment", s.min_entropy_increment},
          {"max_kn_residual", s.max_kn_residual},
          {"max_kn_value", s.max_kn_value},
          {"max_gamma_norm_deviation", s.max_gamma_norm_deviation},
          {"max_orthogonality_defect", s.max_orthogonality_defect}};
}

// ---------------------------------------------------------------------------
// compare

namespace {

json trajectory_json(const Trajectory& traj, const RunConfig& config, const ThermoSystem& sys) {
  json j;
  j["steps_completed"] = traj.records.size() - 1;
  j["failed_step"] = traj.failed_step ? json(*traj.failed_step) : json(nullptr);
  if (traj.failed_step) j["failure"] = traj.failure;
  if (traj.records.size() >= 2)
    j["summary"] = summary_json(summarize(traj, config.run.h, sys, config.run.scheme.friction));
  else
    j["summary"] = nullptr;
  return j;
}

Series column_series(const std::string& label, const std::vector<TrajectoryRecord>& recs,
                     double (*get)(const TrajectoryRecord&, double), double offset) {
  Series s;
  s.label = label;
  for (const auto& r : recs) {
    s.x.push_back(r.t);
    s.y.push_back(get(r, offset));
  }
  return s;
}

}  // namespace

CompareResult compare(const RunConfig& config, const std::filesystem::path& out_dir) {
  const auto sys = make_system(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const auto launch = [&](Method m) {
    RunOptions opts = config.run;
    opts.method = m;
    opts.keep_partial = true;
    return std::async(std::launch::async, [&sys, &config, opts] {
      return run_trajectory(*sys, config.initial, config.r0, opts);
    });
  };
  auto vi_future = launch(Method::vi);
  auto rk2_future = launch(Method::rk2);
  CompareResult res;
  res.vi = vi_future.get();
  res.rk2 = rk2_future.get();

  write_csv_file(out_dir / "vi.csv", res.vi.records);
  write_csv_file(out_dir / "rk2.csv", res.rk2.records);

  json summary;
  summary["h"] = config.run.h;
  summary["steps"] = config.run.steps;
  summary["vi"] = trajectory_json(res.vi, config, *sys);
  summary["rk2"] = trajectory_json(res.rk2, config, *sys);
  if (!summary["vi"]["summary"].is_null() && !summary["rk2"]["summary"].is_null()) {
    const double sv = summary["vi"]["summary"]["energy_slope"].get<double>();
    const double sr = summary["rk2"]["summary"]["energy_slope"].get<double>();
    summary["slope_ratio_vi_over_rk2"] = sr != 0.0 ? json(std::fabs(sv) / std::fabs(sr)) : json(nullptr);
  }
  write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
  res.summary = summary;

  const double e0 = res.vi.records.front().total;
  const auto energy = [](const TrajectoryRecord& r, double off) { return r.total - off; };
  const auto entropy = [](const TrajectoryRecord& r, double) { return r.entropy; };
  const auto com_z = [](const TrajectoryRecord& r, double) {
    return r.com ? r.com->z : std::numeric_limits<double>::quiet_NaN();
  };
  write_text_file(out_dir / "energy.svg",
                  render_svg({column_series("vi", res.vi.records, energy, e0),
                              column_series("rk2", res.rk2.records, energy, e0)},
                             {"Total energy drift", "t [s]", "e_total - e_0 [J]"}));
  write_text_file(out_dir / "entropy.svg",
                  render_svg({column_series("vi", res.vi.records, entropy, 0.0),
                              column_series("rk2", res.rk2.records, entropy, 0.0)},
                             {"Entropy", "t [s]", "S [J/K]"}));
  write_text_file(out_dir / "com_z.svg",
                  render_svg({column_series("vi", res.vi.records, com_z, 0.0),
                              column_series("rk2", res.rk2.records, com_z, 0.0)},
                             {"Center of mass height", "t [s]", "com_z [m]"}));
  return res;
}

// ---------------------------------------------------------------------------
// check

bool CheckReport::passed() const {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

json CheckReport::to_json() const {
  json checks = json::array();
  for (const auto& r : results) {
    json c{{"name", r.name}, {"passed", r.passed}, {"value", r.value}, {"threshold", r.threshold}};
    if (!r.detail.empty()) c["detail"] = r.detail;
    checks.push_back(c);
  }
  return {{"passed", passed()}, {"checks", checks}};
}

namespace {

constexpr int kSamples = 1000;
constexpr double kRelTol = 1e-12;

class Sampler {
 public:
  explicit Sampler(unsigned seed) : rng_(seed) {}
  Vec3 vec(double scale = 1.0) { return {scale * n_(rng_), scale * n_(rng_), scale * n_(rng_)}; }
  Vec3 unit() {
    Vec3 v = vec();
    while (norm(v) < 1e-3) v = vec();
    return v / norm(v);
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> n_{0.0, 1.0};
};

// Accumulates the worst value of a sampled quantity against a fixed threshold.
struct Worst {
  std::string name;
  double threshold;
  double value = 0.0;
  void see(double v) { value = std::isnan(v) ? v : std::max(value, v); }
  CheckResult result() const { return {name, value <= threshold, value, threshold, {}}; }
};

double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

void algebra_checks(Sampler& s, std::vector<CheckResult>& out) {
  Worst hat_vee{"so3.hat_vee_roundtrip", kRelTol};
  Worst isometry{"so3.hat_isometry", kRelTol};
  Worst cay_orth{"so3.cayley_orthogonal", kRelTol};
  Worst cay_inv{"so3.cayley_inverse", kRelTol};
  Worst dcay_id{"so3.dcay_dcay_inv_inverse", kRelTol};
  Worst star_pair{"so3.dcay_inv_star_pairing", kRelTol};
  Worst coad_pair{"so3.coad_pairing", kRelTol};
  for (int i = 0; i < kSamples; ++i) {
    const Vec3 v = s.vec();
    const Vec3 w = s.vec();
    const Vec3 mu = s.vec();
    hat_vee.see(rel(norm(vee(hat(v)) - v), norm(v)));
    const Mat3 p = hat(v).transpose() * hat(w);
    isometry.see(rel(std::fabs(0.5 * (p(0, 0) + p(1, 1) + p(2, 2)) - dot(v, w)), norm(v) * norm(w)));
    const Rotation c = cay(v);
    cay_orth.see(c.orthogonality_defect());
    cay_inv.see(norm_inf((cay(-v) * c).matrix() - Mat3::identity()));
    dcay_id.see(rel(norm(dcay(v, dcay_inv(v, w)) - w), norm(w)));
    const double lhs = dot(dcay_inv_star(v, mu), w);
    const double rhs_val = dot(mu, dcay_inv(v, w));
    star_pair.see(rel(std::fabs(lhs - rhs_val), norm(mu) * norm(dcay_inv(v, w)) + norm(dcay_inv_star(v, mu)) * norm(w)));
    coad_pair.see(rel(std::fabs(dot(coad(v, mu), w) - dot(mu, ad(v, w))), norm(mu) * norm(v) * norm(w)));
  }
  for (const Worst* c : {&hat_vee, &isometry, &cay_orth, &cay_inv, &dcay_id, &star_pair, &coad_pair})
    out.push_back(c->result());
}

void rhs_checks(Sampler& s, const ThermoSystem& sys, std::vector<CheckResult>& out) {
  Worst energy{"continuous.energy_balance", kRelTol};
  Worst tangency{"continuous.gamma_tangency", kRelTol};
  Worst kn{"continuous.kelvin_noether_rate", kRelTol};
  Worst coadj{"continuous.coadjoint_tangency", kRelTol};
  double min_ds = std::numeric_limits<double>::infinity();
  const ThermalModel& th = sys.thermal();
  for (int i = 0; i < kSamples; ++i) {
    const ReducedState st{s.vec(), s.unit(), th.reference_entropy + th.heat_capacity * s.uniform(-1.0, 1.0)};
    const StateDerivative d = rhs(st, sys);
    const Vec3 mu = sys.dl_domega(st);
    const double k_term = dot(mu, d.d_omega);
    const double p_term = -dot(sys.dl_dgamma(st), d.d_gamma);
    const double u_term = sys.temperature(st.entropy) * d.d_entropy;
    energy.see(rel(std::fabs(k_term + p_term + u_term), std::fabs(k_term) + std::fabs(p_term) + std::fabs(u_term)));
    min_ds = std::min(min_ds, d.d_entropy);
    if (sys.has_advected_parameter()) {
      tangency.see(rel(std::fabs(dot(st.gamma, d.d_gamma)), norm(st.gamma) * norm(d.d_gamma)));
      const double a = dot(sys.inertia() * d.d_omega, st.gamma);
      const double b = dot(mu, d.d_gamma);
      const double r = kelvin_noether_rate(st, sys);
      kn.see(rel(std::fabs(a + b - r), std::fabs(a) + std::fabs(b) + std::fabs(r)));
    } else {
      const Vec3 dmu = sys.inertia() * d.d_omega;
      coadj.see(rel(std::fabs(dot(mu, dmu)), norm(mu) * norm(dmu)));
    }
  }
  out.push_back(energy.result());
  if (sys.has_advected_parameter()) {
    out.push_back(tangency.result());
    out.push_back(kn.result());
  } else {
    out.push_back(coadj.result());
  }
  out.push_back({"continuous.entropy_production_nonnegative", min_ds >= 0.0, min_ds, 0.0, "minimum dS/dt"});
}

void trajectory_checks(const RunConfig& config, const ThermoSystem& sys, std::vector<CheckResult>& out) {
  RunOptions opts = config.run;
  opts.method = Method::vi;
  Trajectory traj;
  try {
    traj = run_trajectory(sys, config.initial, config.r0, opts);
  } catch (const SolverError& e) {
    out.push_back({"trajectory.run", false, 0.0, 0.0, e.what()});
    return;
  }
  out.push_back({"trajectory.run", true, static_cast<double>(traj.records.size() - 1), 0.0, "steps completed"});
  const RunSummary s = summarize(traj, opts.h, sys, opts.scheme.friction);
  out.push_back({"trajectory.entropy_non_decreasing", s.min_entropy_increment >= 0.0, s.min_entropy_increment, 0.0,
                 "minimum S_k - S_{k-1}"});
  if (sys.has_advected_parameter()) {
    const double bound = kCheckKnTolerance * std::max(s.max_kn_value, 1.0);
    out.push_back({"trajectory.kelvin_noether_identity", s.max_kn_residual <= bound, s.max_kn_residual, bound,
                   "max |I_k - I_{k-1} - h^2 <Gamma_k, f>|"});
    double worst = 0.0;
    const double g0 = traj.records.front().gamma_norm;
    for (const auto& r : traj.records)
      worst = std::max(worst, std::fabs(r.gamma_norm - g0) / std::max<double>(1.0, static_cast<double>(r.step)));
    out.push_back({"trajectory.gamma_norm_drift_per_step", worst <= 1e-12, worst, 1e-12, "max_k | |Gamma_k| - |Gamma_0| | / k"});
  }
  out.push_back({"trajectory.rotation_orthogonality", s.max_orthogonality_defect <= 1e-10,
                 s.max_orthogonality_defect, 1e-10, "max ||R^T R - I||_inf"});
  const bool finite = std::isfinite(s.max_rel_energy_deviation) && std::isfinite(s.energy_slope);
  out.push_back({"trajectory.energy_bounded", finite, s.max_rel_energy_deviation, 0.0,
                 "max relative energy deviation (reported)"});
}

}  // namespace

CheckReport run_checks(const RunConfig& config, unsigned seed) {
  const auto sys = make_system(config);
  Sampler sampler(seed);
  CheckReport rep;
  algebra_checks(sampler, rep.results);
  rhs_checks(sampler, *sys, rep.results);
  trajectory_checks(config, *sys, rep.results);
  return rep;
}

// ---------------------------------------------------------------------------
// convergence

std::vector<ConvergenceRow> run_convergence(const RunConfig& config, const std::vector<double>& h_list,
                                            double t_final, std::optional<double> h_ref) {
  if (h_list.empty()) throw InvalidParameter("h_list", "must not be empty");
  const double href = h_ref ? *h_ref : *std::min_element(h_list.begin(), h_list.end()) / 10.0;
  std::vector<ConvergenceRow> rows;
  for (const char* variant : {"frictionless", "full"}) {
    RunConfig c = config;
    if (std::string(variant) == "frictionless") {
      c.heavy_top.viscosity = 0.0;
      c.db_lambda = 0.0;
    }
    const auto sys = make_system(c);
    for (const Method m : {Method::vi, Method::rk2}) {
      ConvergenceRow row;
      row.variant = variant;
      row.method = method_name(m);
      row.report = convergence_order(h_list, *sys, c.initial, t_final, href, m, c.run.solver, c.run.scheme);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_convergence_table(const std::vector<ConvergenceRow>& rows) {
  std::string out = "variant       method  h             error         local_order\n";
  char buf[160];
  for (const auto& row : rows) {
    for (const auto& e : row.report.entries) {
      std::snprintf(buf, sizeof buf, "%-13s %-7s %-13.6g %-13.6e %s\n", row.variant.c_str(), row.method.c_str(), e.h,
                    e.error, e.local_order ? std::to_string(*e.local_order).c_str() : "-");
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%-13s %-7s fitted order %.4f (reference rk4, h_ref = %g)\n", row.variant.c_str(),
                  row.method.c_str(), row.report.order, row.report.h_ref);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// argument helpers

std::vector<std::string> parse_name_list(const std::string& text, const std::string& what) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw InvalidParameter(what, "empty entry in list");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw InvalidParameter(what, "must not be empty");
  return out;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : parse_name_list(text, what)) {
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size())
      throw InvalidParameter(what, "not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// entry point

int run_cli(int argc, char** argv) {
  CLI::App app{"Thermodynamic Lie-group variational integrator: heavy top in Stokes flow and double-bracket body"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string method;
  auto* sim = app.add_subcommand("simulate", "Run one method and write a trajectory CSV");
  sim->add_option("--config", config_path, "JSON run configuration")->required();
  sim->add_option("--out", out_path, "CSV output path (defaults to output.csv in the config)");
  sim->add_option("--method", method, "vi | rk2 | rk4 (overrides the config)");

  std::string out_dir;
  auto* cmp = app.add_subcommand("compare", "Run vi and rk2 side by side with summary and plots");
  cmp->add_option("--config", config_path, "JSON run configuration")->required();
  cmp->add_option("--out-dir", out_dir, "Output directory")->required();

  std::string report_path;
  auto* chk = app.add_subcommand("check", "Run the invariant suites; exit 4 on failure");
  chk->add_option("--config", config_path, "JSON run configuration")->required();
  chk->add_option("--report", report_path, "Write a JSON report here");

  std::string h_list;
  double t_final = 1.0;
  std::optional<double> h_ref;
  auto* conv = app.add_subcommand("convergence", "Estimate convergence order against an rk4 reference");
  conv->add_option("--config", config_path, "JSON run configuration")->required();
  conv->add_option("--h-list", h_list, "Comma-separated descending step sizes")->required();
  conv->add_option("--t-final", t_final, "Final time (multiple of every h)");
  conv->add_option("--h-ref", h_ref, "Reference rk4 step (default min(h)/10)");
  conv->add_option("--report", report_path, "Write a JSON report here");

  std::string in_path;
  std::string fields;
  auto* plt = app.add_subcommand("plot", "Plot CSV columns against t as SVG");
  plt->add_option("--in", in_path, "Input CSV")->required();
  plt->add_option("--fields", fields, "Comma-separated column names")->required();
  plt->add_option("--out", out_path, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (sim->parsed()) {
      const RunConfig config = load_config(config_path);
      std::optional<Method> m;
      if (!method.empty()) m = parse_method(method, "--method");
      if (out_path.empty()) {
        if (!config.output_csv) throw ConfigError("output.csv", "no --out given and no output path in config");
        out_path = *config.output_csv;
      }
      const Trajectory traj = simulate(config, m);
      write_csv_file(out_path, traj.records);
      return kExitOk;
    }
    if (cmp->parsed()) {
      const CompareResult res = compare(load_config(config_path), out_dir);
      if (!res.all_completed()) {
        for (const auto* t : {&res.vi, &res.rk2})
          if (t->failed_step)
            std::cerr << (t == &res.vi ? "vi" : "rk2") << " failed at step " << *t->failed_step << ": "
                      << t->failure << "\n";
        std::cerr << "partial outputs written to " << out_dir << "\n";
        return kExitSolver;
      }
      std::cerr << "wall-clock: vi " << res.vi.wall_seconds << " s, rk2 " << res.rk2.wall_seconds << " s\n";
      return kExitOk;
    }
    if (chk->parsed()) {
      const CheckReport rep = run_checks(load_config(config_path));
      for (const auto& r : rep.results)
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  value=" << format_double(r.value)
                  << " threshold=" << format_double(r.threshold) << (r.detail.empty() ? "" : "  (" + r.detail + ")")
                  << "\n";
      if (!report_path.empty()) write_text_file(report_path, rep.to_json().dump(2) + "\n");
      return rep.passed() ? kExitOk : kExitCheckFailed;
    }
    if (conv->parsed()) {
      const RunConfig config = load_config(config_path);
      const auto rows = run_convergence(config, parse_number_list(h_list, "--h-list"), t_final, h_ref);
      std::cout << format_convergence_table(rows);
      if (!report_path.empty()) {
        json j = json::array();
        for (const auto& row : rows) {
          json entries = json::array();
          for (const auto& e : row.report.entries)
            entries.push_back({{"h", e.h}, {"error", e.error},
                               {"local_order", e.local_order ? json(*e.local_order) : json(nullptr)}});
          j.push_back({{"variant", row.variant}, {"method", row.method}, {"order", row.report.order},
                       {"h_ref", row.report.h_ref}, {"entries", entries}});
        }
        write_text_file(report_path, j.dump(2) + "\n");
      }
      return kExitOk;
    }
    if (plt->parsed()) {
      const CsvTable table = read_csv(in_path);
      const auto names = parse_name_list(fields, "--fields");
      write_text_file(out_path, render_svg(series_from_csv(table, names), {in_path, "t [s]", ""}));
      return kExitOk;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitValidation;
}

}  // namespace thermolie::cli
