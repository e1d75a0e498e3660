#include "thermolie/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace thermolie::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// An object whose keys must all be consumed before finish().
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    return v ? as_number(*v, path(key)) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(path(key), "must be a boolean");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(path(key), "must be a string");
    return v->get<std::string>();
  }

  long long integer(const std::string& key, long long fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(path(key), "must be an integer");
    return v->get<long long>();
  }

  std::optional<Vec3> vec3(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_vec3(*v, path(key));
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError(path(item.key()), "unknown key");
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
    return d;
  }

  static Vec3 as_vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(path, "must be an array of 3 numbers");
    return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"), as_number(v[2], path + "[2]")};
  }

  static Mat3 as_mat3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(path, "must be 3 rows of 3 numbers");
    return Mat3::from_rows(as_vec3(v[0], path + "[0]"), as_vec3(v[1], path + "[1]"), as_vec3(v[2], path + "[2]"));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json mat_json(const Mat3& m) { return json::array({vec_json(m.row(0)), vec_json(m.row(1)), vec_json(m.row(2))}); }

template <class E>
E parse_enum(const std::string& value, const std::string& path,
             std::initializer_list<std::pair<const char*, E>> options) {
  std::string allowed;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    allowed += allowed.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(path, "unknown value '" + value + "' (expected one of: " + allowed + ")");
}

template <class E>
std::string enum_name(E value, std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, e] : options)
    if (e == value) return name;
  return "?";
}

const std::initializer_list<std::pair<const char*, SystemKind>> kSystems = {
    {"heavy_top", SystemKind::heavy_top}, {"double_bracket", SystemKind::double_bracket}};
const std::initializer_list<std::pair<const char*, Method>> kMethods = {
    {"vi", Method::vi}, {"rk2", Method::rk2}, {"rk4", Method::rk4}};
const std::initializer_list<std::pair<const char*, JacobianMode>> kJacobians = {
    {"analytic", JacobianMode::analytic}, {"finite_difference", JacobianMode::finite_difference}};
const std::initializer_list<std::pair<const char*, InitialGuess>> kGuesses = {
    {"previous_omega", InitialGuess::previous_omega}, {"rhs_predictor", InitialGuess::rhs_predictor}};
const std::initializer_list<std::pair<const char*, FrictionPairing>> kPairings = {
    {"endpoint", FrictionPairing::endpoint}, {"averaged", FrictionPairing::averaged}};
const std::initializer_list<std::pair<const char*, ResidualPath>> kResiduals = {
    {"closed_form", ResidualPath::closed_form}, {"generic", ResidualPath::generic}};
const std::initializer_list<std::pair<const char*, Rk2Variant>> kRk2 = {
    {"heun", Rk2Variant::heun}, {"midpoint", Rk2Variant::midpoint}};

void parse_heavy_top(const json& j, RunConfig& c) {
  Section s(j, "heavy_top");
  HeavyTopParams& p = c.heavy_top;
  p.radius = s.number("radius", p.radius);
  p.viscosity = s.number("viscosity", p.viscosity);
  p.density = s.number("density", p.density);
  p.upper_mass_fraction = s.number("upper_mass_fraction", p.upper_mass_fraction);
  p.gravity = s.number("gravity", p.gravity);
  p.molar_mass = s.number("molar_mass", p.molar_mass);
  p.gas_constant = s.number("gas_constant", p.gas_constant);
  p.reference_temperature = s.number("reference_temperature", p.reference_temperature);
  p.reference_entropy = s.number("reference_entropy", p.reference_entropy);
  c.axis = s.vec3("axis");
  s.finish();
}

void parse_double_bracket(const json& j, RunConfig& c) {
  Section s(j, "double_bracket");
  if (const json* v = s.find("inertia")) {
    // Either a full 3x3 matrix or its diagonal.
    if (v->is_array() && v->size() == 3 && (*v)[0].is_number())
      c.db_inertia = Mat3::diagonal(Section::as_vec3(*v, s.path("inertia")));
    else
      c.db_inertia = Section::as_mat3(*v, s.path("inertia"));
  }
  c.db_lambda = s.number("lambda", c.db_lambda);
  c.db_thermal.heat_capacity = s.number("heat_capacity", c.db_thermal.heat_capacity);
  c.db_thermal.reference_temperature = s.number("reference_temperature", c.db_thermal.reference_temperature);
  c.db_thermal.reference_entropy = s.number("reference_entropy", c.db_thermal.reference_entropy);
  s.finish();
}

void parse_initial(const json& j, RunConfig& c) {
  Section s(j, "initial");
  Mat3 r0 = Mat3::identity();
  if (const json* v = s.find("R0")) r0 = Section::as_mat3(*v, s.path("R0"));
  c.repair_r0 = s.boolean("repair_R0", false);
  try {
    c.r0 = c.repair_r0 ? Rotation::repaired(r0) : Rotation(r0);
  } catch (const NotARotation& e) {
    throw ConfigError(s.path("R0"), e.what());
  }
  if (auto w = s.vec3("omega0")) c.initial.omega = *w;
  c.initial.entropy = s.number("S0", c.initial.entropy);
  c.initial.gamma = c.r0.inverse() * Vec3{0.0, 0.0, 1.0};
  if (auto g = s.vec3("gamma0")) {
    if (std::fabs(norm(*g) - 1.0) > kGammaNormTolerance) throw ConfigError(s.path("gamma0"), "must have unit norm");
    c.initial.gamma = *g;
  }
  s.finish();
}

void parse_solver(const json& j, RunConfig& c) {
  Section s(j, "solver");
  SolverSettings& v = c.run.solver;
  v.newton_tol = s.number("newton_tol", v.newton_tol);
  const long long iters = s.integer("max_iterations", v.max_iterations);
  if (iters < 1 || iters > 1000000) throw ConfigError(s.path("max_iterations"), "must lie in [1, 1e6]");
  v.max_iterations = static_cast<int>(iters);
  v.jacobian_mode = parse_enum(s.string("jacobian", "analytic"), s.path("jacobian"), kJacobians);
  v.fd_step = s.number("fd_step", v.fd_step);
  v.initial_guess = parse_enum(s.string("initial_guess", "previous_omega"), s.path("initial_guess"), kGuesses);
  c.run.scheme.friction = parse_enum(s.string("friction_pairing", "endpoint"), s.path("friction_pairing"), kPairings);
  c.run.scheme.residual = parse_enum(s.string("residual", "closed_form"), s.path("residual"), kResiduals);
  c.run.rk2_variant = parse_enum(s.string("rk2_variant", "heun"), s.path("rk2_variant"), kRk2);
  s.finish();
  try {
    v.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(s.path(e.field()), e.why());
  }
}

}  // namespace

std::string method_name(Method m) { return enum_name(m, kMethods); }

Method parse_method(const std::string& name, const std::string& path) { return parse_enum(name, path, kMethods); }

RunConfig parse_config(const json& doc) {
  RunConfig c;
  Section root(doc, "");
  c.system = parse_enum(root.string("system", "heavy_top"), "system", kSystems);
  if (const json* v = root.find("heavy_top")) parse_heavy_top(*v, c);
  if (const json* v = root.find("double_bracket")) parse_double_bracket(*v, c);
  if (const json* v = root.find("initial")) {
    parse_initial(*v, c);
  } else {
    parse_initial(json::object(), c);
  }
  c.run.h = root.number("h", c.run.h);
  if (!(c.run.h > 0.0)) throw ConfigError("h", "must be > 0");
  const long long steps = root.integer("steps", static_cast<long long>(c.run.steps));
  if (steps < 1) throw ConfigError("steps", "must be >= 1");
  c.run.steps = static_cast<std::size_t>(steps);
  c.run.method = parse_method(root.string("method", "vi"));
  if (const json* v = root.find("solver")) parse_solver(*v, c);
  if (const json* v = root.find("output")) {
    Section s(*v, "output");
    if (const json* csv = s.find("csv")) {
      if (!csv->is_string()) throw ConfigError(s.path("csv"), "must be a string");
      c.output_csv = csv->get<std::string>();
    }
    s.finish();
  }
  root.finish();
  make_system(c);  // surfaces parameter errors with their field path
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  const HeavyTopParams& p = c.heavy_top;
  json heavy{{"radius", p.radius},
             {"viscosity", p.viscosity},
             {"density", p.density},
             {"upper_mass_fraction", p.upper_mass_fraction},
             {"gravity", p.gravity},
             {"molar_mass", p.molar_mass},
             {"gas_constant", p.gas_constant},
             {"reference_temperature", p.reference_temperature},
             {"reference_entropy", p.reference_entropy}};
  if (c.axis) heavy["axis"] = vec_json(*c.axis);
  json out{
      {"system", enum_name(c.system, kSystems)},
      {"heavy_top", heavy},
      {"double_bracket",
       {{"inertia", mat_json(c.db_inertia)},
        {"lambda", c.db_lambda},
        {"heat_capacity", c.db_thermal.heat_capacity},
        {"reference_temperature", c.db_thermal.reference_temperature},
        {"reference_entropy", c.db_thermal.reference_entropy}}},
      {"initial",
       {{"R0", mat_json(c.r0.matrix())},
        {"repair_R0", false},  // R0 is stored already repaired
        {"omega0", vec_json(c.initial.omega)},
        {"S0", c.initial.entropy},
        {"gamma0", vec_json(c.initial.gamma)}}},
      {"h", c.run.h},
      {"steps", c.run.steps},
      {"method", method_name(c.run.method)},
      {"solver",
       {{"newton_tol", c.run.solver.newton_tol},
        {"max_iterations", c.run.solver.max_iterations},
        {"jacobian", enum_name(c.run.solver.jacobian_mode, kJacobians)},
        {"fd_step", c.run.solver.fd_step},
        {"initial_guess", enum_name(c.run.solver.initial_guess, kGuesses)},
        {"friction_pairing", enum_name(c.run.scheme.friction, kPairings)},
        {"residual", enum_name(c.run.scheme.residual, kResiduals)},
        {"rk2_variant", enum_name(c.run.rk2_variant, kRk2)}}}};
  if (c.output_csv) out["output"] = {{"csv", *c.output_csv}};
  return out;
}

std::unique_ptr<ThermoSystem> make_system(const RunConfig& c) {
  if (c.system == SystemKind::heavy_top) {
    try {
      return std::make_unique<HeavyTopSystem>(c.axis ? derive_params(c.heavy_top, *c.axis)
                                                     : derive_params(c.heavy_top));
    } catch (const InvalidParameter& e) {
      throw ConfigError("heavy_top." + e.field(), e.why());
    } catch (const DegenerateLever& e) {
      throw ConfigError("heavy_top.upper_mass_fraction", e.what());
    } catch (const SingularInertia& e) {
      throw ConfigError("heavy_top.radius", e.what());
    }
  }
  DoubleBracketParams p;
  p.inertia = c.db_inertia;
  if (!(c.db_lambda >= 0.0)) throw ConfigError("double_bracket.lambda", "must be non-negative");
  p.lambda = constant_lambda(c.db_lambda);
  p.thermal = c.db_thermal;
  try {
    return std::make_unique<DoubleBracketSystem>(std::move(p));
  } catch (const InvalidParameter& e) {
    throw ConfigError("double_bracket." + e.field(), e.why());
  } catch (const SingularInertia& e) {
    throw ConfigError("double_bracket.inertia", e.what());
  }
}

}  // namespace thermolie::cli
