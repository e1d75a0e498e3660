#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "thermolie/cli/commands.hpp"
#include "thermolie/cli/csv.hpp"
#include "thermolie/cli/svg.hpp"

using namespace thermolie;
using namespace thermolie::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = THERMOLIE_SOURCE_DIR;

fs::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const fs::path p = fs::temp_directory_path() /
                     ("thermolie_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string error_path(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

int tool(std::vector<std::string> args) {
  args.insert(args.begin(), "thermolie");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string csv_text(const std::vector<TrajectoryRecord>& recs) {
  std::ostringstream out;
  write_csv(out, recs);
  return out.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("empty config gives the default run") {
  const RunConfig c = parse_config(json::object());
  CHECK(c.system == SystemKind::heavy_top);
  CHECK(c.run.h == 0.1);
  CHECK(c.run.steps == 2000);
  CHECK(c.run.method == Method::vi);
  CHECK(c.initial.omega == Vec3{0, 1, 1});
  CHECK(c.initial.gamma == Vec3{0, 0, 1});
  CHECK(c.r0.matrix() == Mat3::identity());
  CHECK(c.run.scheme.friction == FrictionPairing::endpoint);
  CHECK(c.run.solver.newton_tol == 1e-12);
  CHECK_FALSE(c.output_csv.has_value());
}

TEST_CASE("config errors carry the dotted field path") {
  CHECK(error_path({{"heavy_top", {{"viscosity", -1.0}}}}) == "heavy_top.viscosity");
  CHECK(error_path({{"heavy_top", {{"viscosty", 0.1}}}}) == "heavy_top.viscosty");
  CHECK(error_path({{"bogus", 1}}) == "bogus");
  CHECK(error_path({{"h", 0.0}}) == "h");
  CHECK(error_path({{"steps", 0}}) == "steps");
  CHECK(error_path({{"steps", 1.5}}) == "steps");
  CHECK(error_path({{"method", "euler"}}) == "method");
  CHECK(error_path({{"solver", {{"jacobian", "exact"}}}}) == "solver.jacobian");
  CHECK(error_path({{"solver", {{"newton_tol", -1.0}}}}) == "solver.newton_tol");
  CHECK(error_path({{"initial", {{"omega0", {1, 2}}}}}) == "initial.omega0");
  CHECK(error_path({{"initial", {{"gamma0", {0, 0, 2}}}}}) == "initial.gamma0");
  CHECK(error_path({{"heavy_top", "big"}}) == "heavy_top");

  try {
    parse_config({{"heavy_top", {{"viscosity", -1.0}}}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "heavy_top.viscosity");
    CHECK(std::string(e.what()).find("viscosity: viscosity") == std::string::npos);
  }
}

TEST_CASE("initial attitude: singular matrices rejected, repair on request") {
  const json singular = {{"initial", {{"R0", {{1, 0, 0}, {0, 0, -1}, {0, 0, 1}}}}}};
  CHECK(error_path(singular) == "initial.R0");

  const double c = std::cos(0.3);
  const double s = std::sin(0.3);
  const json drifted = {{"initial", {{"R0", {{1, 0, 0}, {0, c, -s + 1e-7}, {0, s, c}}}}}};
  CHECK(error_path(drifted) == "initial.R0");
  json repaired = drifted;
  repaired["initial"]["repair_R0"] = true;
  const RunConfig cfg = parse_config(repaired);
  CHECK(cfg.r0.orthogonality_defect() <= 1e-15);
  // Gamma defaults to R0^T e3.
  CHECK(testing::max_abs_diff(cfg.initial.gamma, cfg.r0.inverse() * Vec3{0, 0, 1}) <= 1e-15);
}

TEST_CASE("config round-trips through JSON") {
  const json doc = {{"system", "heavy_top"},
                    {"heavy_top", {{"viscosity", 0.2}, {"gravity", 3.0}}},
                    {"initial", {{"omega0", {0.1, 0.2, 0.3}}, {"S0", 1.5}}},
                    {"h", 0.05},
                    {"steps", 17},
                    {"method", "rk4"},
                    {"solver", {{"friction_pairing", "averaged"}, {"max_iterations", 9}}},
                    {"output", {{"csv", "x.csv"}}}};
  const RunConfig a = parse_config(doc);
  const RunConfig b = parse_config(to_json(a));
  CHECK(to_json(a) == to_json(b));
  CHECK(b.heavy_top.viscosity == 0.2);
  CHECK(b.initial.entropy == 1.5);
  CHECK(b.run.steps == 17);
  CHECK(b.run.method == Method::rk4);
  CHECK(b.run.scheme.friction == FrictionPairing::averaged);
  CHECK(b.run.solver.max_iterations == 9);
  CHECK(b.output_csv == "x.csv");
}

TEST_CASE("load_config reports unreadable files and malformed JSON") {
  const fs::path dir = scratch_dir("cfg");
  CHECK_THROWS_AS(load_config(dir / "missing.json"), IoError);
  write(dir / "broken.json", "{\"h\": ");
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  const RunConfig c = load_config(kSource / "tests/golden/reference.json");
  CHECK(c.run.steps == 10);
  fs::remove_all(dir);
}

TEST_CASE("double-bracket configs build the right system") {
  const RunConfig c = parse_config({{"system", "double_bracket"}, {"double_bracket", {{"inertia", {1, 2, 3}}}}});
  const auto sys = make_system(c);
  CHECK_FALSE(sys->has_advected_parameter());
  CHECK(sys->inertia() == Mat3::diagonal({1, 2, 3}));
  const RunConfig shipped = load_config(kSource / "configs/double_bracket.json");
  CHECK(shipped.system == SystemKind::double_bracket);
  CHECK(shipped.run.scheme.residual == ResidualPath::generic);
}

TEST_CASE("CSV header and round trip") {
  const std::vector<std::string> want = {"step", "t", "omega_x", "omega_y", "omega_z", "gamma_x", "gamma_y",
                                         "gamma_z", "S", "T", "e_kin", "e_pot", "e_int", "e_total", "kn_I",
                                         "pi_norm", "gamma_norm", "com_x", "com_y", "com_z", "newton_iters",
                                         "residual_norm"};
  CHECK(csv_columns() == want);

  const Trajectory t = simulate(parse_config({{"steps", 25}}));
  const std::string text = csv_text(t.records);
  CHECK(text.rfind("step,t,omega_x,", 0) == 0);
  std::istringstream in(text);
  const CsvTable table = parse_csv(in);
  CHECK(table.rows.size() == 26);
  const auto back = records_from_csv(table);
  REQUIRE(back.size() == t.records.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].omega == t.records[k].omega);
    CHECK(back[k].entropy == t.records[k].entropy);
    CHECK(back[k].total == t.records[k].total);
    CHECK(back[k].kn_value == t.records[k].kn_value);
    CHECK(back[k].newton_iterations == t.records[k].newton_iterations);
  }
  CHECK(csv_text(back) == text);

  // rk2 rows leave the solver columns empty.
  const std::string rk2 = csv_text(simulate(parse_config({{"steps", 2}}), Method::rk2).records);
  std::istringstream rin(rk2);
  const CsvTable rt = parse_csv(rin);
  CHECK_FALSE(rt.rows[1][rt.column("newton_iters")].has_value());
  CHECK(rt.rows[1][rt.column("kn_I")].has_value());
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  testing::Rng rng(61);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-30, 30));
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("CSV parse errors") {
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_csv(empty), MalformedCsv);
  std::istringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(parse_csv(ragged), MalformedCsv);
  std::istringstream words("a,b\n1,x\n");
  CHECK_THROWS_AS(parse_csv(words), MalformedCsv);
  std::istringstream ok("a,b\n1,\n");
  const CsvTable t = parse_csv(ok);
  CHECK(t.rows[0][0] == 1.0);
  CHECK_FALSE(t.rows[0][1].has_value());
  CHECK_THROWS_AS(t.column("c"), MissingColumn);
  CHECK_THROWS_AS(records_from_csv(t), MissingColumn);
}

TEST_CASE("SVG rendering") {
  const std::string none = render_svg({}, {"empty", "t [s]", "y"});
  CHECK(none.find("<svg") != std::string::npos);
  CHECK(none.find("<polyline") == std::string::npos);

  const std::string two = render_svg({{"a", {0.0, 1.0}, {0.0, 1.0}}}, {"line", "t [s]", "y"});
  const auto at = two.find("points=\"");
  REQUIRE(at != std::string::npos);
  const std::string pts = two.substr(at + 8, two.find('"', at + 8) - at - 8);
  std::istringstream ss(pts);
  std::string tok;
  int count = 0;
  while (ss >> tok) ++count;
  CHECK(count == 2);
  CHECK(two == render_svg({{"a", {0.0, 1.0}, {0.0, 1.0}}}, {"line", "t [s]", "y"}));

  // Non-finite samples are dropped.
  const std::string gaps = render_svg({{"a", {0, 1, 2}, {0, std::nan(""), 2}}}, {"", "t", "y"});
  CHECK(gaps.find("nan") == std::string::npos);
}

TEST_CASE("series from CSV") {
  std::istringstream in("step,t,S\n0,0,1\n1,0.5,2\n");
  const CsvTable t = parse_csv(in);
  const auto s = series_from_csv(t, {"S"});
  REQUIRE(s.size() == 1);
  CHECK(s[0].x == std::vector<double>{0, 0.5});
  CHECK(s[0].y == std::vector<double>{1, 2});
  CHECK_THROWS_AS(series_from_csv(t, {"T"}), MissingColumn);
}

TEST_CASE("list parsing") {
  CHECK(parse_number_list("0.02,0.01, 0.005", "h") == std::vector<double>{0.02, 0.01, 0.005});
  CHECK_THROWS_AS(parse_number_list("0.02,,0.01", "h"), ValidationError);
  CHECK_THROWS_AS(parse_number_list("abc", "h"), ValidationError);
  CHECK(parse_name_list("e_total,S", "f") == std::vector<std::string>{"e_total", "S"});
}

TEST_CASE("golden 10-step run") {
  const RunConfig c = load_config(kSource / "tests/golden/reference.json");
  const std::string got = csv_text(simulate(c).records);
  const std::string want = slurp(kSource / "tests/golden/reference_10_steps.csv");
  REQUIRE_FALSE(want.empty());
  if (got != want) {
    // Cross-platform fallback: every field within one ulp.
    std::istringstream a(got);
    std::istringstream b(want);
    const CsvTable ta = parse_csv(a);
    const CsvTable tb = parse_csv(b);
    REQUIRE(ta.header == tb.header);
    REQUIRE(ta.rows.size() == tb.rows.size());
    for (std::size_t i = 0; i < ta.rows.size(); ++i)
      for (std::size_t j = 0; j < ta.header.size(); ++j) {
        const auto& x = ta.rows[i][j];
        const auto& y = tb.rows[i][j];
        REQUIRE(x.has_value() == y.has_value());
        if (x) CHECK((*x == *y || std::nextafter(*x, *y) == *y));
      }
  }
}

TEST_CASE("simulate writes a CSV and honours --method") {
  const fs::path dir = scratch_dir("sim");
  const fs::path cfg = dir / "cfg.json";
  write(cfg, R"({"steps": 5})");
  CHECK(tool({"simulate", "--config", cfg.string(), "--out", (dir / "vi.csv").string()}) == kExitOk);
  CHECK(tool({"simulate", "--config", cfg.string(), "--out", (dir / "rk4.csv").string(), "--method", "rk4"}) ==
        kExitOk);
  const CsvTable vi = read_csv(dir / "vi.csv");
  const CsvTable rk4 = read_csv(dir / "rk4.csv");
  CHECK(vi.rows.size() == 6);
  CHECK(vi.rows[1][vi.column("newton_iters")].has_value());
  CHECK_FALSE(rk4.rows[1][rk4.column("newton_iters")].has_value());
  CHECK(tool({"simulate", "--config", cfg.string()}) == kExitValidation);  // no output path anywhere
  CHECK(tool({"simulate", "--config", cfg.string(), "--out", (dir / "x.csv").string(), "--method", "euler"}) ==
        kExitValidation);
  CHECK(tool({"simulate", "--config", (dir / "none.json").string(), "--out", (dir / "x.csv").string()}) == kExitIo);
  fs::remove_all(dir);
}

TEST_CASE("compare is deterministic and reports the RK2 failure") {
  const fs::path a = scratch_dir("cmp_a");
  const fs::path b = scratch_dir("cmp_b");
  const RunConfig c = parse_config(json::object());
  const CompareResult ra = compare(c, a);
  const CompareResult rb = compare(c, b);
  for (const char* f : {"vi.csv", "rk2.csv", "summary.json", "energy.svg", "entropy.svg", "com_z.svg"}) {
    INFO(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK_FALSE(ra.vi.failed_step.has_value());
  CHECK(ra.rk2.failed_step.has_value());
  CHECK_FALSE(ra.all_completed());
  const json s = json::parse(slurp(a / "summary.json"));
  CHECK(s["vi"]["steps_completed"] == 2000);
  CHECK(s["rk2"]["failed_step"].is_number());
  CHECK_FALSE(s.dump().find("wall") != std::string::npos);

  const fs::path cfg = a / "cfg.json";
  write(cfg, "{}");
  CHECK(tool({"compare", "--config", cfg.string(), "--out-dir", (a / "out").string()}) == kExitSolver);
  CHECK(fs::exists(a / "out" / "summary.json"));
  write(cfg, R"({"h": 0.05, "steps": 200})");
  CHECK(tool({"compare", "--config", cfg.string(), "--out-dir", (a / "ok").string()}) == kExitOk);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("check command exit codes") {
  const fs::path dir = scratch_dir("chk");
  const fs::path cfg = dir / "cfg.json";
  write(cfg, R"({"steps": 300})");
  CHECK(tool({"check", "--config", cfg.string(), "--report", (dir / "r.json").string()}) == kExitOk);
  const json rep = json::parse(slurp(dir / "r.json"));
  CHECK(rep.is_object());

  write(cfg, R"({"steps": 300, "solver": {"newton_tol": 1e-2}})");
  CHECK(tool({"check", "--config", cfg.string()}) == kExitCheckFailed);
  const CheckReport loose = run_checks(load_config(cfg));
  bool kn_failed = false;
  for (const auto& r : loose.results)
    if (r.name.find("kelvin") != std::string::npos && !r.passed) kn_failed = true;
  CHECK(kn_failed);

  write(cfg, R"({"heavy_top": {"viscosity": -0.1}})");
  CHECK(tool({"check", "--config", cfg.string()}) == kExitValidation);
  fs::remove_all(dir);
}

TEST_CASE("convergence and plot commands") {
  const fs::path dir = scratch_dir("conv");
  const fs::path cfg = dir / "cfg.json";
  write(cfg, "{}");
  CHECK(tool({"convergence", "--config", cfg.string(), "--h-list", "0.02,0.01,0.005", "--t-final", "0.5", "--report",
             (dir / "c.json").string()}) == kExitOk);
  const json rep = json::parse(slurp(dir / "c.json"));
  CHECK(rep.size() == 4);
  CHECK(tool({"convergence", "--config", cfg.string(), "--h-list", "0.02,0.01,0.005", "--h-ref", "0.001"}) ==
        kExitValidation);

  write(cfg, R"({"steps": 5})");
  CHECK(tool({"simulate", "--config", cfg.string(), "--out", (dir / "t.csv").string()}) == kExitOk);
  CHECK(tool({"plot", "--in", (dir / "t.csv").string(), "--fields", "e_total,S", "--out", (dir / "p.svg").string()}) ==
        kExitOk);
  CHECK(slurp(dir / "p.svg").find("<polyline") != std::string::npos);
  CHECK(tool({"plot", "--in", (dir / "t.csv").string(), "--fields", "nope", "--out", (dir / "q.svg").string()}) ==
        kExitValidation);
  CHECK(tool({"plot", "--in", (dir / "none.csv").string(), "--fields", "S", "--out", (dir / "q.svg").string()}) ==
        kExitIo);
  CHECK(tool({"bogus"}) == kExitValidation);
  fs::remove_all(dir);
}

TEST_CASE("the installed executable runs") {
  const std::string cmd = std::string("\"") + THERMOLIE_TOOL + "\" --help > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
}

}  // TEST_SUITE
