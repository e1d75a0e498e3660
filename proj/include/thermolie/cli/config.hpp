#pragma once

// Run configuration: a JSON document, unknown keys rejected, errors carry the
// dotted path of the offending field (e.g. "heavy_top.viscosity").

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "thermolie/diagnostics.hpp"

namespace thermolie::cli {

class ConfigError : public ValidationError {
 public:
  ConfigError(std::string path, const std::string& why)
      : ValidationError("config " + path + ": " + why), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

enum class SystemKind { heavy_top, double_bracket };

struct RunConfig {
  SystemKind system = SystemKind::heavy_top;
  HeavyTopParams heavy_top;
  std::optional<Vec3> axis;  // overrides the derived chi
  Mat3 db_inertia = Mat3::diagonal({1.0, 2.0, 3.0});
  double db_lambda = 0.1;
  ThermalModel db_thermal;

  Rotation r0;
  bool repair_r0 = false;
  ReducedState initial{{0.0, 1.0, 1.0}, {0.0, 0.0, 1.0}, 0.0};  // gamma = R0^T e3 unless overridden

  RunOptions run;  // h = 0.1, steps = 2000, method = vi by default
  std::optional<std::string> output_csv;
};

RunConfig parse_config(const nlohmann::json& doc);
/// Throws IoError if unreadable, ConfigError on malformed JSON or bad fields.
RunConfig load_config(const std::filesystem::path& path);

/// Serializes every field, so parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

/// Throws ConfigError naming the field when a parameter fails validation.
std::unique_ptr<ThermoSystem> make_system(const RunConfig& config);

std::string method_name(Method m);
Method parse_method(const std::string& name, const std::string& path = "method");

}  // namespace thermolie::cli
