#pragma once

// Trajectory CSV: fixed column order, shortest round-trip decimal for every
// double, empty cells for values a method or system does not define.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thermolie/diagnostics.hpp"

namespace thermolie::cli {

class MissingColumn : public ValidationError {
 public:
  explicit MissingColumn(const std::string& name) : ValidationError("missing CSV column '" + name + "'") {}
};

class MalformedCsv : public ValidationError {
 public:
  MalformedCsv(std::size_t line, const std::string& why)
      : ValidationError("malformed CSV at line " + std::to_string(line) + ": " + why) {}
};

const std::vector<std::string>& csv_columns();

/// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

void write_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records);
/// Throws IoError.
void write_csv_file(const std::filesystem::path& path, const std::vector<TrajectoryRecord>& records);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;  // empty cell -> nullopt

  /// Throws MissingColumn.
  std::size_t column(const std::string& name) const;
};

/// Numeric CSV with a header line. Throws MalformedCsv.
CsvTable parse_csv(std::istream& in);
/// Throws IoError or MalformedCsv.
CsvTable read_csv(const std::filesystem::path& path);

/// Inverse of write_csv for tables carrying the full schema. Throws MissingColumn / MalformedCsv.
std::vector<TrajectoryRecord> records_from_csv(const CsvTable& table);

}  // namespace thermolie::cli
