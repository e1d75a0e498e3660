#include "thermolie/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "thermolie/cli/config.hpp"

namespace thermolie::cli {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "step",  "t",     "omega_x", "omega_y", "omega_z", "gamma_x", "gamma_y", "gamma_z",
      "S",     "T",     "e_kin",   "e_pot",   "e_int",   "e_total", "kn_I",    "pi_norm",
      "gamma_norm", "com_x", "com_y", "com_z", "newton_iters", "residual_norm"};
  return cols;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void put(std::string& line, double v) {
  line += ',';
  line += format_double(v);
}

void put(std::string& line, const std::optional<double>& v) {
  line += ',';
  if (v) line += format_double(*v);
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  const auto& cols = csv_columns();
  std::string line;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) line += ',';
    line += cols[i];
  }
  out << line << '\n';
  for (const auto& r : records) {
    line = std::to_string(r.step);
    put(line, r.t);
    for (const double v : {r.omega.x, r.omega.y, r.omega.z, r.gamma.x, r.gamma.y, r.gamma.z, r.entropy,
                           r.temperature, r.kinetic, r.potential, r.internal, r.total})
      put(line, v);
    put(line, r.kn_value);
    put(line, r.pi_norm);
    put(line, r.gamma_norm);
    if (r.com) {
      put(line, r.com->x);
      put(line, r.com->y);
      put(line, r.com->z);
    } else {
      line += ",,,";
    }
    line += ',';
    if (r.newton_iterations) line += std::to_string(*r.newton_iterations);
    put(line, r.residual_norm);
    out << line << '\n';
  }
}

void write_csv_file(const std::filesystem::path& path, const std::vector<TrajectoryRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(out, records);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw MissingColumn(name);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw MalformedCsv(1, "missing header");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  if (t.header.empty()) throw MalformedCsv(1, "empty header");
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw MalformedCsv(lineno, "expected " + std::to_string(t.header.size()) + " fields, got " +
                                     std::to_string(cells.size()));
    std::vector<std::optional<double>> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      if (c.empty()) {
        row.emplace_back();
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw MalformedCsv(lineno, "not a number: '" + c + "'");
      row.emplace_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_csv(in);
}

std::vector<TrajectoryRecord> records_from_csv(const CsvTable& table) {
  std::vector<std::size_t> idx;
  for (const auto& name : csv_columns()) idx.push_back(table.column(name));
  std::vector<TrajectoryRecord> out;
  std::size_t lineno = 1;
  for (const auto& row : table.rows) {
    ++lineno;
    const auto req = [&](std::size_t c) {
      const auto& v = row[idx[c]];
      if (!v) throw MalformedCsv(lineno, "column '" + csv_columns()[c] + "' is empty");
      return *v;
    };
    const auto opt = [&](std::size_t c) { return row[idx[c]]; };
    TrajectoryRecord r;
    r.step = static_cast<std::size_t>(req(0));
    r.t = req(1);
    r.omega = {req(2), req(3), req(4)};
    r.gamma = {req(5), req(6), req(7)};
    r.entropy = req(8);
    r.temperature = req(9);
    r.kinetic = req(10);
    r.potential = req(11);
    r.internal = req(12);
    r.total = req(13);
    r.kn_value = opt(14);
    r.pi_norm = req(15);
    r.gamma_norm = req(16);
    if (opt(17) && opt(18) && opt(19)) r.com = Vec3{*opt(17), *opt(18), *opt(19)};
    if (const auto it = opt(20)) r.newton_iterations = static_cast<int>(*it);
    r.residual_norm = opt(21);
    out.push_back(r);
  }
  return out;
}

}  // namespace thermolie::cli
