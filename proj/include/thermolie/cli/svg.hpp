#pragma once

// Static SVG 1.1 line plots: axes, ticks, one polyline per series, legend.
// Output depends only on the input numbers.

#include <filesystem>
#include <string>
#include <vector>

#include "thermolie/cli/csv.hpp"

namespace thermolie::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // non-finite points are dropped
};

struct PlotLabels {
  std::string title;
  std::string x_label = "t [s]";
  std::string y_label;
};

std::string render_svg(const std::vector<Series>& series, const PlotLabels& labels);

/// One series per field against the "t" column (or "step" when t is absent).
/// Throws MissingColumn.
std::vector<Series> series_from_csv(const CsvTable& table, const std::vector<std::string>& fields);

/// Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace thermolie::cli
