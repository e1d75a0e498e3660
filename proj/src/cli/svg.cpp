#include "thermolie/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "thermolie/cli/config.hpp"

namespace thermolie::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr int kTicks = 5;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string coord(double v) { return fmt("%.2f", v); }

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : 0.5 * std::fabs(lo);
      lo -= pad;
      hi += pad;
    }
  }
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

}  // namespace

std::string render_svg(const std::vector<Series>& series, const PlotLabels& labels) {
  Range xr;
  Range yr;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        xr.add(s.x[i]);
        yr.add(s.y[i]);
      }
  xr.settle();
  yr.settle();

  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  const double y1 = kTop;

  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + coord(kWidth) + "\" height=\"" +
       coord(kHeight) + "\" viewBox=\"0 0 " + coord(kWidth) + " " + coord(kHeight) + "\">\n";
  o += "<rect x=\"0\" y=\"0\" width=\"" + coord(kWidth) + "\" height=\"" + coord(kHeight) + "\" fill=\"white\"/>\n";
  if (!labels.title.empty())
    o += "<text x=\"" + coord(0.5 * (x0 + x1)) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + escape(labels.title) + "</text>\n";

  // Axes and ticks.
  o += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  o += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(y0) + "\" x2=\"" + coord(x1) + "\" y2=\"" + coord(y0) + "\"/>\n";
  o += "<line x1=\"" + coord(x0) + "\" y1=\"" + coord(y0) + "\" x2=\"" + coord(x0) + "\" y2=\"" + coord(y1) + "\"/>\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = x0 + (x1 - x0) * i / kTicks;
    const double fy = y0 + (y1 - y0) * i / kTicks;
    o += "<line x1=\"" + coord(fx) + "\" y1=\"" + coord(y0) + "\" x2=\"" + coord(fx) + "\" y2=\"" + coord(y0 + 5) +
         "\"/>\n";
    o += "<line x1=\"" + coord(x0 - 5) + "\" y1=\"" + coord(fy) + "\" x2=\"" + coord(x0) + "\" y2=\"" + coord(fy) +
         "\"/>\n";
  }
  o += "</g>\n";
  o += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double vx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
    const double vy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    const double fx = x0 + (x1 - x0) * i / kTicks;
    const double fy = y0 + (y1 - y0) * i / kTicks;
    o += "<text x=\"" + coord(fx) + "\" y=\"" + coord(y0 + 18) + "\" text-anchor=\"middle\">" + fmt("%.6g", vx) +
         "</text>\n";
    o += "<text x=\"" + coord(x0 - 8) + "\" y=\"" + coord(fy + 4) + "\" text-anchor=\"end\">" + fmt("%.6g", vy) +
         "</text>\n";
  }
  o += "<text x=\"" + coord(0.5 * (x0 + x1)) + "\" y=\"" + coord(kHeight - 15) + "\" text-anchor=\"middle\">" +
       escape(labels.x_label) + "</text>\n";
  if (!labels.y_label.empty())
    o += "<text x=\"20\" y=\"" + coord(0.5 * (y0 + y1)) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         coord(0.5 * (y0 + y1)) + ")\">" + escape(labels.y_label) + "</text>\n";
  o += "</g>\n";

  // Series and legend.
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!pts.empty()) pts += ' ';
      pts += coord(xr.map(s.x[i], x0, x1)) + "," + coord(yr.map(s.y[i], y0, y1));
    }
    if (!pts.empty())
      o += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    const double ly = kTop + 10.0 + 18.0 * static_cast<double>(k);
    o += "<line x1=\"" + coord(x1 + 15) + "\" y1=\"" + coord(ly) + "\" x2=\"" + coord(x1 + 40) + "\" y2=\"" +
         coord(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + coord(x1 + 45) + "\" y=\"" + coord(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s.label) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

std::vector<Series> series_from_csv(const CsvTable& table, const std::vector<std::string>& fields) {
  std::size_t xc = 0;
  try {
    xc = table.column("t");
  } catch (const MissingColumn&) {
    xc = table.column("step");
  }
  std::vector<Series> out;
  for (const auto& f : fields) {
    const std::size_t yc = table.column(f);
    Series s;
    s.label = f;
    for (const auto& row : table.rows) {
      if (!row[xc] || !row[yc]) continue;
      s.x.push_back(*row[xc]);
      s.y.push_back(*row[yc]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace thermolie::cli
