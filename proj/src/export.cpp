#include "pfc/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "pfc/error.hpp"

namespace pfc::expcli {

namespace {

constexpr const char* kHeader = "sweep_name,sweep_value,series,angle_deg,reps,seed";

double parse_real(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  // strtod, unlike stod, accepts subnormals
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw Error(ErrorCode::ConfigError, "bad real in CSV: \"" + s + "\"");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Plot geometry
constexpr double kW = 480, kH = 360, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

enum class Marker { Circle, Cross, Plus, Triangle };

std::string marker_svg(Marker m, double x, double y) {
  const double s = 4.0;
  switch (m) {
    case Marker::Circle:
      return "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"" + fmt(s) + "\" fill=\"none\" stroke=\"black\"/>";
    case Marker::Cross:
      return "<path d=\"M" + fmt(x - s) + "," + fmt(y - s) + "L" + fmt(x + s) + "," + fmt(y + s) + "M" + fmt(x - s) +
             "," + fmt(y + s) + "L" + fmt(x + s) + "," + fmt(y - s) + "\" stroke=\"black\"/>";
    case Marker::Plus:
      return "<path d=\"M" + fmt(x - s) + "," + fmt(y) + "L" + fmt(x + s) + "," + fmt(y) + "M" + fmt(x) + "," +
             fmt(y - s) + "L" + fmt(x) + "," + fmt(y + s) + "\" stroke=\"black\"/>";
    case Marker::Triangle:
      return "<path d=\"M" + fmt(x) + "," + fmt(y - s) + "L" + fmt(x + s) + "," + fmt(y + s) + "L" + fmt(x - s) + "," +
             fmt(y + s) + "Z\" fill=\"none\" stroke=\"black\"/>";
  }
  return "";
}

Marker marker_for(const std::string& series, FigureStyle style) {
  auto ends_with = [&](const char* suffix) {
    const std::string s(suffix);
    return series.size() >= s.size() && series.compare(series.size() - s.size(), s.size(), s) == 0;
  };
  if (series == "eq11" || ends_with("_q05")) return Marker::Plus;
  if (series == "eq12" || ends_with("_q95")) return Marker::Triangle;
  if (style == FigureStyle::Comparison && series.rfind("pc_", 0) == 0) return Marker::Cross;
  return Marker::Circle;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

}  // namespace

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const SeriesTable& table) {
  std::string out = kHeader;
  out += '\n';
  for (const auto& row : table.rows) {
    out += table.sweep_name + ',' + format_real(row.sweep_value) + ',' + row.series + ',' + format_real(row.angle_deg) +
           ',' + std::to_string(row.reps) + ',' + std::to_string(table.seed) + '\n';
  }
  return out;
}

SeriesTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw Error(ErrorCode::ConfigError, "CSV header mismatch");
  SeriesTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 6) throw Error(ErrorCode::ConfigError, "CSV row needs 6 fields: " + line);
    table.sweep_name = cells[0];
    SeriesRow row;
    row.sweep_value = parse_real(cells[1]);
    row.series = cells[2];
    row.angle_deg = parse_real(cells[3]);
    try {
      row.reps = std::stoi(cells[4]);
      table.seed = std::stoull(cells[5]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "bad integer in CSV row: " + line);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string to_svg(const SeriesTable& table, FigureStyle style, const std::string& title) {
  const auto xs = table.sweep_values();
  const auto names = table.series_names();
  double x_lo = xs.empty() ? 0.0 : xs.front(), x_hi = xs.empty() ? 1.0 : xs.back();
  if (x_hi <= x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  double y_hi = 0.0;
  for (const auto& row : table.rows)
    if (std::isfinite(row.angle_deg)) y_hi = std::max(y_hi, row.angle_deg);
  y_hi = std::min(90.0, std::max(5.0, std::ceil(y_hi / 5.0) * 5.0));

  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  const double pad = 0.05 * (x_hi - x_lo);
  auto px = [&](double x) { return kLeft + (x - x_lo + pad) / (x_hi - x_lo + 2 * pad) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - std::clamp(y, 0.0, y_hi) / y_hi) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
      << kW << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(kW / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(title)
      << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double x : xs) {
    svg << "<g class=\"xtick\"><line x1=\"" << fmt(px(x)) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\""
        << fmt(px(x)) << "\" y2=\"" << fmt(kTop + plot_h + 5) << "\" stroke=\"black\"/><text x=\"" << fmt(px(x))
        << "\" y=\"" << fmt(kTop + plot_h + 18) << "\" text-anchor=\"middle\">" << format_real(x) << "</text></g>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double y = y_hi * k / 5.0;
    svg << "<g class=\"ytick\"><line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << kLeft
        << "\" y2=\"" << fmt(py(y)) << "\" stroke=\"black\"/><text x=\"" << fmt(kLeft - 8) << "\" y=\""
        << fmt(py(y) + 4) << "\" text-anchor=\"end\">" << fmt(y) << "</text></g>\n";
  }
  svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kH - 8) << "\" text-anchor=\"middle\">"
      << xml_escape(table.sweep_name) << "</text>\n";
  svg << "<text transform=\"translate(16," << fmt(kTop + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">angle (degrees)</text>\n";

  for (const auto& name : names) {
    const Marker m = marker_for(name, style);
    svg << "<g class=\"series\" data-series=\"" << xml_escape(name) << "\">";
    for (const auto& row : table.rows) {
      if (row.series == name && std::isfinite(row.angle_deg)) svg << marker_svg(m, px(row.sweep_value), py(row.angle_deg));
    }
    svg << "</g>\n";
  }

  svg << "<g class=\"legend\">";
  double ly = kTop + 12;
  for (const auto& name : names) {
    svg << marker_svg(marker_for(name, style), kW - kRight - 90, ly) << "<text x=\"" << fmt(kW - kRight - 80)
        << "\" y=\"" << fmt(ly + 4) << "\">" << xml_escape(name) << "</text>";
    ly += 14;
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void export_table(const SeriesTable& table, ExportFormat format, const std::string& path, FigureStyle style,
                  const std::string& title) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << (format == ExportFormat::Csv ? to_csv(table) : to_svg(table, style, title));
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to " + path + " failed");
}

}  // namespace pfc::expcli
