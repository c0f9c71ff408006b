#pragma once

#include <string>

#include "pfc/experiment.hpp"

namespace pfc::expcli {

/// Header "sweep_name,sweep_value,series,angle_deg,reps,seed" followed by one
/// row per (sweep value, series); reals use 17 significant digits.
std::string to_csv(const SeriesTable& table);
SeriesTable parse_csv(const std::string& text);

enum class FigureStyle { Quantiles, Comparison };

/// Single-panel SVG plot in degrees. Quantiles: o mean, triangle upper 5%,
/// + lower 5%. Comparison: o PFC mean, x PC mean, + eq11, triangle eq12.
std::string to_svg(const SeriesTable& table, FigureStyle style, const std::string& title);

enum class ExportFormat { Csv, Svg };

/// Writes the table; throws IoError when the file cannot be written.
void export_table(const SeriesTable& table, ExportFormat format, const std::string& path,
                  FigureStyle style = FigureStyle::Quantiles, const std::string& title = "");

std::string format_real(double x);

}  // namespace pfc::expcli
