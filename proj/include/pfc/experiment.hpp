#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfc/model.hpp"

// Figure reproduction: parameter sweeps over n, sigma or sigma_y with
// replicated estimation at every sweep value.
namespace pfc::expcli {

enum class SweepParam { N, Sigma, SigmaY };
enum class EstimatorKind { PFC, PC, Thm24Direct };
enum class SeriesKind { Mean, Median, Q05, Q95, Eq11, Eq12 };

std::string to_string(SweepParam p);
std::string to_string(EstimatorKind e);
std::string to_string(SeriesKind s);

struct ExperimentGrid {
  model::ModelSpec base_spec;
  SweepParam sweep = SweepParam::N;
  std::vector<double> values;
  int reps = 50000;           // direct draws from the F-law sampler
  int pipeline_reps = 2500;   // simulate -> estimate replications
  std::uint64_t seed = 0;
  std::vector<EstimatorKind> estimators;
  std::vector<SeriesKind> series;
  int threads = 1;

  /// Throws ConfigError on a malformed grid.
  void validate() const;
  bool has(EstimatorKind e) const;
  bool has(SeriesKind s) const;
};

/// Panel defaults with the fixed parameters of each panel:
/// a: n sweep, sigma = sigma_y = 1; b: sigma_y sweep, n = 40, sigma = 1;
/// c: sigma sweep, n = 40, sigma_y = 1; d (second figure only): n sweep,
/// sigma_y = sqrt 2, sigma = 1.
ExperimentGrid figure1_grid(char panel);
ExperimentGrid figure2_grid(char panel);

/// Overlays a JSON config (model keys plus sweep/reps/estimators/series) on
/// a panel default.
ExperimentGrid grid_from_json(const nlohmann::json& j, ExperimentGrid base);

struct SeriesRow {
  double sweep_value = 0.0;
  std::string series;
  double angle_deg = 0.0;
  int reps = 0;
};

struct SeriesTable {
  std::string sweep_name;
  std::vector<SeriesRow> rows;
  std::uint64_t seed = 0;

  std::vector<double> sweep_values() const;
  std::vector<std::string> series_names() const;
  std::optional<double> value(double sweep_value, const std::string& series) const;
};

/// Series are named "<estimator>_<stat>" ("thm24_mean", "pc_q95", ...) plus
/// "eq11" and "eq12".
SeriesTable run_figure1(const ExperimentGrid& grid, char panel);
SeriesTable run_figure2(const ExperimentGrid& grid, char panel);

/// Raw per-replication angles in degrees, for tests and the check suites.
std::vector<double> thm24_angles(const model::ModelSpec& spec, int reps, std::uint64_t seed, int threads);

struct PipelineAngles {
  std::vector<double> pfc_deg;
  std::vector<double> pc_deg;
};

PipelineAngles pipeline_angles(const model::ModelSpec& spec, int reps, std::uint64_t seed, int threads);

}  // namespace pfc::expcli
