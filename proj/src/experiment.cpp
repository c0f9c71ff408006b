#include "pfc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pfc/bounds.hpp"
#include "pfc/estimators.hpp"
#include "pfc/metrics.hpp"
#include "pfc/parallel.hpp"
#include "pfc/randsrc.hpp"
#include "pfc/stats.hpp"

namespace pfc::expcli {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

constexpr std::uint64_t kThm24Tag = 0x100;
constexpr std::uint64_t kPipelineTag = 0x200;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

std::string estimator_prefix(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::PFC: return "pfc";
    case EstimatorKind::PC: return "pc";
    case EstimatorKind::Thm24Direct: return "thm24";
  }
  return "?";
}

model::ModelSpec at_sweep_value(const model::ModelSpec& base, SweepParam sweep, double value) {
  model::ModelSpec spec = base;
  switch (sweep) {
    case SweepParam::N: spec.n = static_cast<int>(std::lround(value)); break;
    case SweepParam::Sigma: spec.sigma = value; break;
    case SweepParam::SigmaY: spec.sigma_y = value; break;
  }
  spec.validate();
  return spec;
}

SweepParam panel_sweep(char panel) {
  switch (panel) {
    case 'a':
    case 'd': return SweepParam::N;
    case 'b': return SweepParam::SigmaY;
    case 'c': return SweepParam::Sigma;
    default: config_error(std::string("unknown panel '") + panel + "'");
  }
}

ExperimentGrid panel_grid(char panel) {
  ExperimentGrid grid;
  grid.sweep = panel_sweep(panel);
  switch (panel) {
    case 'a':
      grid.base_spec = model::example25(40, 1.0, 1.0);
      grid.values = {250, 500, 750, 1000};
      break;
    case 'b':
      grid.base_spec = model::example25(40, 1.0, 1.0);
      grid.values = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
      break;
    case 'c':
      grid.base_spec = model::example25(40, 1.0, 1.0);
      grid.values = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
      break;
    case 'd':
      grid.base_spec = model::example25(40, 1.0, std::numbers::sqrt2);
      grid.values = {250, 500, 750, 1000};
      break;
    default: config_error(std::string("unknown panel '") + panel + "'");
  }
  return grid;
}

void check_panel(const ExperimentGrid& grid, char panel, bool allow_d) {
  if (panel == 'd' && !allow_d) config_error("the first figure has panels a, b and c");
  if (grid.sweep != panel_sweep(panel)) {
    config_error("panel " + std::string(1, panel) + " sweeps " + to_string(panel_sweep(panel)) + ", config sweeps " +
                 to_string(grid.sweep));
  }
}

void push_stats(SeriesTable& table, const ExperimentGrid& grid, double value, const std::string& prefix,
                const std::vector<double>& angles) {
  const int reps = static_cast<int>(angles.size());
  for (SeriesKind s : grid.series) {
    double v = 0.0;
    switch (s) {
      case SeriesKind::Mean: v = stats::mean(angles); break;
      case SeriesKind::Median: v = stats::quantile(angles, 0.5); break;
      case SeriesKind::Q05: v = stats::quantile(angles, 0.05); break;
      case SeriesKind::Q95: v = stats::quantile(angles, 0.95); break;
      default: continue;
    }
    table.rows.push_back({value, prefix + "_" + to_string(s), v, reps});
  }
}

SeriesTable run_panel(const ExperimentGrid& grid) {
  grid.validate();
  SeriesTable table;
  table.sweep_name = to_string(grid.sweep);
  table.seed = grid.seed;
  const bool want_pipeline = grid.has(EstimatorKind::PFC) || grid.has(EstimatorKind::PC);

  for (std::size_t k = 0; k < grid.values.size(); ++k) {
    const double value = grid.values[k];
    const model::ModelSpec spec = at_sweep_value(grid.base_spec, grid.sweep, value);
    std::vector<double> direct;
    PipelineAngles pipe;
    if (grid.has(EstimatorKind::Thm24Direct)) {
      direct = thm24_angles(spec, grid.reps, randsrc::derive_seed(grid.seed, kThm24Tag + k), grid.threads);
    }
    if (want_pipeline) {
      pipe = pipeline_angles(spec, grid.pipeline_reps, randsrc::derive_seed(grid.seed, kPipelineTag + k),
                             grid.threads);
    }
    for (EstimatorKind e : grid.estimators) {
      const auto& angles = e == EstimatorKind::Thm24Direct ? direct : e == EstimatorKind::PFC ? pipe.pfc_deg : pipe.pc_deg;
      push_stats(table, grid, value, estimator_prefix(e), angles);
    }

    const auto& source = grid.has(EstimatorKind::Thm24Direct) ? direct : pipe.pfc_deg;
    const int source_reps = static_cast<int>(source.size());
    if (grid.has(SeriesKind::Eq11) && spec.sigma_y * spec.sigma_y > spec.sigma * spec.sigma) {
      std::vector<double> eq(source.size());
      for (std::size_t i = 0; i < source.size(); ++i) {
        eq[i] = *bounds::eq11_bound(source[i] / kDeg, spec.sigma, spec.sigma_y, spec.n, spec.p) * kDeg;
      }
      table.rows.push_back({value, "eq11", stats::mean(eq), source_reps});
    }
    if (grid.has(SeriesKind::Eq12)) {
      std::vector<double> eq(source.size());
      for (std::size_t i = 0; i < source.size(); ++i) {
        eq[i] = bounds::eq12_approx(source[i] / kDeg, spec.sigma, spec.sigma_y, spec.n, spec.p) * kDeg;
      }
      table.rows.push_back({value, "eq12", stats::mean(eq), source_reps});
    }
  }
  return table;
}

template <typename Enum>
Enum parse_enum(const std::string& text, std::initializer_list<Enum> all, const char* what) {
  for (Enum e : all)
    if (to_string(e) == text) return e;
  config_error(std::string("unknown ") + what + " \"" + text + "\"");
}

}  // namespace

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::N: return "n";
    case SweepParam::Sigma: return "sigma";
    case SweepParam::SigmaY: return "sigma_y";
  }
  return "?";
}

std::string to_string(EstimatorKind e) {
  return e == EstimatorKind::Thm24Direct ? "thm24_direct" : estimator_prefix(e);
}

std::string to_string(SeriesKind s) {
  switch (s) {
    case SeriesKind::Mean: return "mean";
    case SeriesKind::Median: return "median";
    case SeriesKind::Q05: return "q05";
    case SeriesKind::Q95: return "q95";
    case SeriesKind::Eq11: return "eq11";
    case SeriesKind::Eq12: return "eq12";
  }
  return "?";
}

void ExperimentGrid::validate() const {
  try {
    base_spec.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (values.empty()) config_error("sweep needs at least one value");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) config_error("sweep values must be positive");
    if (i > 0 && !(values[i] > values[i - 1])) config_error("sweep values must be strictly increasing");
  }
  if (sweep == SweepParam::N) {
    for (double v : values)
      if (v != std::round(v) || v <= base_spec.r) config_error("n sweep values must be integers above r");
  }
  if (reps < 1 || pipeline_reps < 1) config_error("reps must be >= 1");
  if (estimators.empty()) config_error("no estimators selected");
  if (series.empty()) config_error("no series selected");
  if ((has(SeriesKind::Eq11) || has(SeriesKind::Eq12)) && !has(EstimatorKind::Thm24Direct) &&
      !has(EstimatorKind::PFC)) {
    config_error("eq11/eq12 need PFC angles from thm24_direct or pfc");
  }
  if (has(EstimatorKind::Thm24Direct)) {
    if (base_spec.d != 1 || base_spec.r != 1 || base_spec.fy_kind != model::FyKind::Polynomial ||
        base_spec.error_kind.law != model::ErrorLaw::Gaussian) {
      config_error("thm24_direct covers d = r = 1 polynomial features with Gaussian errors");
    }
    if (sweep != SweepParam::Sigma && !(base_spec.sigma > 0.0)) config_error("thm24_direct needs sigma > 0");
  }
  if (threads < 1) config_error("threads must be >= 1");
}

bool ExperimentGrid::has(EstimatorKind e) const { return std::find(estimators.begin(), estimators.end(), e) != estimators.end(); }
bool ExperimentGrid::has(SeriesKind s) const { return std::find(series.begin(), series.end(), s) != series.end(); }

ExperimentGrid figure1_grid(char panel) {
  if (panel == 'd') config_error("the first figure has panels a, b and c");
  ExperimentGrid grid = panel_grid(panel);
  grid.estimators = {EstimatorKind::Thm24Direct};
  grid.series = {SeriesKind::Mean, SeriesKind::Q05, SeriesKind::Q95};
  return grid;
}

ExperimentGrid figure2_grid(char panel) {
  ExperimentGrid grid = panel_grid(panel);
  grid.estimators = {EstimatorKind::Thm24Direct, EstimatorKind::PC};
  grid.series = {SeriesKind::Mean, SeriesKind::Eq11, SeriesKind::Eq12};
  return grid;
}

ExperimentGrid grid_from_json(const nlohmann::json& j, ExperimentGrid base) {
  try {
    nlohmann::json merged = model::spec_to_json(base.base_spec);
    for (const char* key : {"p", "d", "r"}) {
      if (j.contains(key) && j.at(key) != merged.at(key)) {
        // shapes change: the panel's matrices no longer apply
        merged.erase("gamma");
        merged.erase("beta");
        merged.erase("mu");
        break;
      }
    }
    for (const char* key : {"p", "d", "r", "n", "sigma", "sigma_y", "beta", "gamma", "mu", "fy_kind", "error_kind"}) {
      if (j.contains(key)) merged[key] = j.at(key);
    }
    base.base_spec = model::spec_from_json(merged);
    if (j.contains("sweep")) {
      const auto& sw = j.at("sweep");
      base.sweep = parse_enum(sw.at("param").get<std::string>(),
                              {SweepParam::N, SweepParam::Sigma, SweepParam::SigmaY}, "sweep param");
      base.values = sw.at("values").get<std::vector<double>>();
    }
    if (j.contains("reps")) base.reps = j.at("reps").get<int>();
    if (j.contains("pipeline_reps")) base.pipeline_reps = j.at("pipeline_reps").get<int>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("estimators")) {
      base.estimators.clear();
      for (const auto& e : j.at("estimators")) {
        base.estimators.push_back(parse_enum(e.get<std::string>(),
                                             {EstimatorKind::PFC, EstimatorKind::PC, EstimatorKind::Thm24Direct},
                                             "estimator"));
      }
    }
    if (j.contains("series")) {
      base.series.clear();
      for (const auto& s : j.at("series")) {
        base.series.push_back(parse_enum(s.get<std::string>(),
                                         {SeriesKind::Mean, SeriesKind::Median, SeriesKind::Q05, SeriesKind::Q95,
                                          SeriesKind::Eq11, SeriesKind::Eq12},
                                         "series"));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    config_error(e.what());
  }
  return base;
}

std::vector<double> SeriesTable::sweep_values() const {
  std::vector<double> out;
  for (const auto& row : rows)
    if (std::find(out.begin(), out.end(), row.sweep_value) == out.end()) out.push_back(row.sweep_value);
  return out;
}

std::vector<std::string> SeriesTable::series_names() const {
  std::vector<std::string> out;
  for (const auto& row : rows)
    if (std::find(out.begin(), out.end(), row.series) == out.end()) out.push_back(row.series);
  return out;
}

std::optional<double> SeriesTable::value(double sweep_value, const std::string& series) const {
  for (const auto& row : rows)
    if (row.sweep_value == sweep_value && row.series == series) return row.angle_deg;
  return std::nullopt;
}

std::vector<double> thm24_angles(const model::ModelSpec& spec, int reps, std::uint64_t seed, int threads) {
  std::vector<double> out(static_cast<std::size_t>(reps));
  if (!(spec.sigma > 0.0)) return out;  // noiseless: the estimate is exact
  // lambda = beta^2 F^T F / sigma^2, so a scalar beta rescales sigma
  const double sigma_eff = spec.sigma / std::abs(spec.beta(0, 0));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    randsrc::RngStream rng(seed, i);
    out[i] = randsrc::sample_theorem24_theta(spec.p, spec.d, spec.r, sigma_eff, spec.sigma_y, spec.n, rng).theta_deg;
  });
  return out;
}

PipelineAngles pipeline_angles(const model::ModelSpec& spec, int reps, std::uint64_t seed, int threads) {
  PipelineAngles out;
  out.pfc_deg.resize(static_cast<std::size_t>(reps));
  out.pc_deg.resize(static_cast<std::size_t>(reps));
  const estimators::Basis truth(spec.gamma, estimators::BasisKind::TRUE);
  parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t i) {
    randsrc::RngStream rng(seed, i);
    const model::Dataset data = model::simulate(spec, rng);
    out.pfc_deg[i] = metrics::theta(estimators::pfc(data, spec.d).basis, truth).theta_deg;
    out.pc_deg[i] = metrics::theta(estimators::pc(data, spec.d).basis, truth).theta_deg;
  });
  return out;
}

SeriesTable run_figure1(const ExperimentGrid& grid, char panel) {
  check_panel(grid, panel, false);
  return run_panel(grid);
}

SeriesTable run_figure2(const ExperimentGrid& grid, char panel) {
  check_panel(grid, panel, true);
  return run_panel(grid);
}

}  // namespace pfc::expcli
