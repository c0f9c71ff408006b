// pfc: simulation, figure reproduction, closed-form bounds and check suites.
//
// Exit status: 0 ok, 1 configuration error, 2 failed check suite, 3 I/O error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pfc/bounds.hpp"
#include "pfc/checks.hpp"
#include "pfc/error.hpp"
#include "pfc/estimators.hpp"
#include "pfc/experiment.hpp"
#include "pfc/export.hpp"
#include "pfc/metrics.hpp"
#include "pfc/model.hpp"
#include "pfc/parallel.hpp"
#include "pfc/randsrc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pfc;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kCheckFailed = 2, kIo = 3 };

constexpr double kDeg = 180.0 / std::numbers::pi;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create directory " + dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw Error(ErrorCode::IoError, "write to " + path.string() + " failed");
}

std::string matrix_csv(const matkit::Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += expcli::format_real(m(i, j));
    }
    out += '\n';
  }
  return out;
}

json matrix_json(const matkit::Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

model::ModelSpec load_spec(const std::string& path) {
  return model::spec_from_json(read_json(path));
}

int cmd_simulate(const std::string& config, std::uint64_t seed, std::uint64_t stream, const std::string& out_dir) {
  const auto spec = load_spec(config);
  make_dir(out_dir);
  randsrc::RngStream rng(seed, stream);
  const auto data = model::simulate(spec, rng);
  const estimators::Basis truth(spec.gamma, estimators::BasisKind::TRUE);
  const auto fit_pfc = estimators::pfc(data, spec.d);
  const auto fit_pc = estimators::pc(data, spec.d);

  const fs::path dir(out_dir);
  write_text(dir / "y.csv", matrix_csv(data.y));
  write_text(dir / "F.csv", matrix_csv(data.F));
  write_text(dir / "X.csv", matrix_csv(data.X_raw));

  json summary;
  summary["seed"] = seed;
  summary["stream_id"] = stream;
  summary["spec"] = model::spec_to_json(spec);
  for (const auto* est : {&fit_pfc, &fit_pc}) {
    const std::string key = est == &fit_pfc ? "pfc" : "pc";
    const auto angle = metrics::theta(est->basis, truth);
    summary[key] = {{"basis", matrix_json(est->basis.matrix())},
                    {"eigenvalues", std::vector<double>(est->eigenvalues.begin(), est->eigenvalues.end())},
                    {"theta_deg", angle.theta_deg},
                    {"c_ratio", angle.c_value},
                    {"spacing_degenerate", est->spacing_degenerate}};
  }
  summary["pc"]["few_samples"] = fit_pc.few_samples;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "pfc angle " << summary["pfc"]["theta_deg"].get<double>() << " deg, pc angle "
            << summary["pc"]["theta_deg"].get<double>() << " deg; wrote " << out_dir << "\n";
  return kOk;
}

struct FigureArgs {
  char panel = 'a';
  std::string config;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::optional<int> reps;
  std::optional<int> pipeline_reps;
  int threads = 1;
};

int cmd_figure(int figure, const FigureArgs& args) {
  auto grid = figure == 1 ? expcli::figure1_grid(args.panel) : expcli::figure2_grid(args.panel);
  if (!args.config.empty()) grid = expcli::grid_from_json(read_json(args.config), grid);
  grid.seed = args.seed;
  if (args.reps) grid.reps = *args.reps;
  if (args.pipeline_reps) grid.pipeline_reps = *args.pipeline_reps;
  grid.threads = args.threads;

  const auto table = figure == 1 ? expcli::run_figure1(grid, args.panel) : expcli::run_figure2(grid, args.panel);
  make_dir(args.out);
  const std::string stem = "figure" + std::to_string(figure) + args.panel;
  const auto style = figure == 1 ? expcli::FigureStyle::Quantiles : expcli::FigureStyle::Comparison;
  const std::string title = "Figure " + std::to_string(figure) + "(" + args.panel + "): angle vs " + table.sweep_name;
  expcli::export_table(table, expcli::ExportFormat::Csv, (fs::path(args.out) / (stem + ".csv")).string());
  expcli::export_table(table, expcli::ExportFormat::Svg, (fs::path(args.out) / (stem + ".svg")).string(), style,
                       title);
  std::cout << expcli::to_csv(table);
  return kOk;
}

int cmd_bounds(const std::string& config, double alpha, std::optional<double> k1, std::optional<double> k2) {
  const json raw = read_json(config);
  const auto spec = model::spec_from_json(raw);
  // Limit of F^T F / n: the same computation with beta set to the identity.
  model::ModelSpec unit = spec;
  unit.beta = matkit::Matrix::Identity(spec.r, spec.r);
  const matkit::Matrix cov = spec.fy_kind == model::FyKind::Polynomial ? bounds::phi_limit(unit)
                                                                       : bounds::phi_limit_simulated(unit, 200000, 0);
  const matkit::Matrix phi = spec.beta * cov * spec.beta.transpose();
  const double tr_phi = phi.trace();
  const matkit::Matrix ftf_limit = spec.n * cov;
  const auto moments = bounds::lemma31_moments(spec, ftf_limit);

  json out;
  out["alpha"] = alpha;
  out["phi_trace"] = tr_phi;
  out["moments"] = {{"mean_n", moments.mean_n},
                    {"var_n_bound", moments.var_n_bound},
                    {"mean_d", moments.mean_d},
                    {"var_d_bound", moments.var_d_bound},
                    {"t_const", moments.t_const}};

  if (spec.d == spec.r) {
    const double lo = k1.value_or(0.9 * tr_phi);
    const double hi = k2.value_or(1.1 * tr_phi);
    const auto ci = bounds::theorem33(alpha, spec.n, lo, hi, moments, spec);
    auto deg = [](const std::optional<double>& v) { return v ? json(*v * kDeg) : json(nullptr); };
    out["confidence"] = {{"k1", ci.k1},
                         {"k2", ci.k2},
                         {"x_plus", ci.x_plus},
                         {"n_plus_star", ci.n_plus_star},
                         {"x_minus", ci.x_minus},
                         {"n_minus_star", ci.n_minus_star},
                         {"theta_plus_deg", deg(ci.theta_plus_rad)},
                         {"theta_minus_deg", deg(ci.theta_minus_rad)}};
  } else {
    out["confidence"] = nullptr;
  }

  try {
    const auto c = bounds::theorem43_constants(matkit::sym_eigvals(phi), spec.sigma, spec.r, spec.p, alpha);
    out["consistency"] = {{"delta", c.delta},
                          {"a", c.a},
                          {"K", c.big_k},
                          {"k1", c.k1},
                          {"k2", c.k2},
                          {"theta_star_deg", c.theta_star(spec.n) * kDeg}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateSpectrum) throw;
    out["consistency"] = {{"error", e.what()}};
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_check(const std::string& suite, std::uint64_t seed, int threads) {
  const auto report = expcli::run_checks(suite, seed, threads);
  std::cout << report.to_json().dump(2) << "\n";
  return report.passed ? kOk : kCheckFailed;
}

int exit_for(ErrorCode code) {
  return code == ErrorCode::IoError ? kIo : kConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal fitted components: simulation, figures, bounds and checks"};
  app.require_subcommand(1);

  std::string config, out_dir = ".", suite;
  std::uint64_t seed = 0, stream = 0;
  double alpha = 0.1;
  std::optional<double> k1, k2;
  int threads = pfc::default_threads();
  FigureArgs fig;
  std::string panel;

  auto* sim = app.add_subcommand("simulate", "draw one dataset and fit PFC and PC");
  sim->add_option("--config", config, "model spec (JSON)")->required();
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--stream", stream, "stream id within the seed");
  sim->add_option("--out", out_dir, "output directory");

  CLI::App* figs[2];
  for (int f = 1; f <= 2; ++f) {
    auto* sub = app.add_subcommand("figure" + std::to_string(f), "reproduce one panel of figure " + std::to_string(f));
    sub->add_option("--panel", panel, "panel letter")
        ->required()
        ->check(CLI::IsMember(f == 1 ? std::vector<std::string>{"a", "b", "c"}
                                     : std::vector<std::string>{"a", "b", "c", "d"}));
    sub->add_option("--config", fig.config, "grid overrides (JSON)");
    sub->add_option("--seed", fig.seed, "random seed");
    sub->add_option("--out", fig.out, "output directory");
    sub->add_option("--reps", fig.reps, "direct-sampler replications per sweep value")->check(CLI::PositiveNumber);
    sub->add_option("--pipeline-reps", fig.pipeline_reps, "simulate/estimate replications per sweep value")
        ->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    figs[f - 1] = sub;
  }

  auto* bnd = app.add_subcommand("bounds", "closed-form moments, confidence limits and consistency constants");
  bnd->add_option("--config", config, "model spec (JSON)")->required();
  bnd->add_option("--alpha", alpha, "level")->check(CLI::Range(0.0, 1.0));
  bnd->add_option("--k1", k1, "lower limit of tr(beta F^T F beta^T)/n (default 0.9 tr Phi)");
  bnd->add_option("--k2", k2, "upper limit (default 1.1 tr Phi)");

  auto* chk = app.add_subcommand("check", "run an invariant suite");
  chk->add_option("--suite", suite, "suite name")->required();
  chk->add_option("--seed", seed, "random seed");
  chk->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*sim) return cmd_simulate(config, seed, stream, out_dir);
    for (int f = 0; f < 2; ++f) {
      if (*figs[f]) {
        fig.panel = panel.at(0);
        fig.threads = threads;
        return cmd_figure(f + 1, fig);
      }
    }
    if (*bnd) return cmd_bounds(config, alpha, k1, k2);
    if (*chk) return cmd_check(suite, seed, threads);
  } catch (const Error& e) {
    std::cerr << "pfc: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "pfc: " << e.what() << "\n";
    return kConfig;
  }
  return kConfig;
}
