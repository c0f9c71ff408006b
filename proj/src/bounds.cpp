#include "pfc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pfc/randsrc.hpp"

namespace pfc::bounds {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidParam, what); }

void check_ci_inputs(double alpha, int n, double k1, double k2, const model::ModelSpec& spec) {
  if (!(alpha > 0.0 && alpha < 1.0)) invalid("alpha must lie in (0, 1)");
  if (n < 1) invalid("n must be positive");
  if (!(k1 > 0.0) || !(k2 >= k1)) invalid("need 0 < K1 <= K2");
  if (spec.d != spec.r) invalid("the confidence limits need d = r");
}

double chebyshev_slack(double alpha, int n, double k2, const MomentReport& moment, int d) {
  return std::sqrt(3.0 * (moment.t_const * d + 4.0 * k2 * n) / alpha);
}

// E y^k for y ~ normal(0, s^2)
double normal_moment(int k, double s) {
  if (k % 2 == 1) return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 0; j -= 2) m *= j;
  return m * std::pow(s, k);
}

}  // namespace

double signal_trace(const model::ModelSpec& spec, const Matrix& ftf) {
  if (ftf.rows() != spec.r || ftf.cols() != spec.r) throw Error(ErrorCode::DimensionMismatch, "F^T F must be r x r");
  return (spec.beta * ftf * spec.beta.transpose()).trace();
}

MomentReport lemma31_moments(const model::ModelSpec& spec, const Matrix& ftf) {
  spec.validate();
  matkit::require_symmetric(ftf, "F^T F");
  if (ftf.size() > 0 && matkit::sym_eigvals(ftf).minCoeff() < -1e-10 * std::max(1.0, ftf.cwiseAbs().maxCoeff())) {
    invalid("F^T F must be positive semidefinite");
  }
  const double s2 = spec.sigma * spec.sigma;
  const double signal = signal_trace(spec, ftf);
  MomentReport out;
  out.t_const = s2 * s2 * spec.r * (spec.fourth_moment() - 1.0);
  out.mean_n = signal + spec.r * spec.d * s2;
  out.var_n_bound = spec.d * out.t_const + 4.0 * s2 * signal;
  out.mean_d = spec.r * (spec.p - spec.d) * s2;
  out.var_d_bound = (spec.p - spec.d) * out.t_const;
  return out;
}

std::optional<double> theorem33_upper(double alpha, int n, double k1, double k2, const MomentReport& moment,
                                      const model::ModelSpec& spec) {
  return theorem33(alpha, n, k1, k2, moment, spec).theta_plus_rad;
}

std::optional<double> theorem33_lower(double alpha, int n, double k1, double k2, const MomentReport& moment,
                                      const model::ModelSpec& spec) {
  return theorem33(alpha, n, k1, k2, moment, spec).theta_minus_rad;
}

CiReport theorem33(double alpha, int n, double k1, double k2, const MomentReport& moment,
                   const model::ModelSpec& spec) {
  check_ci_inputs(alpha, n, k1, k2, spec);
  const double s2 = spec.sigma * spec.sigma;
  const int r = spec.r;
  const int d = spec.d;
  const int p = spec.p;
  const double slack = chebyshev_slack(alpha, n, k2, moment, d);

  CiReport ci;
  ci.alpha = alpha;
  ci.k1 = k1;
  ci.k2 = k2;
  ci.x_plus = 3.0 * r * (p - d) * s2 / alpha;
  ci.n_plus_star = k1 * n - slack;
  ci.x_minus = s2 * r * (p - d) - std::sqrt(3.0 * moment.t_const * (p - d) / alpha);
  ci.n_minus_star = k2 * n + r * d * s2 + slack;
  if (ci.n_plus_star > 0.0) ci.theta_plus_rad = std::atan(std::sqrt(ci.x_plus / ci.n_plus_star));
  if (ci.x_minus > 0.0) ci.theta_minus_rad = std::atan(std::sqrt(ci.x_minus / ci.n_minus_star));
  return ci;
}

Matrix phi_limit(const model::ModelSpec& spec) {
  if (spec.fy_kind != model::FyKind::Polynomial) {
    throw Error(ErrorCode::UnsupportedFyKind, "no closed-form limit for slice features; use phi_limit_simulated");
  }
  const int r = spec.r;
  Matrix cov(r, r);
  for (int u = 1; u <= r; ++u) {
    for (int v = 1; v <= r; ++v) {
      cov(u - 1, v - 1) = normal_moment(u + v, spec.sigma_y) -
                          normal_moment(u, spec.sigma_y) * normal_moment(v, spec.sigma_y);
    }
  }
  Matrix phi = spec.beta * cov * spec.beta.transpose();
  return 0.5 * (phi + phi.transpose());
}

Matrix phi_limit_simulated(const model::ModelSpec& spec, int n_large, std::uint64_t seed) {
  if (n_large <= spec.r) invalid("n_large must exceed r");
  randsrc::RngStream rng(seed, 0);
  Vector y(n_large);
  for (int i = 0; i < n_large; ++i) y(i) = spec.sigma_y * rng.normal();
  const Matrix f = model::build_fy(y, spec.fy_kind, spec.r);
  Matrix phi = spec.beta * matkit::gram(f) * spec.beta.transpose() / static_cast<double>(n_large);
  return 0.5 * (phi + phi.transpose());
}

Lemma32Report lemma32_check(const std::vector<model::Dataset>& datasets, const model::ModelSpec& spec) {
  const Vector phi = matkit::sym_eigvals(phi_limit(spec));
  Lemma32Report report;
  for (const auto& data : datasets) {
    const double n = static_cast<double>(data.F.rows());
    Matrix b = spec.beta * matkit::gram(data.F) * spec.beta.transpose() / n;
    b = 0.5 * (b + b.transpose());
    const double dev = (matkit::sym_eigvals(b) - phi).cwiseAbs().maxCoeff();
    report.deviations.push_back(dev);
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  return report;
}

bool crossing_l1(const model::ModelSpec& spec, const Matrix& ftf, const Matrix& l) {
  if (l.rows() != spec.p || l.cols() != spec.p) throw Error(ErrorCode::DimensionMismatch, "L must be p x p");
  if (ftf.rows() != spec.r || ftf.cols() != spec.r) throw Error(ErrorCode::DimensionMismatch, "F^T F must be r x r");
  Matrix signal = spec.beta * ftf * spec.beta.transpose();
  signal = 0.5 * (signal + signal.transpose());
  const Vector ls = matkit::sym_eigvals(l);
  const double spread = ls(0) - ls(ls.size() - 1);
  return spread >= matkit::sym_eigvals(signal)(spec.d - 1);
}

double min_spacing(const Vector& fitted_cov_eigs, int r) {
  if (r < 1 || fitted_cov_eigs.size() < r) invalid("min_spacing needs at least r eigenvalues");
  double m = fitted_cov_eigs(r - 1);  // gap to the structural zero
  for (int i = 0; i + 1 < r; ++i) m = std::min(m, fitted_cov_eigs(i) - fitted_cov_eigs(i + 1));
  return m;
}

double lemma53_tail(double m, double sigma, int n, int p) {
  if (!(m > 0.0) || !(sigma > 0.0)) invalid("lemma53_tail needs M > 0 and sigma > 0");
  const double t = std::sqrt(m) / sigma - std::sqrt(static_cast<double>(n)) - std::sqrt(static_cast<double>(p));
  if (t <= 0.0) return 1.0;
  return std::exp(-0.5 * t * t);
}

double prop54_bound(double m, double noise_norm, double sigma, int n, int p) {
  if (m < 0.0 || noise_norm < 0.0 || sigma < 0.0 || n < 0 || p < 0) invalid("prop54_bound needs nonnegative inputs");
  const double gap = m - noise_norm;
  if (!(gap > 0.0)) return kHalfPi;
  return std::atan(sigma * sigma * std::sqrt(static_cast<double>(n) * p) / gap);
}

std::optional<double> eq11_bound(double theta_pfc, double sigma, double sigma_y, int n, int p) {
  const double s2 = sigma * sigma;
  const double sy2 = sigma_y * sigma_y;
  if (!(sy2 > s2)) return std::nullopt;
  const double inc = std::atan(s2 * std::sqrt(static_cast<double>(p)) / (std::sqrt(static_cast<double>(n)) * (sy2 - s2)));
  return std::clamp(theta_pfc + inc, 0.0, kHalfPi);
}

double eq12_approx(double theta_pfc, double sigma, double sigma_y, int n, int p) {
  if (!(sigma_y > 0.0) || n < 1) invalid("eq12_approx needs sigma_y > 0 and n >= 1");
  const double s2 = sigma * sigma;
  const double inc = std::atan(s2 * std::sqrt(static_cast<double>(p)) / (std::sqrt(static_cast<double>(n)) * sigma_y * sigma_y));
  return std::clamp(theta_pfc + inc, 0.0, kHalfPi);
}

CrossingReport crossing_report(const model::ModelSpec& spec, const model::Dataset& data) {
  const Matrix fitted = matkit::gram(data.X_fitted);
  const Matrix noise = matkit::gram(data.X_centered - data.X_fitted);
  const Vector fitted_eigs = matkit::sym_eigvals(fitted);

  CrossingReport report;
  report.min_spacing_m = min_spacing(fitted_eigs, spec.r);
  report.noise_lambda1 = matkit::sym_eigvals(noise)(0);
  report.l2_occurred = report.noise_lambda1 >= report.min_spacing_m;
  const auto n = static_cast<int>(data.X_centered.rows());
  if (spec.sigma > 0.0 && report.min_spacing_m > 0.0) {
    report.l2_tail = lemma53_tail(report.min_spacing_m, spec.sigma, n, spec.p);
  }
  // fitted covariance = B + L with B the noiseless signal Gamma beta F^T F beta^T Gamma^T
  const Matrix ftf = matkit::gram(data.F);
  Matrix b = spec.gamma * spec.beta * ftf * spec.beta.transpose() * spec.gamma.transpose();
  Matrix l = fitted - b;
  l = 0.5 * (l + l.transpose());
  report.l1_occurred = crossing_l1(spec, ftf, l);
  return report;
}

double Theorem43Constants::theta_star(int n) const {
  if (n < 1) invalid("n must be positive");
  return std::asin(std::min(1.0, big_k / std::sqrt(static_cast<double>(n))));
}

Theorem43Constants theorem43_constants(const Vector& phi_eigs, double sigma, int r, int p, double alpha) {
  if (phi_eigs.size() < 1) invalid("need at least one eigenvalue of Phi");
  if (!(sigma > 0.0)) invalid("sigma must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) invalid("alpha must lie in (0, 1)");
  if (r < phi_eigs.size() || p <= phi_eigs.size()) invalid("need d <= r and d < p");
  const auto d = phi_eigs.size();
  double spacing = phi_eigs(d - 1);
  for (Eigen::Index i = 0; i + 1 < d; ++i) spacing = std::min(spacing, phi_eigs(i) - phi_eigs(i + 1));
  if (!(spacing > 0.0)) throw Error(ErrorCode::DegenerateSpectrum, "Phi must have distinct positive eigenvalues");

  Theorem43Constants c;
  c.delta = spacing / 10.0;
  const double top = phi_eigs(0);
  const double bottom = phi_eigs(d - 1);
  // 5 delta sits under the first root: 4 lambda_1 + lambda_d >= n (4 phi_1 + phi_d - 5 delta)
  c.a = (std::sqrt(4.0 * top + bottom - 5.0 * c.delta) - 2.0 * std::sqrt(top + c.delta)) / sigma;
  const double t = std::sqrt(2.0 * std::log(3.0 / alpha));
  const double root = std::sqrt(static_cast<double>(p)) + std::sqrt(static_cast<double>(r)) + t;
  c.k1 = root * root;
  c.k2 = top + c.delta;
  c.big_k = 10.0 * (4.0 * sigma * std::sqrt(c.k1 * c.k2) + sigma * sigma * c.k1) / c.delta;
  return c;
}

}  // namespace pfc::bounds
