#pragma once

#include <optional>
#include <vector>

#include "pfc/matkit.hpp"
#include "pfc/model.hpp"

// Closed-form theoretical quantities: moment formulas, confidence limits,
// level-crossing events and their tails, and the PC-angle bounds.
//
// Bounds that the theory leaves undefined at the given inputs (small n,
// sigma_y <= sigma, ...) come back as an empty optional rather than an error.
namespace pfc::bounds {

using matkit::Matrix;
using matkit::Vector;

/// Moments of N = ||P_Gamma V||_F^2 (signal part) and
/// D = ||(I - P_Gamma) V||_F^2 (noise part) given F^T F.
struct MomentReport {
  double mean_n = 0.0;
  double var_n_bound = 0.0;
  double mean_d = 0.0;
  double var_d_bound = 0.0;
  double t_const = 0.0;  // sigma^4 r (m4 - 1)
};

/// tr(beta F^T F beta^T).
double signal_trace(const model::ModelSpec& spec, const Matrix& ftf);

MomentReport lemma31_moments(const model::ModelSpec& spec, const Matrix& ftf);

struct CiReport {
  double alpha = 0.0;
  std::optional<double> theta_plus_rad;
  std::optional<double> theta_minus_rad;
  double x_plus = 0.0;
  double x_minus = 0.0;
  double n_plus_star = 0.0;
  double n_minus_star = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
};

/// Upper limit: P(theta >= theta_plus) <= alpha. Requires d = r and
/// K1 n > sqrt(3 (T d + 4 K2 n) / alpha).
std::optional<double> theorem33_upper(double alpha, int n, double k1, double k2, const MomentReport& moment,
                                      const model::ModelSpec& spec);

/// Lower limit: P(theta <= theta_minus) <= alpha. Requires X_minus > 0.
std::optional<double> theorem33_lower(double alpha, int n, double k1, double k2, const MomentReport& moment,
                                      const model::ModelSpec& spec);

/// Both limits plus every intermediate term.
CiReport theorem33(double alpha, int n, double k1, double k2, const MomentReport& moment,
                   const model::ModelSpec& spec);

/// Limit of beta (F^T F) beta^T / n for polynomial features of a normal
/// response. Throws UnsupportedFyKind for slices.
Matrix phi_limit(const model::ModelSpec& spec);

/// Monte Carlo stand-in for phi_limit: beta F^T F beta^T / n from one long
/// response sample. Works for every feature kind.
Matrix phi_limit_simulated(const model::ModelSpec& spec, int n_large, std::uint64_t seed);

struct Lemma32Report {
  std::vector<double> deviations;  // per dataset: max_i |lambda_i/n - phi_i|
  double max_deviation = 0.0;
};

Lemma32Report lemma32_check(const std::vector<model::Dataset>& datasets, const model::ModelSpec& spec);

/// Event lambda_1(L) - lambda_p(L) >= lambda_d(beta F^T F beta^T).
bool crossing_l1(const model::ModelSpec& spec, const Matrix& ftf, const Matrix& l);

/// Minimum gap among the top r eigenvalues with lambda_{r+1} taken as 0.
double min_spacing(const Vector& fitted_cov_eigs, int r);

/// exp(-(sqrt(M)/sigma - sqrt n - sqrt p)^2 / 2), or 1 when the bracket is
/// not positive.
double lemma53_tail(double m, double sigma, int n, int p);

/// arctan(sigma^2 sqrt(n p) / (M - noise_norm)); pi/2 when M <= noise_norm.
double prop54_bound(double m, double noise_norm, double sigma, int n, int p);

/// theta_pfc + arctan(sigma^2 sqrt p / (sqrt n (sigma_y^2 - sigma^2))),
/// clamped to pi/2; undefined when sigma_y^2 <= sigma^2.
std::optional<double> eq11_bound(double theta_pfc, double sigma, double sigma_y, int n, int p);

/// theta_pfc + arctan(sigma^2 sqrt p / (sqrt n sigma_y^2)), clamped to pi/2.
double eq12_approx(double theta_pfc, double sigma, double sigma_y, int n, int p);

struct CrossingReport {
  double min_spacing_m = 0.0;
  double noise_lambda1 = 0.0;
  bool l2_occurred = false;
  double l2_tail = 1.0;
  bool l1_occurred = false;
};

/// Evaluates both level-crossing events on a realized dataset.
CrossingReport crossing_report(const model::ModelSpec& spec, const model::Dataset& data);

struct Theorem43Constants {
  double delta = 0.0;
  double a = 0.0;
  double big_k = 0.0;
  double k1 = 0.0;  // P(||S S^T|| >= k1) <= alpha/3 for a p x r Gaussian S
  double k2 = 0.0;  // lambda_1(Phi) + delta

  /// arcsin(min(1, K / sqrt n)).
  double theta_star(int n) const;
};

Theorem43Constants theorem43_constants(const Vector& phi_eigs, double sigma, int r, int p, double alpha);

}  // namespace pfc::bounds
