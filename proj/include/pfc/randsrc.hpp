#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "pfc/matkit.hpp"
#include "pfc/metrics.hpp"

namespace pfc::randsrc {

/// A single-owner random stream keyed by (seed, stream_id).
///
/// The engine state is derived by running both keys through SplitMix64, so
/// stream k of a seed never depends on how many draws other streams made.
/// Replications use their index as stream_id, which makes Monte Carlo output
/// independent of how the replications are scheduled.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  RngStream(const RngStream&) = delete;
  RngStream& operator=(const RngStream&) = delete;
  RngStream(RngStream&&) = default;
  RngStream& operator=(RngStream&&) = default;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// +1 or -1 with equal probability.
  double rademacher() { return (engine_() >> 63) != 0U ? 1.0 : -1.0; }
  double chi_squared(double dof);

  /// rows x cols matrix of independent standard normals, filled column-major.
  matkit::Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

/// Mixes a tag into a seed so that independent experiment families sharing a
/// user seed draw from unrelated streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

double sample_noncentral_chi2(int dof, double lambda, RngStream& rng);
double sample_noncentral_f(int d1, int d2, double lambda, RngStream& rng);

/// Parameters of the conditional law of the PFC accuracy C when d = r:
/// (p-d) C / d ~ F_{rd, r(p-d)}(lambda_nc).
struct Theorem24Params {
  int p = 0;
  int d = 0;
  int r = 0;
  double sigma = 1.0;
  double lambda_nc = 0.0;

  void validate() const;
};

/// One draw of the PFC angle given the noncentrality.
metrics::AngleSample sample_theorem24_theta(const Theorem24Params& params, RngStream& rng);

/// Hierarchical draw for the single-index setting (d = r = 1, beta = 1): first
/// F^T F ~ sigma_y^2 chi^2_{n-1}, then the angle given lambda = F^T F / sigma^2.
metrics::AngleSample sample_theorem24_theta(int p, int d, int r, double sigma, double sigma_y,
                                            int n, RngStream& rng);

/// Largest eigenvalue of X X^T for a u x v standard Gaussian X.
double sample_wishart_lambda1(int u, int v, RngStream& rng);

struct CenterScale {
  double mu_uv;
  double sigma_uv;
};

/// Tracy-Widom centering and scaling constants for lambda_1 of X X^T.
CenterScale johnstone_center_scale(int u, int v);

/// exp(-t^2/2), the Gaussian bound on P(lambda_1 >= (sqrt u + sqrt v + t)^2).
double ds_tail_bound(int u, int v, double t);

}  // namespace pfc::randsrc
