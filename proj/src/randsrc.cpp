#include "pfc/randsrc.hpp"

#include <array>
#include <cmath>
#include <string>

namespace pfc::randsrc {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream_id + 0x632BE59BD9B4E019ULL));
  const std::uint64_t c = splitmix64(b);
  std::array<std::uint32_t, 6> words{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidParam, what); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double RngStream::chi_squared(double dof) {
  std::chi_squared_distribution<double> dist(dof);
  return dist(engine_);
}

matkit::Matrix RngStream::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  matkit::Matrix m(rows, cols);
  double* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) data[i] = normal();
  return m;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(~tag));
}

double sample_noncentral_chi2(int dof, double lambda, RngStream& rng) {
  if (dof < 1) invalid("noncentral chi-square needs dof >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) invalid("noncentrality must be finite and >= 0");
  // one normal shifted by sqrt(lambda) plus dof - 1 central squares
  const double shifted = rng.normal() + std::sqrt(lambda);
  double sum = shifted * shifted;
  for (int k = 1; k < dof; ++k) {
    const double z = rng.normal();
    sum += z * z;
  }
  return sum;
}

double sample_noncentral_f(int d1, int d2, double lambda, RngStream& rng) {
  if (d1 < 1 || d2 < 1) invalid("F distribution needs d1, d2 >= 1");
  const double num = sample_noncentral_chi2(d1, lambda, rng) / d1;
  const double den = sample_noncentral_chi2(d2, 0.0, rng) / d2;
  return num / den;
}

void Theorem24Params::validate() const {
  if (d != r) invalid("the F law of C holds only for d = r");
  if (d < 1 || d >= p) invalid("need 1 <= d < p");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) invalid("sigma must be positive");
  if (!(lambda_nc >= 0.0) || !std::isfinite(lambda_nc)) invalid("noncentrality must be finite and >= 0");
}

metrics::AngleSample sample_theorem24_theta(const Theorem24Params& params, RngStream& rng) {
  params.validate();
  const int d1 = params.r * params.d;
  const int d2 = params.r * (params.p - params.d);
  const double f = sample_noncentral_f(d1, d2, params.lambda_nc, rng);
  const double c = static_cast<double>(params.d) / (params.p - params.d) * f;
  return metrics::angle_from_c(c);
}

metrics::AngleSample sample_theorem24_theta(int p, int d, int r, double sigma, double sigma_y, int n,
                                            RngStream& rng) {
  if (d != 1 || r != 1) invalid("the hierarchical sampler covers d = r = 1 with beta = 1");
  if (n < 2) invalid("need n >= 2");
  if (!(sigma_y > 0.0)) invalid("sigma_y must be positive");
  const double ftf = sigma_y * sigma_y * rng.chi_squared(n - 1);
  Theorem24Params params{p, d, r, sigma, ftf / (sigma * sigma)};
  return sample_theorem24_theta(params, rng);
}

double sample_wishart_lambda1(int u, int v, RngStream& rng) {
  if (u < 1 || v < 1) invalid("Wishart dimensions must be positive");
  const matkit::Matrix x = rng.normal_matrix(u, v);
  // X X^T and X^T X share their nonzero spectrum; use the smaller Gram matrix
  const matkit::Matrix g = u <= v ? matkit::gram(x.transpose()) : matkit::gram(x);
  Eigen::SelfAdjointEigenSolver<matkit::Matrix> solver(g, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

CenterScale johnstone_center_scale(int u, int v) {
  if (u < 1 || v < 2) invalid("need u >= 1 and v >= 2");
  const double a = std::sqrt(static_cast<double>(v - 1));
  const double b = std::sqrt(static_cast<double>(u));
  return {(a + b) * (a + b), (a + b) * std::cbrt(1.0 / a + 1.0 / b)};
}

double ds_tail_bound(int u, int v, double t) {
  if (u < 1 || v < 1) invalid("Wishart dimensions must be positive");
  if (!(t > 0.0)) invalid("tail bound needs t > 0");
  return std::exp(-0.5 * t * t);
}

}  // namespace pfc::randsrc
