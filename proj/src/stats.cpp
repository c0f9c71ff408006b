#include "pfc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pfc/error.hpp"

namespace pfc::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::InvalidParam, "mean of an empty sample");
  double m = 0.0;
  std::size_t k = 0;
  for (double x : xs) m += (x - m) / static_cast<double>(++k);
  return m;
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw Error(ErrorCode::InvalidParam, "variance needs two observations");
  double m = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    const double delta = x - m;
    m += delta / static_cast<double>(++k);
    m2 += delta * (x - m);
  }
  return m2 / static_cast<double>(xs.size() - 1);
}

double std_err(std::span<const double> xs) { return std::sqrt(variance(xs) / static_cast<double>(xs.size())); }

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw Error(ErrorCode::InvalidParam, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidParam, "quantile level outside [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] + frac * (xs[hi] - xs[lo]);
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // series converges slowly; the value is 1 to double precision
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidParam, "KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sqrt_ne = std::sqrt(ne);
  // Stephens' small-sample correction of the asymptotic argument
  return {d, kolmogorov_sf((sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d)};
}

}  // namespace pfc::stats
