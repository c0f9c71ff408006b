#pragma once

#include <span>
#include <vector>

namespace pfc::stats {

double mean(std::span<const double> xs);
/// Unbiased sample variance.
double variance(std::span<const double> xs);
/// Standard error of the sample mean.
double std_err(std::span<const double> xs);

/// Empirical quantile with linear interpolation between order statistics
/// (position q (n - 1) in the sorted sample).
double quantile(std::vector<double> xs, double q);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;  // asymptotic Kolmogorov distribution
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_sf(double x);

}  // namespace pfc::stats
