#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pfc/randsrc.hpp"
#include "pfc/stats.hpp"

using namespace pfc;
using namespace pfc::randsrc;

TEST(RngStream, SameKeysGiveIdenticalSequences) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.normal(), b.normal());
    ASSERT_EQ(a.uniform(), b.uniform());
    ASSERT_EQ(a.chi_squared(3.5), b.chi_squared(3.5));
  }
}

TEST(RngStream, DifferentStreamsDiffer) {
  RngStream a(42, 0), b(42, 1), c(43, 0);
  const double x = a.normal();
  EXPECT_NE(x, b.normal());
  EXPECT_NE(x, c.normal());
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
  EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}

TEST(RngStream, RademacherIsBalanced) {
  RngStream rng(1, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double s = rng.rademacher();
    ASSERT_TRUE(s == 1.0 || s == -1.0);
    sum += s;
  }
  EXPECT_LT(std::abs(sum / n), 4.0 / std::sqrt(n));
}

TEST(NoncentralChi2, MeanAndVariance) {
  RngStream rng(3, 0);
  const int k = 4;
  const double lambda = 6.0;
  std::vector<double> xs(100000);
  for (auto& x : xs) x = sample_noncentral_chi2(k, lambda, rng);
  // mean k + lambda, variance 2 (k + 2 lambda)
  const double var = 2.0 * (k + 2.0 * lambda);
  EXPECT_LT(std::abs(stats::mean(xs) - (k + lambda)), 4.0 * std::sqrt(var / xs.size()));
  EXPECT_NEAR(stats::variance(xs) / var, 1.0, 0.05);
}

TEST(NoncentralF, MeanMatchesClosedForm) {
  RngStream rng(4, 0);
  const int d1 = 2, d2 = 18;
  const double lambda = 5.0;
  std::vector<double> xs(200000);
  for (auto& x : xs) x = sample_noncentral_f(d1, d2, lambda, rng);
  const double mean = d2 * (d1 + lambda) / (d1 * (d2 - 2.0));
  EXPECT_LT(std::abs(stats::mean(xs) - mean), 4.0 * stats::std_err(xs));
}

TEST(NoncentralF, ZeroNoncentralityIsCentral) {
  RngStream rng(5, 0), ref(5, 1);
  const int d1 = 3, d2 = 9;
  std::fisher_f_distribution<double> central(d1, d2);
  std::vector<double> a(100000), b(100000);
  for (auto& x : a) x = sample_noncentral_f(d1, d2, 0.0, rng);
  for (auto& x : b) x = central(ref.engine());
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 0.001);
}

TEST(NoncentralSamplers, RejectBadInputs) {
  RngStream rng(1, 0);
  EXPECT_THROW(sample_noncentral_chi2(0, 1.0, rng), Error);
  EXPECT_THROW(sample_noncentral_chi2(2, -1.0, rng), Error);
  EXPECT_THROW(sample_noncentral_f(1, 0, 1.0, rng), Error);
}

TEST(Theorem24Sampler, ZeroNoncentralityGivesCentralF) {
  RngStream rng(6, 0), ref(6, 1);
  Theorem24Params params{10, 1, 1, 1.0, 0.0};
  std::fisher_f_distribution<double> central(1, 9);
  std::vector<double> a(50000), b(50000);
  for (auto& x : a) x = 9.0 * sample_theorem24_theta(params, rng).c_value;
  for (auto& x : b) x = central(ref.engine());
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 0.001);
}

TEST(Theorem24Sampler, AngleShrinksWithSignal) {
  RngStream rng(7, 0);
  std::vector<double> weak(5000), strong(5000);
  for (auto& x : weak) x = sample_theorem24_theta({10, 1, 1, 1.0, 10.0}, rng).theta_deg;
  for (auto& x : strong) x = sample_theorem24_theta({10, 1, 1, 1.0, 1000.0}, rng).theta_deg;
  EXPECT_GT(stats::mean(weak), stats::mean(strong));
  for (double t : weak) {
    EXPECT_GE(t, 0.0);
    EXPECT_LE(t, 90.0);
  }
}

TEST(Theorem24Sampler, RejectsUnequalDimensions) {
  RngStream rng(1, 0);
  EXPECT_THROW(sample_theorem24_theta({10, 1, 2, 1.0, 1.0}, rng), Error);
  EXPECT_THROW(sample_theorem24_theta(10, 2, 2, 1.0, 1.0, 40, rng), Error);
}

TEST(Wishart, SingleRowIsChiSquared) {
  RngStream rng(8, 0);
  const int v = 7;
  std::vector<double> xs(10000);
  for (auto& x : xs) x = sample_wishart_lambda1(1, v, rng);
  EXPECT_LT(std::abs(stats::mean(xs) - v), 4.0 * stats::std_err(xs));
}

TEST(Wishart, TracyWidomSanityEnvelope) {
  RngStream rng(9, 0);
  const auto cs = johnstone_center_scale(50, 50);
  std::vector<double> z(10000);
  for (auto& x : z) x = (sample_wishart_lambda1(50, 50, rng) - cs.mu_uv) / cs.sigma_uv;
  const double m = stats::mean(z), sd = std::sqrt(stats::variance(z));
  EXPECT_GE(m, -2.0);
  EXPECT_LE(m, 0.0);
  EXPECT_GE(sd, 1.0);
  EXPECT_LE(sd, 2.0);
}

TEST(Wishart, RejectsEmptyShape) {
  RngStream rng(1, 0);
  EXPECT_THROW(sample_wishart_lambda1(0, 3, rng), Error);
}

TEST(Johnstone, HighPrecisionOracle) {
  // u = v = 5 evaluated in long double
  const long double s5 = std::sqrt(5.0L);
  const long double mu = (2.0L + s5) * (2.0L + s5);
  const long double sigma = (2.0L + s5) * std::cbrt(0.5L + 1.0L / s5);
  const auto cs = johnstone_center_scale(5, 5);
  EXPECT_NEAR(cs.mu_uv, static_cast<double>(mu), 1e-13 * static_cast<double>(mu));
  EXPECT_NEAR(cs.sigma_uv, static_cast<double>(sigma), 1e-13 * static_cast<double>(sigma));
}

TEST(Johnstone, SymmetricSubstitution) {
  for (int v : {2, 5, 17, 101}) {
    const auto cs = johnstone_center_scale(v - 1, v);
    const double s = std::sqrt(v - 1.0);
    EXPECT_NEAR(cs.mu_uv, 4.0 * (v - 1), 1e-12 * v);
    EXPECT_NEAR(cs.sigma_uv, 2.0 * s * std::cbrt(2.0 / s), 1e-12 * v);
  }
}

TEST(Johnstone, MonotoneInBothArguments) {
  for (int u = 1; u < 30; ++u) {
    for (int v = 2; v < 30; ++v) {
      EXPECT_LT(johnstone_center_scale(u, v).mu_uv, johnstone_center_scale(u + 1, v).mu_uv);
      EXPECT_LT(johnstone_center_scale(u, v).mu_uv, johnstone_center_scale(u, v + 1).mu_uv);
    }
  }
  EXPECT_THROW(johnstone_center_scale(3, 1), Error);
}

TEST(DsTailBound, ValuesAndDomain) {
  EXPECT_NEAR(ds_tail_bound(20, 20, 2.0), std::exp(-2.0), 1e-16);
  EXPECT_NEAR(ds_tail_bound(20, 20, 1e-9), 1.0, 1e-12);
  EXPECT_THROW(ds_tail_bound(20, 20, 0.0), Error);
  EXPECT_THROW(ds_tail_bound(20, 20, -1.0), Error);
}

TEST(DsTailBound, DominatesEmpiricalTails) {
  RngStream rng(10, 0);
  const int n = 10000;
  std::vector<double> l1(n);
  for (auto& x : l1) x = sample_wishart_lambda1(20, 20, rng);
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    const double edge = std::pow(2.0 * std::sqrt(20.0) + t, 2);
    double hits = 0;
    for (double x : l1) hits += x >= edge;
    const double p = hits / n;
    EXPECT_LE(p, ds_tail_bound(20, 20, t) + 2.0 * std::sqrt(p * (1 - p) / n)) << "t = " << t;
  }
}
