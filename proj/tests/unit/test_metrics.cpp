#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "pfc/metrics.hpp"

using namespace pfc;
using estimators::Basis;
using estimators::BasisKind;
using matkit::Matrix;

namespace {

Basis e(int p, int i) {
  Matrix m = Matrix::Zero(p, 1);
  m(i, 0) = 1.0;
  return Basis(m, BasisKind::OTHER);
}

Basis rotated(int p, double phi) {
  Matrix m = Matrix::Zero(p, 1);
  m(0, 0) = std::cos(phi);
  m(1, 0) = std::sin(phi);
  return Basis(m, BasisKind::OTHER);
}

}  // namespace

TEST(AngleFromC, Endpoints) {
  EXPECT_NEAR(metrics::angle_from_c(0.0).theta_deg, 90.0, 1e-12);
  EXPECT_NEAR(metrics::angle_from_c(std::numeric_limits<double>::infinity()).theta_rad, 0.0, 1e-15);
  EXPECT_NEAR(metrics::angle_from_c(1.0).theta_deg, 45.0, 1e-12);
  EXPECT_NEAR(metrics::angle_from_c(3.0).theta_deg, 30.0, 1e-12);
}

TEST(AngleFromC, CotangentSquaredRoundTrip) {
  for (double c : {1e-6, 0.1, 0.7, 2.0, 50.0, 1e6}) {
    const auto a = metrics::angle_from_c(c);
    EXPECT_NEAR(1.0 / std::pow(std::tan(a.theta_rad), 2), c, 1e-9 * c);
  }
}

TEST(Theta, IdenticalSpanIsZero) {
  const auto t = metrics::theta(e(5, 0), e(5, 0));
  EXPECT_TRUE(std::isinf(t.c_value));
  EXPECT_EQ(t.theta_deg, 0.0);
}

TEST(Theta, OrthogonalIsNinety) {
  const auto t = metrics::theta(e(5, 1), e(5, 0));
  EXPECT_EQ(t.c_value, 0.0);
  EXPECT_NEAR(t.theta_deg, 90.0, 1e-12);
}

TEST(Theta, PlaneRotationRecoversAngle) {
  for (double phi : {0.01, 0.2, 0.7, 1.3}) {
    const auto t = metrics::theta(rotated(4, phi), e(4, 0));
    EXPECT_NEAR(t.theta_rad, phi, 1e-12);
    EXPECT_NEAR(metrics::m_metric(rotated(4, phi), e(4, 0)), std::sin(phi), 1e-12);
    EXPECT_NEAR(metrics::projector_distance(rotated(4, phi), e(4, 0)), std::sin(phi), 1e-12);
  }
}

TEST(Theta, SignAndRotationInvariant) {
  Matrix m = Matrix::Zero(4, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  const Basis truth(m, BasisKind::TRUE);
  Matrix r(2, 2);
  r << std::cos(0.4), -std::sin(0.4), std::sin(0.4), std::cos(0.4);
  const Basis spun(m * r, BasisKind::OTHER);
  EXPECT_TRUE(std::isinf(metrics::c_ratio(spun, truth)));
  const Basis flipped(-rotated(4, 0.3).matrix(), BasisKind::OTHER);
  EXPECT_NEAR(metrics::theta(flipped, e(4, 0)).theta_rad, 0.3, 1e-12);
}

TEST(Theta, RejectsMismatchedShapes) {
  EXPECT_THROW(metrics::theta(e(4, 0), e(5, 0)), Error);
  const Basis full(Matrix::Identity(3, 3), BasisKind::TRUE);
  EXPECT_THROW(metrics::theta(e(3, 0), full), Error);
}
