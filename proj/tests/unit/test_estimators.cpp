#include <gtest/gtest.h>

#include "pfc/estimators.hpp"
#include "pfc/metrics.hpp"
#include "pfc/model.hpp"
#include "pfc/randsrc.hpp"

using namespace pfc;
using estimators::Basis;
using estimators::BasisKind;
using matkit::Matrix;

TEST(Basis, RejectsNonOrthonormal) {
  Matrix m = Matrix::Zero(3, 1);
  m(0, 0) = 2.0;
  EXPECT_THROW(Basis(m, BasisKind::OTHER), Error);
  EXPECT_NO_THROW(estimators::orthonormalize(m));
  EXPECT_NEAR(estimators::orthonormalize(m).matrix().norm(), 1.0, 1e-15);
}

TEST(Pfc, NoiselessRecoveryIsExact) {
  auto spec = model::example25(40, 0.0, 1.0);
  randsrc::RngStream rng(1, 0);
  const auto data = model::simulate(spec, rng);
  const auto est = estimators::pfc(data, 1);
  const Basis truth(spec.gamma, BasisKind::TRUE);
  EXPECT_NEAR(metrics::theta(est.basis, truth).theta_deg, 0.0, 1e-6);
  EXPECT_EQ(est.basis.kind(), BasisKind::PFC);
}

TEST(Pfc, RequiresDimensionAtMostR) {
  const auto spec = model::example25(40, 1.0, 1.0);
  randsrc::RngStream rng(2, 0);
  const auto data = model::simulate(spec, rng);
  EXPECT_THROW(estimators::pfc(data, 2), Error);
  EXPECT_NO_THROW(estimators::pc(data, 2));
}

TEST(Pfc, SpansTopFittedEigenvectors) {
  model::ModelSpec spec;
  spec.p = 7;
  spec.d = 2;
  spec.r = 2;
  spec.n = 80;
  spec.complete();
  randsrc::RngStream rng(3, 0);
  const auto data = model::simulate(spec, rng);
  const auto est = estimators::pfc(data, 2);
  const Matrix cov = matkit::gram(data.X_fitted);
  // B^T C B reproduces the top two eigenvalues
  const Matrix small = est.basis.matrix().transpose() * cov * est.basis.matrix();
  EXPECT_NEAR(small.trace(), est.eigenvalues(0) + est.eigenvalues(1), 1e-9 * est.eigenvalues(0));
  // fitted covariance has rank r
  EXPECT_LT(est.eigenvalues(2), 1e-9 * est.eigenvalues(0));
}

TEST(Pc, FlagsFewSamples) {
  auto spec = model::example25(8, 1.0, 1.0);
  randsrc::RngStream rng(4, 0);
  const auto data = model::simulate(spec, rng);
  EXPECT_TRUE(estimators::pc(data, 1).few_samples);
}

TEST(TopEigenspace, FlagsDegenerateSpacing) {
  const auto est = estimators::top_eigenspace(Matrix::Identity(4, 4), 2, BasisKind::OTHER);
  EXPECT_TRUE(est.spacing_degenerate);
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 3.0, 2.0, 1.0;
  EXPECT_FALSE(estimators::top_eigenspace(d, 1, BasisKind::OTHER).spacing_degenerate);
}

TEST(PfcVersusPc, PfcNoWorseOnAverage) {
  const auto spec = model::example25(40, 1.0, 1.0);
  const Basis truth(spec.gamma, BasisKind::TRUE);
  double pfc_sum = 0.0, pc_sum = 0.0;
  for (int k = 0; k < 400; ++k) {
    randsrc::RngStream rng(5, static_cast<std::uint64_t>(k));
    const auto data = model::simulate(spec, rng);
    pfc_sum += metrics::theta(estimators::pfc(data, 1).basis, truth).theta_deg;
    pc_sum += metrics::theta(estimators::pc(data, 1).basis, truth).theta_deg;
  }
  EXPECT_LT(pfc_sum, pc_sum);
}
