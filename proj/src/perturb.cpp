#include "pfc/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pfc/model.hpp"
#include "pfc/randsrc.hpp"

namespace pfc::perturb {

CovarianceSplit decompose_lemma51(const model::Dataset& data) {
  return {matkit::gram(data.X_fitted), matkit::gram(data.X_centered - data.X_fitted)};
}

PerturbSolution sibson_correction(const Matrix& s_base, const Matrix& l_pert, int i) {
  matkit::require_symmetric(s_base, "S");
  matkit::require_symmetric(l_pert, "L");
  if (s_base.rows() != l_pert.rows()) throw Error(ErrorCode::DimensionMismatch, "S and L differ in size");
  const auto p = s_base.rows();
  if (i < 0 || i >= p) throw Error(ErrorCode::InvalidParam, "eigen index out of range");

  const matkit::SymEigen base = matkit::sym_eig(s_base);
  const double lambda = base.values(i);
  double gap = std::numeric_limits<double>::infinity();
  if (i > 0) gap = std::min(gap, base.values(i - 1) - lambda);
  if (i + 1 < p) gap = std::min(gap, lambda - base.values(i + 1));
  if (!(gap > 1e-8 * std::max(1.0, std::abs(base.values(0))))) {
    throw Error(ErrorCode::IllConditioned, "eigenvalue " + std::to_string(i) + " is not simple");
  }
  const Vector e = base.vectors.col(i);

  const matkit::SymEigen pert = matkit::sym_eig(s_base + l_pert);
  Eigen::Index match = 0;
  const double overlap = (pert.vectors.transpose() * e).cwiseAbs().maxCoeff(&match);
  if (overlap < 1.0 / std::sqrt(2.0)) {
    throw Error(ErrorCode::LevelCrossing, "perturbed eigenvector cannot be matched to the base vector");
  }
  const double mu = pert.values(match) - lambda;

  const Matrix pinv = matkit::shifted_pinv(s_base, lambda);
  const Matrix shifted_l = l_pert - mu * Matrix::Identity(p, p);
  const Matrix op = Matrix::Identity(p, p) + pinv * shifted_l;
  const Vector rhs = -pinv * (l_pert * e);
  Eigen::FullPivLU<Matrix> lu(op);
  if (!lu.isInvertible()) throw Error(ErrorCode::IllConditioned, "correction operator is singular");

  PerturbSolution out;
  out.base_vec = e;
  out.correction = lu.solve(rhs);
  out.mu_shift = mu;
  out.iterations = 1;
  const Vector w = e + out.correction;
  out.residual = ((s_base + l_pert) * w - (lambda + mu) * w).norm();
  return out;
}

LemmaA2Result lemmaA2_statistic(const matkit::Projector& p_g, const Matrix& w, const Matrix& v,
                                randsrc::RngStream& rng, int reps) {
  if (reps < 2) throw Error(ErrorCode::InvalidParam, "need at least 2 replications");
  if (w.rows() != v.rows()) throw Error(ErrorCode::DimensionMismatch, "W and V must have p rows");
  const Matrix wtv = w.transpose() * v;
  const double scale = std::max(1.0, w.norm() * v.norm());
  if (wtv.size() > 0 && wtv.cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::NotOrthogonal, "W^T V must vanish");
  }
  const Matrix& pg = p_g.matrix;
  const auto n = pg.rows();
  const auto p = w.rows();

  double mean = 0.0;
  double m2 = 0.0;
  for (int k = 0; k < reps; ++k) {
    const Matrix x = rng.normal_matrix(n, p);
    const Matrix r = x * w;
    const Matrix s = x * v;
    // tr(R R^T P S S^T P) = ||R^T P S||_F^2
    const double value = (r.transpose() * pg * s).squaredNorm();
    const double delta = value - mean;
    mean += delta / (k + 1);
    m2 += delta * (value - mean);
  }
  LemmaA2Result out;
  out.sample_mean = mean;
  out.std_err = std::sqrt(m2 / (reps - 1) / reps);
  out.predicted = w.squaredNorm() * v.squaredNorm() * static_cast<double>(p_g.rank());
  return out;
}

}  // namespace pfc::perturb
