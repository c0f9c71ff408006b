#include "pfc/estimators.hpp"

#include <string>

#include "pfc/model.hpp"

namespace pfc::estimators {

Basis::Basis(Matrix b, BasisKind kind) : b_(std::move(b)), kind_(kind) {
  matkit::require_finite(b_, "basis");
  if (b_.cols() == 0 || b_.cols() > b_.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "basis must be p x k with 1 <= k <= p");
  }
  const Matrix btb = b_.transpose() * b_;
  if ((btb - Matrix::Identity(b_.cols(), b_.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::InvalidParam, "basis columns are not orthonormal");
  }
}

Estimate top_eigenspace(const Matrix& cov, int d, BasisKind kind) {
  if (d < 1 || d > cov.rows()) throw Error(ErrorCode::InvalidParam, "need 1 <= d <= p");
  matkit::SymEigen eig = matkit::sym_eig(cov);
  bool degenerate = false;
  if (d < eig.values.size()) {
    degenerate = eig.values(d - 1) - eig.values(d) < 1e-10 * eig.values(0);
  }
  Basis basis(eig.vectors.leftCols(d), kind);
  return Estimate{std::move(basis), std::move(eig.values), degenerate, false};
}

Estimate pfc(const model::Dataset& data, int d) {
  if (d > data.F.cols()) throw Error(ErrorCode::InvalidParam, "PFC needs d <= r");
  // surfaces NotPositiveDefinite for a singular F^T F
  static_cast<void>(matkit::inv_sqrt_spd(matkit::gram(data.F)));
  return top_eigenspace(matkit::gram(data.X_fitted), d, BasisKind::PFC);
}

Estimate pc(const model::Dataset& data, int d) {
  Estimate est = top_eigenspace(matkit::gram(data.X_centered), d, BasisKind::PC);
  est.few_samples = data.X_centered.rows() <= data.X_centered.cols();
  return est;
}

Basis orthonormalize(const Matrix& m, BasisKind kind) {
  matkit::require_finite(m, "orthonormalize input");
  if (m.cols() == 0 || m.cols() > m.rows()) throw Error(ErrorCode::RankDeficient, "need 1 <= k <= p columns");
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) throw Error(ErrorCode::RankDeficient, "columns are linearly dependent");
  return Basis(matkit::orthonormal_columns(m), kind);
}

}  // namespace pfc::estimators
