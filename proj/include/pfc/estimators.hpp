#pragma once

#include "pfc/matkit.hpp"

namespace pfc::model {
struct Dataset;
}

namespace pfc::estimators {

using matkit::Matrix;
using matkit::Vector;

enum class BasisKind { PFC, PC, TRUE, OTHER };

/// p x k matrix with orthonormal columns standing for its column span.
class Basis {
 public:
  /// Validates B^T B = I within 1e-10.
  Basis(Matrix b, BasisKind kind);

  const Matrix& matrix() const noexcept { return b_; }
  BasisKind kind() const noexcept { return kind_; }
  Eigen::Index dim() const noexcept { return b_.cols(); }
  Eigen::Index ambient() const noexcept { return b_.rows(); }

 private:
  Matrix b_;
  BasisKind kind_;
};

struct Estimate {
  Basis basis;
  Vector eigenvalues;               // full descending spectrum of the covariance
  bool spacing_degenerate = false;  // lambda_d - lambda_{d+1} < 1e-10 lambda_1
  bool few_samples = false;         // PC only: n <= p
};

/// Top-d eigenvectors of X_fitted^T X_fitted.
Estimate pfc(const model::Dataset& data, int d);

/// Top-d eigenvectors of X_centered^T X_centered.
Estimate pc(const model::Dataset& data, int d);

/// Top-d eigenvectors of an arbitrary covariance, with the same flags.
Estimate top_eigenspace(const Matrix& cov, int d, BasisKind kind);

Basis orthonormalize(const Matrix& m, BasisKind kind = BasisKind::OTHER);

}  // namespace pfc::estimators
