#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pfc/error.hpp"

// Dense symmetric linear algebra shared by every other module.
namespace pfc::matkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTol = 1e-10;

/// Eigendecomposition of a real symmetric matrix.
///
/// `values` is non-increasing and column i of `vectors` pairs with values[i].
/// Each eigenvector is scaled so that its largest-magnitude entry is positive
/// (lowest index wins a tie), which makes the output deterministic.
struct SymEigen {
  Vector values;
  Matrix vectors;
};

/// Orthogonal projector P = G (G^T G)^{-1} G^T.
struct Projector {
  Matrix matrix;
  Eigen::Index rank() const;
};

void require_finite(const Matrix& a, const char* what);
void require_symmetric(const Matrix& s, const char* what);

SymEigen sym_eig(const Matrix& s);

/// Eigenvalues only, descending. Same preconditions as sym_eig.
Vector sym_eigvals(const Matrix& s);

/// A^T A with the lower triangle mirrored, so the result is exactly symmetric.
Matrix gram(const Matrix& a);

Projector projector(const Matrix& g);

double frob_norm_sq(const Matrix& a);
double op_norm(const Matrix& a);

Matrix sqrt_spd(const Matrix& s);
Matrix inv_sqrt_spd(const Matrix& s);

/// Generalized inverse of (S - lambda I): eigen-directions with
/// |lambda_j - lambda| <= 1e-9 * max(1, |lambda_1(S)|) are annihilated.
Matrix shifted_pinv(const Matrix& s, double lambda);

struct WeylTriple {
  double lower;
  double value;
  double upper;
};

struct WeylReport {
  std::vector<WeylTriple> triples;
  bool violated = false;  // some bound missed by more than 1e-8
};

/// lambda_i(B) + lambda_p(L) <= lambda_i(B + L) <= lambda_i(B) + lambda_1(L).
WeylReport weyl_bounds(const Matrix& b, const Matrix& l);

/// Thin orthonormal basis for the column span of m (Householder QR).
Matrix orthonormal_columns(const Matrix& m);

/// Cosines of principal angles are the singular values of A^T B; returns the
/// largest principal angle in radians. Both inputs must be orthonormal.
double max_principal_angle(const Matrix& a, const Matrix& b);

}  // namespace pfc::matkit
