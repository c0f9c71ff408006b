#include "pfc/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pfc::matkit {

namespace {

void fix_signs(Matrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      // strict comparison keeps the lowest index on ties
      const double a = std::abs(vectors(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors(best, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

void require_square(const Matrix& s, const char* what) {
  if (s.rows() != s.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be square, got " + std::to_string(s.rows()) + "x" +
                    std::to_string(s.cols()));
  }
}

}  // namespace

Eigen::Index Projector::rank() const {
  return static_cast<Eigen::Index>(std::llround(matrix.trace()));
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

void require_symmetric(const Matrix& s, const char* what) {
  require_square(s, what);
  require_finite(s, what);
  const double asym = s.size() == 0 ? 0.0 : (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol) {
    throw Error(ErrorCode::NotSymmetric,
                std::string(what) + " asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }
}

SymEigen sym_eig(const Matrix& s) {
  require_symmetric(s, "sym_eig input");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NonFinite, "eigensolver did not converge");
  SymEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  fix_signs(out.vectors);
  return out;
}

Vector sym_eigvals(const Matrix& s) {
  require_symmetric(s, "sym_eigvals input");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NonFinite, "eigensolver did not converge");
  return solver.eigenvalues().reverse();
}

Matrix gram(const Matrix& a) {
  Matrix g = Matrix::Zero(a.cols(), a.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

Projector projector(const Matrix& g) {
  require_finite(g, "projector input");
  if (g.cols() > g.rows() || g.cols() == 0) {
    throw Error(ErrorCode::RankDeficient, "projector needs 1 <= k <= p columns");
  }
  Eigen::JacobiSVD<Matrix> svd(g);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) {
    throw Error(ErrorCode::RankDeficient, "projector input is not of full column rank");
  }
  const Matrix q = orthonormal_columns(g);
  Matrix p = q * q.transpose();
  p = 0.5 * (p + p.transpose());
  return Projector{std::move(p)};
}

double frob_norm_sq(const Matrix& a) {
  require_finite(a, "frob_norm_sq input");
  return a.squaredNorm();
}

double op_norm(const Matrix& a) {
  require_finite(a, "op_norm input");
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

namespace {

SymEigen spd_eig(const Matrix& s) {
  SymEigen e = sym_eig(s);
  const double top = e.values(0);
  const double bottom = e.values(e.values.size() - 1);
  if (!(top > 0.0) || !(bottom > 1e-12 * top)) {
    throw Error(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
  }
  return e;
}

}  // namespace

Matrix sqrt_spd(const Matrix& s) {
  const SymEigen e = spd_eig(s);
  Matrix r = e.vectors * e.values.cwiseSqrt().asDiagonal() * e.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

Matrix inv_sqrt_spd(const Matrix& s) {
  const SymEigen e = spd_eig(s);
  Matrix r = e.vectors * e.values.cwiseSqrt().cwiseInverse().asDiagonal() * e.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

Matrix shifted_pinv(const Matrix& s, double lambda) {
  const SymEigen e = sym_eig(s);
  const double eps_zero = 1e-9 * std::max(1.0, std::abs(e.values(0)));
  Vector scale(e.values.size());
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    const double gap = e.values(j) - lambda;
    scale(j) = std::abs(gap) > eps_zero ? 1.0 / gap : 0.0;
  }
  Matrix r = e.vectors * scale.asDiagonal() * e.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

WeylReport weyl_bounds(const Matrix& b, const Matrix& l) {
  if (b.rows() != l.rows() || b.cols() != l.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "weyl_bounds operands differ in size");
  }
  require_symmetric(b, "weyl_bounds B");
  require_symmetric(l, "weyl_bounds L");
  const Vector lb = sym_eigvals(b);
  const Vector ll = sym_eigvals(l);
  const Vector lsum = sym_eigvals(b + l);
  const Eigen::Index p = lb.size();
  WeylReport report;
  report.triples.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) {
    WeylTriple t{lb(i) + ll(p - 1), lsum(i), lb(i) + ll(0)};
    if (t.value < t.lower - 1e-8 || t.value > t.upper + 1e-8) report.violated = true;
    report.triples.push_back(t);
  }
  return report;
}

Matrix orthonormal_columns(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "principal angle operands differ in p");
  // sine of the largest angle is ||(I - A A^T) B||_2 when dim A >= dim B
  const Matrix& big = a.cols() >= b.cols() ? a : b;
  const Matrix& small = a.cols() >= b.cols() ? b : a;
  const Matrix resid = small - big * (big.transpose() * small);
  return std::asin(std::min(1.0, op_norm(resid)));
}

}  // namespace pfc::matkit
