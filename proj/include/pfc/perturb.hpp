#pragma once

#include <utility>

#include "pfc/matkit.hpp"

namespace pfc::model {
struct Dataset;
}
namespace pfc::randsrc {
class RngStream;
}

// Eigenvector perturbation: the split of the sample covariance into fitted
// and residual parts, the generalized-inverse correction of an eigenvector
// under a symmetric perturbation, and the trace identity behind the PC bound.
namespace pfc::perturb {

using matkit::Matrix;
using matkit::Vector;

struct CovarianceSplit {
  Matrix fitted_cov;  // X_fitted^T X_fitted
  Matrix noise_cov;   // (X_centered - X_fitted)^T (X_centered - X_fitted)
};

CovarianceSplit decompose_lemma51(const model::Dataset& data);

/// Perturbed eigenvector base + correction of S + L with eigenvalue
/// lambda_i(S) + mu_shift. The correction is orthogonal to the base vector.
struct PerturbSolution {
  Vector base_vec;
  Vector correction;
  double mu_shift = 0.0;
  int iterations = 0;  // the correction comes from one direct solve
  double residual = 0.0;
};

/// Solves (I + (S - lambda_i I)^+ (L - mu_i I)) v = -(S - lambda_i I)^+ L e_i
/// for v, where e_i is the i-th eigenvector of S (0-based, descending order).
/// mu_i is read off the eigenvalue of S + L whose eigenvector overlaps e_i most.
PerturbSolution sibson_correction(const Matrix& s_base, const Matrix& l_pert, int i);

struct LemmaA2Result {
  double sample_mean = 0.0;
  double std_err = 0.0;
  double predicted = 0.0;
};

/// Monte Carlo mean of tr(R R^T P_G S S^T P_G) with R = X W, S = X V over
/// fresh n x p standard Gaussian X, against tr(W^T W) tr(V^T V) rank(G).
LemmaA2Result lemmaA2_statistic(const matkit::Projector& p_g, const Matrix& w, const Matrix& v,
                                randsrc::RngStream& rng, int reps);

}  // namespace pfc::perturb
