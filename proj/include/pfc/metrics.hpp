#pragma once

#include "pfc/estimators.hpp"

// Accuracy of an estimated subspace against the truth. All functionals take
// orthonormal Basis values, which pins the column scaling of the estimate.
namespace pfc::metrics {

struct AngleSample {
  double c_value = 0.0;  // may be +infinity
  double theta_rad = 0.0;
  double theta_deg = 0.0;
};

/// Angle with cot^2(theta) = c, theta in [0, pi/2].
AngleSample angle_from_c(double c);

/// ||P_truth est||_F^2 / ||(I - P_truth) est||_F^2, +infinity when the
/// denominator is below 1e-14 times the numerator.
double c_ratio(const estimators::Basis& est, const estimators::Basis& truth);

AngleSample theta(const estimators::Basis& est, const estimators::Basis& truth);

/// Frobenius norm of (I - P_truth) est.
double m_metric(const estimators::Basis& est, const estimators::Basis& truth);

/// Operator norm of P_truth - P_est.
double projector_distance(const estimators::Basis& est, const estimators::Basis& truth);

}  // namespace pfc::metrics
