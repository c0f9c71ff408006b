#include "pfc/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace pfc::metrics {

using estimators::Basis;
using matkit::Matrix;

namespace {

void check_pair(const Basis& est, const Basis& truth) {
  if (est.ambient() != truth.ambient()) throw Error(ErrorCode::DimensionMismatch, "bases live in different R^p");
  if (truth.dim() >= truth.ambient()) throw Error(ErrorCode::DimensionMismatch, "truth must have d < p columns");
}

// est split into its components inside and outside span(truth)
struct Split {
  Matrix inside;
  Matrix outside;
};

Split split(const Basis& est, const Basis& truth) {
  check_pair(est, truth);
  const Matrix& g = truth.matrix();
  Matrix inside = g * (g.transpose() * est.matrix());
  Matrix outside = est.matrix() - inside;
  return {std::move(inside), std::move(outside)};
}

}  // namespace

AngleSample angle_from_c(double c) {
  AngleSample s;
  s.c_value = c;
  // theta = arccot(sqrt c); atan2 covers c = 0 and c = +inf exactly
  s.theta_rad = std::atan2(1.0, std::sqrt(c));
  s.theta_deg = s.theta_rad * 180.0 / std::numbers::pi;
  return s;
}

double c_ratio(const Basis& est, const Basis& truth) {
  const Split parts = split(est, truth);
  const double num = parts.inside.squaredNorm();
  const double den = parts.outside.squaredNorm();
  if (den < 1e-14 * num) return std::numeric_limits<double>::infinity();
  return num / den;
}

AngleSample theta(const Basis& est, const Basis& truth) { return angle_from_c(c_ratio(est, truth)); }

double m_metric(const Basis& est, const Basis& truth) { return split(est, truth).outside.norm(); }

double projector_distance(const Basis& est, const Basis& truth) {
  check_pair(est, truth);
  const Matrix diff = truth.matrix() * truth.matrix().transpose() - est.matrix() * est.matrix().transpose();
  return matkit::op_norm(diff);
}

}  // namespace pfc::metrics
