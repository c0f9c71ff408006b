#pragma once

#include <functional>
#include <optional>

#include <json.hpp>

#include "pfc/matkit.hpp"

namespace pfc::randsrc {
class RngStream;
}

// Inverse-regression generative model X_y = mu + Gamma beta f_y + sigma eps.
namespace pfc::model {

using matkit::Matrix;
using matkit::Vector;

enum class FyKind { Polynomial, Slices };

enum class ErrorLaw { Gaussian, SymmetricM4 };

struct ErrorKind {
  ErrorLaw law = ErrorLaw::Gaussian;
  double m4 = 3.0;  // fourth moment of one standardized error entry

  static ErrorKind gaussian() { return {}; }
  static ErrorKind symmetric(double m4) { return {ErrorLaw::SymmetricM4, m4}; }
};

struct ModelSpec {
  int p = 10;
  int d = 1;
  int r = 1;
  int n = 40;
  Vector mu;     // defaults to zero
  Matrix gamma;  // p x d, orthonormal columns
  Matrix beta;   // d x r, rank d
  double sigma = 1.0;
  double sigma_y = 1.0;
  FyKind fy_kind = FyKind::Polynomial;
  ErrorKind error_kind;

  /// Fills in mu = 0 and Gamma = first d canonical vectors when unset.
  void complete();
  /// Throws InvalidParam on any violated invariant.
  void validate() const;

  double fourth_moment() const { return error_kind.law == ErrorLaw::Gaussian ? 3.0 : error_kind.m4; }
};

/// Single-index setup used throughout the figures: p = 10, d = r = 1, beta = 1.
ModelSpec example25(int n, double sigma, double sigma_y);

ModelSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ModelSpec& spec);

struct Dataset {
  Vector y;
  Matrix F;           // n x r, zero column sums
  Matrix X_raw;       // n x p
  Matrix X_centered;  // n x p
  Matrix X_fitted;    // n x p, P_F X_centered
  Matrix E_true;      // n x p realized errors (sigma eps rows), oracle use only
};

struct VMatrix {
  Matrix V;  // p x r with V V^T = X_fitted^T X_fitted
};

/// Draws y_i for the response law. Defaults to normal(0, sigma_y^2).
using ResponseSampler = std::function<double(randsrc::RngStream&)>;

Matrix build_fy(const Vector& y, FyKind kind, int r);

/// One standardized error entry: variance 1, fourth moment per `kind`.
double sample_error(const ErrorKind& kind, randsrc::RngStream& rng);

Dataset simulate(const ModelSpec& spec, randsrc::RngStream& rng,
                 const ResponseSampler& responses = {});
Dataset simulate(const ModelSpec& spec, std::uint64_t seed, std::uint64_t stream_id = 0);

/// Same as simulate, but with the responses (hence F) held fixed.
Dataset simulate_given_responses(const ModelSpec& spec, const Vector& y, randsrc::RngStream& rng);

Matrix center(const Matrix& x_raw);
Matrix fit(const Matrix& x_centered, const Matrix& f);

VMatrix v_matrix(const Dataset& data);
/// V^T = (F^T F)^{-1/2} F^T X_fitted; the same matrix as v_matrix via the
/// fitted predictors instead of the centered ones.
VMatrix v_matrix_from_fitted(const Dataset& data);

}  // namespace pfc::model
