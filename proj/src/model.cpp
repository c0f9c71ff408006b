#include "pfc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "pfc/randsrc.hpp"

namespace pfc::model {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidParam, what); }

}  // namespace

void ModelSpec::complete() {
  if (mu.size() == 0) mu = Vector::Zero(p);
  if (gamma.size() == 0 && p > 0 && d > 0) gamma = Matrix::Identity(p, d);
  if (beta.size() == 0 && d > 0 && r > 0) beta = Matrix::Identity(d, r);
}

void ModelSpec::validate() const {
  if (p < 2) invalid("p must be at least 2");
  if (d < 1 || d >= p) invalid("need 1 <= d < p");
  if (r < d) invalid("need d <= r");
  if (n <= r) invalid("need n > r");
  if (fy_kind == FyKind::Slices && n < 2 * (r + 1)) invalid("slices need n >= 2(r+1)");
  // sigma = 0 is the noiseless limit and stays admissible
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) invalid("sigma must be finite and >= 0");
  if (!(sigma_y > 0.0) || !std::isfinite(sigma_y)) invalid("sigma_y must be finite and > 0");
  if (error_kind.law == ErrorLaw::SymmetricM4 && !(error_kind.m4 >= 1.0)) invalid("m4 must be >= 1");
  if (mu.size() != p) invalid("mu must have p entries");
  if (gamma.rows() != p || gamma.cols() != d) invalid("Gamma must be p x d");
  if (beta.rows() != d || beta.cols() != r) invalid("beta must be d x r");
  if (!gamma.allFinite() || !beta.allFinite() || !mu.allFinite()) invalid("non-finite model parameter");
  const Matrix gtg = gamma.transpose() * gamma;
  if ((gtg - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) invalid("Gamma columns are not orthonormal");
  Eigen::JacobiSVD<Matrix> svd(beta);
  const auto& sv = svd.singularValues();
  if (!(sv(d - 1) > 1e-10 * sv(0))) invalid("beta must have rank d");
}

ModelSpec example25(int n, double sigma, double sigma_y) {
  ModelSpec spec;
  spec.p = 10;
  spec.d = 1;
  spec.r = 1;
  spec.n = n;
  spec.sigma = sigma;
  spec.sigma_y = sigma_y;
  spec.beta = Matrix::Ones(1, 1);
  spec.complete();
  return spec;
}

namespace {

Matrix matrix_from_json(const nlohmann::json& j, int rows, int cols, const char* key) {
  // accepts a flat row-major array or an array of rows
  std::vector<double> flat;
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, std::string(key) + " must be an array");
  for (const auto& item : j) {
    if (item.is_array()) {
      for (const auto& x : item) flat.push_back(x.get<double>());
    } else {
      flat.push_back(item.get<double>());
    }
  }
  if (flat.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw Error(ErrorCode::ConfigError, std::string(key) + " has " + std::to_string(flat.size()) +
                                            " entries, expected " + std::to_string(rows * cols));
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = flat[static_cast<std::size_t>(i * cols + k)];
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) out.push_back(m(i, k));
  return out;
}

}  // namespace

ModelSpec spec_from_json(const nlohmann::json& j) {
  try {
    ModelSpec spec;
    spec.p = j.value("p", spec.p);
    spec.d = j.value("d", spec.d);
    spec.r = j.value("r", spec.r);
    spec.n = j.value("n", spec.n);
    spec.sigma = j.value("sigma", spec.sigma);
    spec.sigma_y = j.value("sigma_y", spec.sigma_y);
    if (j.contains("beta")) spec.beta = matrix_from_json(j.at("beta"), spec.d, spec.r, "beta");
    if (j.contains("gamma")) spec.gamma = matrix_from_json(j.at("gamma"), spec.p, spec.d, "gamma");
    if (j.contains("mu")) spec.mu = matrix_from_json(j.at("mu"), spec.p, 1, "mu").col(0);
    if (j.contains("fy_kind")) {
      const auto kind = j.at("fy_kind").get<std::string>();
      if (kind == "polynomial") {
        spec.fy_kind = FyKind::Polynomial;
      } else if (kind == "slices") {
        spec.fy_kind = FyKind::Slices;
      } else {
        throw Error(ErrorCode::ConfigError, "fy_kind must be \"polynomial\" or \"slices\"");
      }
    }
    if (j.contains("error_kind")) {
      const auto& ek = j.at("error_kind");
      if (ek.is_string() && ek.get<std::string>() == "gaussian") {
        spec.error_kind = ErrorKind::gaussian();
      } else if (ek.is_object() && ek.contains("m4")) {
        spec.error_kind = ErrorKind::symmetric(ek.at("m4").get<double>());
      } else {
        throw Error(ErrorCode::ConfigError, "error_kind must be \"gaussian\" or {\"m4\": value}");
      }
    }
    spec.complete();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidParam) throw Error(ErrorCode::ConfigError, e.what());
    throw;
  }
}

nlohmann::json spec_to_json(const ModelSpec& spec) {
  nlohmann::json j;
  j["p"] = spec.p;
  j["d"] = spec.d;
  j["r"] = spec.r;
  j["n"] = spec.n;
  j["sigma"] = spec.sigma;
  j["sigma_y"] = spec.sigma_y;
  j["beta"] = matrix_to_json(spec.beta);
  j["gamma"] = matrix_to_json(spec.gamma);
  j["mu"] = matrix_to_json(spec.mu);
  j["fy_kind"] = spec.fy_kind == FyKind::Polynomial ? "polynomial" : "slices";
  if (spec.error_kind.law == ErrorLaw::Gaussian) {
    j["error_kind"] = "gaussian";
  } else {
    j["error_kind"] = {{"m4", spec.error_kind.m4}};
  }
  return j;
}

Matrix build_fy(const Vector& y, FyKind kind, int r) {
  const auto n = y.size();
  if (r < 1) invalid("r must be positive");
  if (n <= r) invalid("build_fy needs n > r");
  if (!y.allFinite()) throw Error(ErrorCode::NonFinite, "responses are not finite");
  Matrix f(n, r);
  if (kind == FyKind::Polynomial) {
    Vector power = Vector::Ones(n);
    for (int u = 0; u < r; ++u) {
      power = power.cwiseProduct(y);
      f.col(u) = power.array() - power.mean();
    }
  } else {
    if (n < 2 * (r + 1)) invalid("slices need n >= 2(r+1)");
    if (y.maxCoeff() == y.minCoeff()) throw Error(ErrorCode::DegenerateResponses, "all responses are equal");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return y(a) < y(b); });
    // equal-count bins on the sorted responses; bin 0 (lowest) is dropped
    Matrix ind = Matrix::Zero(n, r);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto bin = (k * (r + 1)) / n;
      if (bin > 0) ind(order[static_cast<std::size_t>(k)], bin - 1) = 1.0;
    }
    f = ind.rowwise() - ind.colwise().mean();
  }
  Eigen::JacobiSVD<Matrix> svd(f);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || !(sv(r - 1) > 1e-10 * sv(0))) {
    throw Error(ErrorCode::DegenerateResponses, "F has column rank below r");
  }
  return f;
}

double sample_error(const ErrorKind& kind, randsrc::RngStream& rng) {
  if (kind.law == ErrorLaw::Gaussian) return rng.normal();
  const double m4 = kind.m4;
  if (m4 <= 3.0) {
    // Rademacher (m4 = 1) with probability q, standard normal otherwise
    const double q = (3.0 - m4) / 2.0;
    return rng.uniform() < q ? rng.rademacher() : rng.normal();
  }
  // normal with variance v with probability q, else +-1/sqrt(2); q solves
  // 2q^2 + (7 - 4 m4) q + 3 = 0 so that the variance is 1 and E eps^4 = m4
  const double b = 4.0 * m4 - 7.0;
  const double q = (b - std::sqrt(b * b - 24.0)) / 4.0;
  const double v = (1.0 + q) / (2.0 * q);
  if (rng.uniform() < q) return std::sqrt(v) * rng.normal();
  return rng.rademacher() * std::sqrt(0.5);
}

namespace {

Dataset assemble(const ModelSpec& spec, Vector y, randsrc::RngStream& rng) {
  Dataset data;
  data.F = build_fy(y, spec.fy_kind, spec.r);
  data.y = std::move(y);
  const auto n = spec.n;
  Matrix eps(n, spec.p);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < spec.p; ++k) eps(i, k) = sample_error(spec.error_kind, rng);
  data.E_true = spec.sigma * eps;
  data.X_raw = data.F * spec.beta.transpose() * spec.gamma.transpose() + data.E_true;
  data.X_raw.rowwise() += spec.mu.transpose();
  data.X_centered = center(data.X_raw);
  data.X_fitted = fit(data.X_centered, data.F);
  return data;
}

}  // namespace

Dataset simulate(const ModelSpec& spec, randsrc::RngStream& rng, const ResponseSampler& responses) {
  spec.validate();
  Vector y(spec.n);
  for (int i = 0; i < spec.n; ++i) y(i) = responses ? responses(rng) : spec.sigma_y * rng.normal();
  return assemble(spec, std::move(y), rng);
}

Dataset simulate(const ModelSpec& spec, std::uint64_t seed, std::uint64_t stream_id) {
  randsrc::RngStream rng(seed, stream_id);
  return simulate(spec, rng);
}

Dataset simulate_given_responses(const ModelSpec& spec, const Vector& y, randsrc::RngStream& rng) {
  spec.validate();
  if (y.size() != spec.n) throw Error(ErrorCode::DimensionMismatch, "response vector must have n entries");
  return assemble(spec, y, rng);
}

Matrix center(const Matrix& x_raw) {
  if (x_raw.rows() < 2) invalid("center needs n >= 2");
  return x_raw.rowwise() - x_raw.colwise().mean();
}

Matrix fit(const Matrix& x_centered, const Matrix& f) {
  if (f.rows() != x_centered.rows()) throw Error(ErrorCode::DimensionMismatch, "F and X differ in n");
  // F (F^T F)^{-1} F^T X without forming the n x n projector
  const Matrix ftf = matkit::gram(f);
  Eigen::LDLT<Matrix> ldlt(ftf);
  const double scale = ftf.diagonal().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
      !(ldlt.vectorD().minCoeff() > 1e-12 * scale)) {
    throw Error(ErrorCode::RankDeficient, "F is not of full column rank");
  }
  return f * ldlt.solve(f.transpose() * x_centered);
}

VMatrix v_matrix(const Dataset& data) {
  const Matrix root = matkit::inv_sqrt_spd(matkit::gram(data.F));
  return VMatrix{data.X_centered.transpose() * data.F * root};
}

VMatrix v_matrix_from_fitted(const Dataset& data) {
  const Matrix root = matkit::inv_sqrt_spd(matkit::gram(data.F));
  return VMatrix{data.X_fitted.transpose() * data.F * root};
}

}  // namespace pfc::model
