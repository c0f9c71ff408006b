#include "pfc/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "pfc/bounds.hpp"
#include "pfc/error.hpp"
#include "pfc/estimators.hpp"
#include "pfc/experiment.hpp"
#include "pfc/matkit.hpp"
#include "pfc/metrics.hpp"
#include "pfc/model.hpp"
#include "pfc/parallel.hpp"
#include "pfc/perturb.hpp"
#include "pfc/randsrc.hpp"
#include "pfc/stats.hpp"

namespace pfc::expcli {

namespace {

using matkit::Matrix;
using matkit::Vector;

// Family tags keep the suites on unrelated streams of the same user seed.
enum Family : std::uint64_t {
  kSpan = 1,
  kMoments23,
  kMoments31,
  kIdentity,
  kWeyl,
  kTail,
  kGeman,
  kKs,
  kCoverage,
  kTrace,
  kSandwich,
};

model::ModelSpec random_spec(int p, int d, int n, randsrc::RngStream& rng) {
  model::ModelSpec spec;
  spec.p = p;
  spec.d = d;
  spec.r = d;
  spec.n = n;
  spec.gamma = matkit::orthonormal_columns(rng.normal_matrix(p, d));
  spec.beta = rng.normal_matrix(d, d) + 2.0 * Matrix::Identity(d, d);
  spec.sigma = 0.5 + rng.uniform();
  spec.sigma_y = 0.5 + 1.5 * rng.uniform();
  spec.complete();
  spec.validate();
  return spec;
}

// Standard error of a sample variance: std-err of the squared deviations.
double variance_std_err(const std::vector<double>& xs) {
  const double m = stats::mean(xs);
  std::vector<double> sq(xs.size());
  std::transform(xs.begin(), xs.end(), sq.begin(), [m](double x) { return (x - m) * (x - m); });
  return stats::std_err(sq);
}

// Span of V against the top-r eigenspace of the fitted covariance.
CheckReport lemma22_span(std::uint64_t seed, int) {
  const std::uint64_t fam = randsrc::derive_seed(seed, kSpan);
  double worst = 0.0;
  int cases = 0;
  for (int p : {6, 10}) {
    for (int d : {1, 2}) {
      for (int k = 0; k < 50; ++k) {
        randsrc::RngStream rng(fam, static_cast<std::uint64_t>(cases++));
        const auto spec = random_spec(p, d, 50, rng);
        const auto data = model::simulate(spec, rng);
        const Matrix span_v = matkit::orthonormal_columns(model::v_matrix(data).V);
        const auto top = estimators::top_eigenspace(matkit::gram(data.X_fitted), d, estimators::BasisKind::PFC);
        worst = std::max(worst, matkit::max_principal_angle(span_v, top.basis.matrix()));
      }
    }
  }
  CheckReport rep;
  rep.stats = {{"cases", cases}, {"max_angle_rad", worst}};
  rep.passed = worst < 1e-7;
  return rep;
}

// Entries of V given F: mean Gamma beta (F^T F)^{1/2}, variance sigma^2, uncorrelated.
CheckReport lemma23_moments(std::uint64_t seed, int threads) {
  const std::uint64_t fam = randsrc::derive_seed(seed, kMoments23);
  constexpr int kReps = 2000;
  randsrc::RngStream setup(fam, 0);
  auto spec = random_spec(5, 2, 40, setup);
  spec.sigma = 1.3;
  Vector y(spec.n);
  for (int i = 0; i < spec.n; ++i) y(i) = spec.sigma_y * setup.normal();
  const Matrix f = model::build_fy(y, spec.fy_kind, spec.r);
  const Matrix mean_v = spec.gamma * spec.beta * matkit::sqrt_spd(matkit::gram(f));
  const auto entries = static_cast<std::size_t>(spec.p * spec.r);

  std::vector<std::vector<double>> draws(entries, std::vector<double>(kReps));
  parallel_for(kReps, threads, [&](std::size_t k) {
    randsrc::RngStream rng(fam, k + 1);
    const Matrix v = model::v_matrix(model::simulate_given_responses(spec, y, rng)).V;
    for (std::size_t e = 0; e < entries; ++e) draws[e][k] = v.reshaped()(static_cast<Eigen::Index>(e));
  });

  const double s2 = spec.sigma * spec.sigma;
  double worst_mean_z = 0.0, worst_var_z = 0.0, worst_cov_z = 0.0;
  std::vector<std::vector<double>> centered(entries);
  for (std::size_t e = 0; e < entries; ++e) {
    const double target = mean_v.reshaped()(static_cast<Eigen::Index>(e));
    worst_mean_z = std::max(worst_mean_z, std::abs(stats::mean(draws[e]) - target) / stats::std_err(draws[e]));
    worst_var_z = std::max(worst_var_z, std::abs(stats::variance(draws[e]) - s2) / variance_std_err(draws[e]));
    const double m = stats::mean(draws[e]);
    centered[e].resize(kReps);
    for (int k = 0; k < kReps; ++k) centered[e][k] = draws[e][k] - m;
  }
  std::vector<double> prod(kReps);
  for (std::size_t a = 0; a < entries; ++a) {
    for (std::size_t b = a + 1; b < entries; ++b) {
      for (int k = 0; k < kReps; ++k) prod[k] = centered[a][k] * centered[b][k];
      worst_cov_z = std::max(worst_cov_z, std::abs(stats::mean(prod)) / stats::std_err(prod));
    }
  }
  CheckReport rep;
  rep.stats = {{"reps", kReps},
               {"max_mean_z", worst_mean_z},
               {"max_var_z", worst_var_z},
               {"max_cov_z", worst_cov_z}};
  rep.passed = worst_mean_z < 4.0 && worst_var_z < 4.0 && worst_cov_z < 4.0;
  return rep;
}

// N and D over fixed F for one error law.
void moments_for(const model::ErrorKind& law, const std::string& tag, std::uint64_t fam, int threads,
                 CheckReport& rep) {
  constexpr int kReps = 20000;
  randsrc::RngStream setup(fam, 0);
  auto spec = random_spec(8, 2, 40, setup);
  spec.sigma = 1.0;
  spec.error_kind = law;
  Vector y(spec.n);
  for (int i = 0; i < spec.n; ++i) y(i) = spec.sigma_y * setup.normal();
  const Matrix f = model::build_fy(y, spec.fy_kind, spec.r);
  const auto moments = bounds::lemma31_moments(spec, matkit::gram(f));
  const Matrix pg = spec.gamma * spec.gamma.transpose();

  std::vector<double> ns(kReps), ds(kReps);
  parallel_for(kReps, threads, [&](std::size_t k) {
    randsrc::RngStream rng(fam, k + 1);
    const Matrix v = model::v_matrix(model::simulate_given_responses(spec, y, rng)).V;
    const Matrix signal = pg * v;
    ns[k] = signal.squaredNorm();
    ds[k] = (v - signal).squaredNorm();
  });
  const double mean_n_z = std::abs(stats::mean(ns) - moments.mean_n) / stats::std_err(ns);
  const double mean_d_z = std::abs(stats::mean(ds) - moments.mean_d) / stats::std_err(ds);
  // one-sided: positive means the variance exceeds its bound
  const double var_n_z = (stats::variance(ns) - moments.var_n_bound) / variance_std_err(ns);
  const double var_d_z = (stats::variance(ds) - moments.var_d_bound) / variance_std_err(ds);
  rep.stats.insert(rep.stats.end(), {{tag + "_mean_n_z", mean_n_z},
                                     {tag + "_mean_d_z", mean_d_z},
                                     {tag + "_var_n_excess_z", var_n_z},
                                     {tag + "_var_d_excess_z", var_d_z}});
  rep.passed = rep.passed && mean_n_z < 4.0 && mean_d_z < 4.0 && var_n_z < 3.0 && var_d_z < 3.0;
}

CheckReport lemma31_moments(std::uint64_t seed, int threads) {
  CheckReport rep;
  rep.passed = true;
  moments_for(model::ErrorKind::gaussian(), "gaussian", randsrc::derive_seed(seed, kMoments31), threads, rep);
  moments_for(model::ErrorKind::symmetric(9.0), "m4_9", randsrc::derive_seed(seed, kMoments31 + 100), threads, rep);
  return rep;
}

CheckReport lemma51_identity(std::uint64_t seed, int) {
  const std::uint64_t fam = randsrc::derive_seed(seed, kIdentity);
  double worst_sum = 0.0, worst_cross = 0.0;
  for (int k = 0; k < 200; ++k) {
    randsrc::RngStream rng(fam, static_cast<std::uint64_t>(k));
    const int p = 3 + static_cast<int>(rng.uniform() * 10);
    const int d = 1 + static_cast<int>(rng.uniform() * std::min(3, p - 1));
    const auto spec = random_spec(p, d, 20 + static_cast<int>(rng.uniform() * 80), rng);
    const auto data = model::simulate(spec, rng);
    const auto split = perturb::decompose_lemma51(data);
    const Matrix total = matkit::gram(data.X_centered);
    const double scale = total.norm();
    worst_sum = std::max(worst_sum, (total - split.fitted_cov - split.noise_cov).norm() / scale);
    const Matrix cross = data.X_fitted.transpose() * (data.X_centered - data.X_fitted);
    worst_cross = std::max(worst_cross, cross.norm() / scale);
  }
  CheckReport rep;
  rep.stats = {{"datasets", 200}, {"max_rel_identity_err", worst_sum}, {"max_rel_cross_term", worst_cross}};
  rep.passed = worst_sum < 1e-9 && worst_cross < 1e-9;
  return rep;
}

CheckReport weyl(std::uint64_t seed, int) {
  const std::uint64_t fam = randsrc::derive_seed(seed, kWeyl);
  int violations = 0;
  double worst_slack = 0.0;  // most negative margin, as a positive number
  for (int k = 0; k < 1000; ++k) {
    randsrc::RngStream rng(fam, static_cast<std::uint64_t>(k));
    const int p = 2 + static_cast<int>(rng.uniform() * 11);
    const Matrix a = rng.normal_matrix(p, p), b = rng.normal_matrix(p, p);
    const double scale = std::exp(2.0 * rng.normal());
    const Matrix s = 0.5 * (a + a.transpose());
    const Matrix l = scale * 0.5 * (b + b.transpose());
    const auto report = matkit::weyl_bounds(s, l);
    if (report.violated) ++violations;
    for (const auto& t : report.triples) {
      worst_slack = std::max({worst_slack, t.lower - t.value, t.value - t.upper});
    }
  }
  CheckReport rep;
  rep.stats = {{"pairs", 1000}, {"violations", violations}, {"max_excess", worst_slack}};
  rep.passed = violations == 0;
  return rep;
}

CheckReport eq8_tail(std::uint64_t seed, int threads) {
  const std::uint64_t fam = randsrc::derive_seed(seed, kTail);
  constexpr int kDraws = 10000;
  constexpr int u = 20, v = 20;
  std::vector<double> l1(kDraws);
  parallel_for(kDraws, threads, [&](std::size_t k) {
    randsrc::RngStream rng(fam, k);
    l1[k] = randsrc::sample_wishart_lambda1(u, v, rng);
  });
  CheckReport rep;
  int violations = 0;
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    const double edge = std::pow(std::sqrt(u) + std::sqrt(v) + t, 2);
    const double hits = static_cast<double>(std::count_if(l1.begin(), l1.end(), [&](double x) { return x >= edge; }));
    const double p_hat = hits / kDraws;
    const double se = std::sqrt(p_hat * (1.0 - p_hat) / kDraws);
    const double bound = randsrc::ds_tail_bound(u, v, t);
    std::ostringstream name;
    name << "t" << t;
    rep.stats.emplace_back(name.str() + "_empirical", p_hat);
    rep.stats.emplace_back(name.str() + "_bound", bound);
    if (p_hat > bound + 2.0 * se) ++violations;
  }
  rep.stats.emplace_back("violations", violations);
  rep.passed = violations == 0;
  return rep;
}

CheckReport geman(std::uint64_t seed, int) {
  const std::uint64_t fam = randsrc::derive_seed(seed, kGeman);
  constexpr int u = 1000, v = 2000;
  const double limit = std::pow(1.0 + std::sqrt(0.5), 2);
  int inside = 0;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    randsrc::RngStream rng(fam, static_cast<std::uint64_t>(k));
    const double rel = std::abs(randsrc::sample_wishart_lambda1(u, v, rng) / v - limit) / limit;
    worst = std::max(worst, rel);
    if (rel < 0.05) ++inside;
  }
  CheckReport rep;
  rep.stats = {{"limit", limit}, {"within_5pct", inside}, {"max_rel_dev", worst}};
  rep.passed = inside == 10;
  return rep;
}

CheckReport thm24_ks(std::uint64_t seed, int threads) {
  const std::uint64_t fam = randsrc::derive_seed(seed, kKs);
  constexpr int kReps = 10000;
  const auto spec = model::example25(40, 1.0, 1.0);
  CheckReport rep;
  rep.passed = true;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto direct = thm24_angles(spec, kReps, randsrc::derive_seed(fam, 2 * s), threads);
    const auto pipe = pipeline_angles(spec, kReps, randsrc::derive_seed(fam, 2 * s + 1), threads);
    const auto ks = stats::ks_two_sample(pipe.pfc_deg, direct);
    const std::string tag = "seed" + std::to_string(s);
    rep.stats.emplace_back(tag + "_ks_stat", ks.statistic);
    rep.stats.emplace_back(tag + "_p_value", ks.p_value);
    rep.passed = rep.passed && ks.p_value >= 0.01;
  }
  return rep;
}

CheckReport thm33_coverage(std::uint64_t seed, int threads) {
  const std::uint64_t fam = randsrc::derive_seed(seed, kCoverage);
  constexpr double kAlpha = 0.1;
  constexpr int kReps = 5000;
  auto limits = [&](int n) {
    const auto spec = model::example25(n, 1.0, 1.0);
    const double phi = spec.sigma_y * spec.sigma_y;
    // The moment report only feeds T here; F^T F enters through K1 and K2.
    const auto moments = bounds::lemma31_moments(spec, Matrix::Constant(1, 1, phi * n));
    return bounds::theorem33(kAlpha, n, 0.9 * phi, 1.1 * phi, moments, spec);
  };

  const auto spec = model::example25(10000, 1.0, 1.0);
  const auto ci = limits(spec.n);
  const estimators::Basis truth(spec.gamma, estimators::BasisKind::TRUE);
  std::vector<double> theta(kReps);
  parallel_for(kReps, threads, [&](std::size_t k) {
    randsrc::RngStream rng(fam, k);
    theta[k] = metrics::theta(estimators::pfc(model::simulate(spec, rng), 1).basis, truth).theta_rad;
  });
  const double plus = ci.theta_plus_rad.value_or(std::numbers::pi / 2);
  // An undefined lower limit (X_- <= 0) claims nothing: no replication falls below it.
  const double minus = ci.theta_minus_rad.value_or(-1.0);
  const double above = static_cast<double>(std::count_if(theta.begin(), theta.end(), [&](double t) { return t >= plus; })) / kReps;
  const double below = static_cast<double>(std::count_if(theta.begin(), theta.end(), [&](double t) { return t <= minus; })) / kReps;
  const double se_above = std::sqrt(above * (1.0 - above) / kReps);
  const double se_below = std::sqrt(below * (1.0 - below) / kReps);

  std::vector<double> scaled;
  for (int n : {10000, 40000, 160000}) {
    const auto c = limits(n);
    scaled.push_back(c.theta_plus_rad.value_or(std::numbers::pi / 2) * std::sqrt(static_cast<double>(n)));
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  const double spread = (*hi - *lo) / *lo;

  CheckReport rep;
  rep.stats = {{"theta_plus_deg", plus * 180.0 / std::numbers::pi},
               {"theta_minus_defined", ci.theta_minus_rad ? 1.0 : 0.0},
               {"x_minus", ci.x_minus},
               {"p_above_plus", above},
               {"p_below_minus", below},
               {"sqrt_n_theta_plus_1e4", scaled[0]},
               {"sqrt_n_theta_plus_4e4", scaled[1]},
               {"sqrt_n_theta_plus_16e4", scaled[2]},
               {"sqrt_n_spread", spread}};
  rep.passed = ci.theta_plus_rad.has_value() && above <= kAlpha + 3.0 * se_above &&
               below <= kAlpha + 3.0 * se_below && spread < 0.10;
  return rep;
}

CheckReport lemmaA2(std::uint64_t seed, int threads) {
  const std::uint64_t fam = randsrc::derive_seed(seed, kTrace);
  constexpr int kTriples = 20;
  constexpr int kReps = 10000;
  std::vector<double> z(kTriples);
  parallel_for(kTriples, threads, [&](std::size_t k) {
    randsrc::RngStream rng(fam, k);
    const int n = 4 + static_cast<int>(rng.uniform() * 6);
    const int p = 3 + static_cast<int>(rng.uniform() * 5);
    const int kw = 1 + static_cast<int>(rng.uniform() * (p - 1));
    const int kv = 1 + static_cast<int>(rng.uniform() * (p - kw));
    const int g = 1 + static_cast<int>(rng.uniform() * n);
    // W and V live in complementary coordinates of a random rotation.
    const Matrix q = matkit::orthonormal_columns(rng.normal_matrix(p, p));
    const Matrix w = q.leftCols(kw) * rng.normal_matrix(kw, kw);
    const Matrix v = q.middleCols(kw, kv) * rng.normal_matrix(kv, kv);
    const auto pg = matkit::projector(rng.normal_matrix(n, std::min(g, n)));
    const auto res = perturb::lemmaA2_statistic(pg, w, v, rng, kReps);
    z[k] = std::abs(res.sample_mean - res.predicted) / res.std_err;
  });
  CheckReport rep;
  const double worst = *std::max_element(z.begin(), z.end());
  rep.stats = {{"triples", kTriples}, {"reps", kReps}, {"max_z", worst}};
  rep.passed = worst < 4.0;
  return rep;
}

CheckReport sandwich(std::uint64_t seed, int) {
  const std::uint64_t fam = randsrc::derive_seed(seed, kSandwich);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    randsrc::RngStream rng(fam, static_cast<std::uint64_t>(k));
    const int p = 3 + static_cast<int>(rng.uniform() * 10);
    const int d = 1 + static_cast<int>(rng.uniform() * std::min(3, p - 1));
    const auto spec = random_spec(p, d, 20 + static_cast<int>(rng.uniform() * 80), rng);
    const auto split = perturb::decompose_lemma51(model::simulate(spec, rng));
    const Vector fitted = matkit::sym_eigvals(split.fitted_cov);
    const Vector total = matkit::sym_eigvals(split.fitted_cov + split.noise_cov);
    const double noise1 = matkit::sym_eigvals(split.noise_cov)(0);
    const double tol = 1e-8 * std::max(1.0, total(0));
    for (Eigen::Index i = 0; i < total.size(); ++i) {
      worst = std::max({worst, (fitted(i) - total(i)) / tol, (total(i) - fitted(i) - noise1) / tol});
    }
  }
  CheckReport rep;
  rep.stats = {{"datasets", 200}, {"max_excess_over_tol", worst}};
  rep.passed = worst <= 1.0;
  return rep;
}

using SuiteFn = std::function<CheckReport(std::uint64_t, int)>;

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> suites = {
      {"lemma22_span", lemma22_span}, {"lemma23_moments", lemma23_moments}, {"lemma31_moments", lemma31_moments},
      {"lemma51_identity", lemma51_identity}, {"weyl", weyl}, {"eq8_tail", eq8_tail}, {"geman", geman},
      {"thm24_ks", thm24_ks}, {"thm33_coverage", thm33_coverage}, {"lemmaA2", lemmaA2}, {"sandwich", sandwich},
  };
  return suites;
}

}  // namespace

double CheckReport::stat(const std::string& name) const {
  for (const auto& [key, value] : stats)
    if (key == name) return value;
  throw Error(ErrorCode::InvalidParam, "no statistic named " + name);
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["passed"] = passed;
  nlohmann::json s = nlohmann::json::object();
  for (const auto& [key, value] : stats) s[key] = value;
  j["stats"] = s;
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

CheckReport run_checks(const std::string& suite, std::uint64_t seed, int threads) {
  const auto& suites = registry();
  const auto it = suites.find(suite);
  if (it == suites.end()) throw Error(ErrorCode::UnknownSuite, "unknown check suite \"" + suite + "\"");
  CheckReport rep = it->second(seed, threads);
  rep.suite = suite;
  return rep;
}

}  // namespace pfc::expcli
