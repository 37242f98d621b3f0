#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sentclust/error.hpp"
#include "sentclust/eval.hpp"
#include "sentclust/label.hpp"
#include "sentclust/random.hpp"

namespace sentclust {

enum class CovarianceType { Full, Diagonal, Tied, Spherical };

inline constexpr std::string_view to_string(CovarianceType t) {
  switch (t) {
    case CovarianceType::Full: return "full";
    case CovarianceType::Diagonal: return "diagonal";
    case CovarianceType::Tied: return "tied";
    case CovarianceType::Spherical: return "spherical";
  }
  return "?";
}

inline CovarianceType parse_covariance_type(std::string_view s) {
  for (auto t : {CovarianceType::Full, CovarianceType::Diagonal, CovarianceType::Tied,
                 CovarianceType::Spherical}) {
    if (s == to_string(t)) return t;
  }
  if (s == "diag") return CovarianceType::Diagonal;
  throw DataError("unknown covariance type '" + std::string(s) + "'");
}

struct GmmConfig {
  CovarianceType covariance_type = CovarianceType::Full;
  /// Stop once the mean log-likelihood changes by less than this.
  double tol = 1e-3;
  int max_iter = 100;
  double reg_covar = 1e-6;
  std::uint64_t seed = 0;
  int n_init = 1;

  void validate() const {
    if (!(tol > 0.0)) throw DataError("gmm: tol must be > 0");
    if (max_iter <= 0) throw DataError("gmm: max_iter must be > 0");
    if (!(reg_covar >= 0.0)) throw DataError("gmm: reg_covar must be >= 0");
    if (n_init < 1) throw DataError("gmm: n_init must be >= 1");
  }
};

/// Mixture parameters. Covariance storage depends on the type:
///   full       4 matrices, D x D
///   tied       1 matrix,   D x D
///   diagonal   4 matrices, D x 1 (the variances)
///   spherical  4 matrices, 1 x 1
/// `binding[k]` is the label that component k stands for.
struct GmmParams {
  CovarianceType covariance_type = CovarianceType::Full;
  std::size_t feature_dim = 0;
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(kNumClasses);
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  std::array<SentimentLabel, kNumClasses> binding = kAllLabels;

  /// Shape and distribution checks; throws DataError.
  void validate() const {
    const auto d = static_cast<Eigen::Index>(feature_dim);
    if (feature_dim == 0) throw DataError("gmm: feature_dim must be > 0");
    if (weights.size() != static_cast<Eigen::Index>(kNumClasses) || means.size() != kNumClasses) {
      throw DataError("gmm: expected 4 components");
    }
    if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-9) {
      throw DataError("gmm: weights must be a probability distribution");
    }
    for (const auto& m : means) {
      if (m.size() != d) throw DataError("gmm: mean has wrong dimension");
    }
    const std::size_t expected = covariance_type == CovarianceType::Tied ? 1 : kNumClasses;
    if (covariances.size() != expected) throw DataError("gmm: wrong number of covariances");
    for (const auto& c : covariances) {
      const bool ok = [&] {
        switch (covariance_type) {
          case CovarianceType::Full:
          case CovarianceType::Tied: return c.rows() == d && c.cols() == d;
          case CovarianceType::Diagonal: return c.rows() == d && c.cols() == 1;
          case CovarianceType::Spherical: return c.rows() == 1 && c.cols() == 1;
        }
        return false;
      }();
      if (!ok) throw DataError("gmm: covariance has wrong shape");
    }
  }
};

struct FitReport {
  double final_log_likelihood = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  /// Mean per-sample log-likelihood: entry 0 is the starting point, then one
  /// entry per EM iteration.
  std::vector<double> per_iteration_ll;
  int best_init = 0;
};

namespace gmm_detail {

inline constexpr double kLog2Pi = 1.8378770664093454836;

/// Precomputed pieces of one component's log-density.
struct ComponentDensity {
  double log_norm = 0.0;  // -0.5 * (D log 2pi + log det)
  Eigen::MatrixXd chol_lower;  // full / tied
  Eigen::VectorXd inv_var;     // diagonal
  double inv_sph = 0.0;        // spherical
};

inline void throw_not_pd(std::size_t k) {
  throw NumericalError("gmm: covariance of component " + std::to_string(k) +
                       " is not positive-definite; increase reg_covar");
}

inline std::vector<ComponentDensity> prepare(const GmmParams& p) {
  const double d = static_cast<double>(p.feature_dim);
  std::vector<ComponentDensity> out(kNumClasses);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    auto& cd = out[k];
    switch (p.covariance_type) {
      case CovarianceType::Full:
      case CovarianceType::Tied: {
        const auto& cov = p.covariances[p.covariance_type == CovarianceType::Tied ? 0 : k];
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) throw_not_pd(k);
        cd.chol_lower = llt.matrixL();
        const auto diag = cd.chol_lower.diagonal();
        if (!(diag.array() > 0.0).all() || !diag.allFinite()) throw_not_pd(k);
        const double log_det = 2.0 * diag.array().log().sum();
        cd.log_norm = -0.5 * (d * kLog2Pi + log_det);
        break;
      }
      case CovarianceType::Diagonal: {
        const Eigen::VectorXd var = p.covariances[k].col(0);
        if (!(var.array() > 0.0).all() || !var.allFinite()) throw_not_pd(k);
        cd.inv_var = var.cwiseInverse();
        cd.log_norm = -0.5 * (d * kLog2Pi + var.array().log().sum());
        break;
      }
      case CovarianceType::Spherical: {
        const double var = p.covariances[k](0, 0);
        if (!(var > 0.0) || !std::isfinite(var)) throw_not_pd(k);
        cd.inv_sph = 1.0 / var;
        cd.log_norm = -0.5 * d * (kLog2Pi + std::log(var));
        break;
      }
    }
  }
  return out;
}

/// N x 4 matrix of log(pi_k) + log N(x_n | mu_k, Sigma_k).
inline Eigen::MatrixXd weighted_log_prob(const GmmParams& p, const Eigen::MatrixXd& x) {
  const auto dens = prepare(p);
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(kNumClasses));
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    const Eigen::MatrixXd diff = x.rowwise() - p.means[k].transpose();
    Eigen::VectorXd maha;
    switch (p.covariance_type) {
      case CovarianceType::Full:
      case CovarianceType::Tied: {
        const Eigen::MatrixXd solved =
            dens[k].chol_lower.triangularView<Eigen::Lower>().solve(diff.transpose());
        maha = solved.colwise().squaredNorm().transpose();
        break;
      }
      case CovarianceType::Diagonal:
        maha = (diff.array().square().rowwise() * dens[k].inv_var.transpose().array())
                   .rowwise()
                   .sum()
                   .matrix();
        break;
      case CovarianceType::Spherical:
        maha = diff.rowwise().squaredNorm() * dens[k].inv_sph;
        break;
    }
    const double log_w = std::log(p.weights(col));  // -inf for an empty component
    out.col(col) = (dens[k].log_norm + log_w) - 0.5 * maha.array();
  }
  return out;
}

/// Elementwise std::exp. Eigen's vectorized exp clamps very negative inputs,
/// which would give empty components a denormal instead of zero mass.
inline Eigen::MatrixXd exp_exact(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double v) { return std::exp(v); });
}

/// Row-wise log-sum-exp.
inline Eigen::VectorXd log_sum_exp_rows(const Eigen::MatrixXd& m) {
  Eigen::VectorXd out(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double mx = m.row(r).maxCoeff();
    if (!std::isfinite(mx)) {
      out(r) = mx;
      continue;
    }
    double sum = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) sum += std::exp(m(r, c) - mx);
    out(r) = mx + std::log(sum);
  }
  return out;
}

struct EStep {
  Eigen::MatrixXd log_resp;
  double mean_ll = 0.0;
};

inline EStep e_step(const GmmParams& p, const Eigen::MatrixXd& x) {
  EStep e;
  e.log_resp = weighted_log_prob(p, x);
  const Eigen::VectorXd norm = log_sum_exp_rows(e.log_resp);
  e.mean_ll = norm.mean();
  if (!std::isfinite(e.mean_ll)) {
    throw NumericalError("gmm: log-likelihood is not finite");
  }
  e.log_resp.colwise() -= norm;
  return e;
}

/// Weighted mean / covariance / weight updates.
inline GmmParams m_step(const GmmParams& prev, const Eigen::MatrixXd& x,
                        const Eigen::MatrixXd& resp, double reg_covar) {
  GmmParams p;
  p.covariance_type = prev.covariance_type;
  p.feature_dim = prev.feature_dim;
  p.binding = prev.binding;
  const auto d = x.cols();
  const double n = static_cast<double>(x.rows());
  const Eigen::RowVectorXd nk =
      resp.colwise().sum().array() + 10.0 * std::numeric_limits<double>::epsilon();
  p.weights = (nk / nk.sum()).transpose();
  p.means.resize(kNumClasses);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    p.means[k] = (x.transpose() * resp.col(c)) / nk(c);
  }
  const Eigen::MatrixXd reg = reg_covar * Eigen::MatrixXd::Identity(d, d);
  switch (p.covariance_type) {
    case CovarianceType::Full:
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        const auto c = static_cast<Eigen::Index>(k);
        const Eigen::MatrixXd diff = x.rowwise() - p.means[k].transpose();
        Eigen::MatrixXd cov =
            (diff.array().colwise() * resp.col(c).array()).matrix().transpose() * diff / nk(c);
        cov = 0.5 * (cov + cov.transpose()) + reg;
        p.covariances.push_back(std::move(cov));
      }
      break;
    case CovarianceType::Tied: {
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        const auto c = static_cast<Eigen::Index>(k);
        const Eigen::MatrixXd diff = x.rowwise() - p.means[k].transpose();
        cov += (diff.array().colwise() * resp.col(c).array()).matrix().transpose() * diff;
      }
      cov /= n;
      p.covariances.push_back(0.5 * (cov + cov.transpose()) + reg);
      break;
    }
    case CovarianceType::Diagonal:
    case CovarianceType::Spherical:
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        const auto c = static_cast<Eigen::Index>(k);
        const Eigen::MatrixXd diff = x.rowwise() - p.means[k].transpose();
        Eigen::VectorXd var =
            (diff.array().square().colwise() * resp.col(c).array()).colwise().sum().transpose() /
            nk(c);
        var.array() += reg_covar;
        if (p.covariance_type == CovarianceType::Diagonal) {
          p.covariances.emplace_back(var);
        } else {
          p.covariances.emplace_back(Eigen::MatrixXd::Constant(1, 1, var.mean()));
        }
      }
      break;
  }
  return p;
}

inline void check_features(const GmmParams& p, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != p.feature_dim) {
    throw DataError("gmm: features have " + std::to_string(x.cols()) +
                    " columns, model expects " + std::to_string(p.feature_dim));
  }
}

/// Population variance per column.
inline Eigen::VectorXd column_variance(const Eigen::MatrixXd& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return ((x.rowwise() - mean).array().square().colwise().sum() / double(x.rows()))
      .transpose();
}

}  // namespace gmm_detail

/// One component per class, estimated from the labelled rows. Component k is
/// bound to label k. Single-row classes get (reg_covar + global variance) * I.
inline GmmParams init_supervised(const Eigen::MatrixXd& features,
                                 std::span<const SentimentLabel> labels,
                                 const GmmConfig& config = {}) {
  config.validate();
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("gmm: " + std::to_string(features.rows()) + " feature rows vs " +
                    std::to_string(labels.size()) + " labels");
  }
  if (features.cols() == 0) throw DataError("gmm: features have no columns");
  const auto d = features.cols();
  const double n = static_cast<double>(features.rows());

  std::array<std::vector<Eigen::Index>, kNumClasses> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    rows[index_of(labels[i])].push_back(static_cast<Eigen::Index>(i));
  }
  for (auto label : kAllLabels) {
    if (rows[index_of(label)].empty()) {
      throw DataError("gmm: class '" + std::string(to_string(label)) + "' has no examples");
    }
  }

  const double global_var = gmm_detail::column_variance(features).mean();
  const double fallback = config.reg_covar + global_var;
  const Eigen::MatrixXd reg = config.reg_covar * Eigen::MatrixXd::Identity(d, d);

  GmmParams p;
  p.covariance_type = config.covariance_type;
  p.feature_dim = static_cast<std::size_t>(d);
  p.means.resize(kNumClasses);
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto& r = rows[k];
    Eigen::MatrixXd xk(static_cast<Eigen::Index>(r.size()), d);
    for (std::size_t i = 0; i < r.size(); ++i) {
      xk.row(static_cast<Eigen::Index>(i)) = features.row(r[i]);
    }
    const double nk = static_cast<double>(r.size());
    p.weights(static_cast<Eigen::Index>(k)) = nk / n;
    p.means[k] = xk.colwise().mean().transpose();
    const Eigen::MatrixXd diff = xk.rowwise() - p.means[k].transpose();
    const bool single = r.size() == 1;
    switch (config.covariance_type) {
      case CovarianceType::Full: {
        if (single) {
          p.covariances.push_back(fallback * Eigen::MatrixXd::Identity(d, d));
        } else {
          p.covariances.push_back(diff.transpose() * diff / nk + reg);
        }
        break;
      }
      case CovarianceType::Tied:
        pooled += diff.transpose() * diff;
        break;
      case CovarianceType::Diagonal: {
        if (single) {
          p.covariances.emplace_back(Eigen::VectorXd::Constant(d, fallback));
        } else {
          Eigen::VectorXd var = diff.array().square().colwise().sum().transpose() / nk;
          var.array() += config.reg_covar;
          p.covariances.emplace_back(var);
        }
        break;
      }
      case CovarianceType::Spherical: {
        const double var =
            single ? fallback
                   : diff.array().square().sum() / (nk * static_cast<double>(d)) + config.reg_covar;
        p.covariances.emplace_back(Eigen::MatrixXd::Constant(1, 1, var));
        break;
      }
    }
  }
  if (config.covariance_type == CovarianceType::Tied) {
    p.covariances.push_back(pooled / n + reg);
  }
  return p;
}

/// Mean per-sample log-likelihood of the data under the mixture.
inline double log_likelihood(const GmmParams& params, const Eigen::MatrixXd& features) {
  gmm_detail::check_features(params, features);
  return gmm_detail::log_sum_exp_rows(gmm_detail::weighted_log_prob(params, features)).mean();
}

namespace gmm_detail {

struct RunResult {
  GmmParams params;
  FitReport report;
};

inline RunResult run_em(const Eigen::MatrixXd& x, GmmParams params, const GmmConfig& config) {
  RunResult out;
  auto e = e_step(params, x);
  out.report.per_iteration_ll.push_back(e.mean_ll);
  for (int it = 1; it <= config.max_iter; ++it) {
    params = m_step(params, x, exp_exact(e.log_resp), config.reg_covar);
    e = e_step(params, x);
    const double prev = out.report.per_iteration_ll.back();
    out.report.per_iteration_ll.push_back(e.mean_ll);
    out.report.iterations = it;
    if (std::abs(e.mean_ll - prev) < config.tol) {
      out.report.converged = true;
      break;
    }
  }
  out.report.final_log_likelihood = out.report.per_iteration_ll.back();
  out.params = std::move(params);
  return out;
}

}  // namespace gmm_detail

struct FitResult {
  GmmParams params;
  FitReport report;
};

/// Expectation-maximization from `init`. With n_init > 1, runs 2..n_init
/// start from the init means plus seeded Gaussian noise (0.1 x column std);
/// the run with the highest final log-likelihood wins, earliest on ties.
/// The component/label binding of `init` is kept.
inline FitResult fit_em(const Eigen::MatrixXd& features, const GmmParams& init,
                        const GmmConfig& config = {}) {
  config.validate();
  init.validate();
  gmm_detail::check_features(init, features);
  if (features.rows() < static_cast<Eigen::Index>(kNumClasses)) {
    throw DataError("gmm: need at least 4 rows to fit, got " + std::to_string(features.rows()));
  }
  if (init.covariance_type != config.covariance_type) {
    throw DataError("gmm: init covariance type differs from config");
  }
  const Eigen::VectorXd noise_scale = 0.1 * gmm_detail::column_variance(features).cwiseSqrt();

  std::optional<gmm_detail::RunResult> best;
  std::exception_ptr last_error;
  for (int run = 0; run < config.n_init; ++run) {
    GmmParams start = init;
    if (run > 0) {
      Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(run)));
      for (auto& mean : start.means) {
        for (Eigen::Index j = 0; j < mean.size(); ++j) mean(j) += noise_scale(j) * rng.normal();
      }
    }
    try {
      auto result = gmm_detail::run_em(features, std::move(start), config);
      result.report.best_init = run;
      if (!best || result.report.final_log_likelihood > best->report.final_log_likelihood) {
        best = std::move(result);
      }
    } catch (const DataError&) {
      // A perturbed restart may fail on its own; only give up if all do.
      last_error = std::current_exception();
    }
  }
  if (!best) std::rethrow_exception(last_error);
  return {std::move(best->params), std::move(best->report)};
}

/// Posterior component probabilities; every row sums to 1.
inline Eigen::MatrixXd predict_proba(const GmmParams& params, const Eigen::MatrixXd& features) {
  gmm_detail::check_features(params, features);
  Eigen::MatrixXd log_prob = gmm_detail::weighted_log_prob(params, features);
  const Eigen::VectorXd norm = gmm_detail::log_sum_exp_rows(log_prob);
  if (!norm.allFinite()) throw NumericalError("gmm: density underflow for some rows");
  log_prob.colwise() -= norm;
  Eigen::MatrixXd resp = gmm_detail::exp_exact(log_prob);
  resp.array().colwise() /= resp.rowwise().sum().array();
  return resp;
}

/// Argmax per row, ties to the lowest component, mapped through `binding`.
inline std::vector<SentimentLabel> argmax_labels(
    const Eigen::MatrixXd& responsibilities,
    const std::array<SentimentLabel, kNumClasses>& binding = kAllLabels) {
  std::vector<SentimentLabel> out;
  out.reserve(static_cast<std::size_t>(responsibilities.rows()));
  for (Eigen::Index r = 0; r < responsibilities.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < responsibilities.cols(); ++k) {
      if (responsibilities(r, k) > responsibilities(r, best)) best = k;
    }
    out.push_back(binding[static_cast<std::size_t>(best)]);
  }
  return out;
}

inline std::vector<SentimentLabel> predict(const GmmParams& params,
                                           const Eigen::MatrixXd& features) {
  return argmax_labels(predict_proba(params, features), params.binding);
}

/// covariance type x reg_covar {1e-6, 1e-4, 1e-2} x n_init {1, 5}.
inline std::vector<GmmConfig> default_grid(const GmmConfig& base = {}) {
  std::vector<GmmConfig> grid;
  for (auto type : {CovarianceType::Full, CovarianceType::Diagonal, CovarianceType::Tied,
                    CovarianceType::Spherical}) {
    for (double reg : {1e-6, 1e-4, 1e-2}) {
      for (int n_init : {1, 5}) {
        GmmConfig c = base;
        c.covariance_type = type;
        c.reg_covar = reg;
        c.n_init = n_init;
        grid.push_back(c);
      }
    }
  }
  return grid;
}

struct GridEntry {
  GmmConfig config;
  /// Macro-F1 on the fitting data, or -1 when the fit failed.
  double score = -1.0;
  std::string error;
};

struct GridResult {
  GmmParams best;
  GmmConfig best_config;
  FitReport best_report;
  std::vector<GridEntry> scores;
};

/// Fits every config from the supervised init and scores it by Macro-F1 on
/// the same rows it was fitted on. Failed fits score -1.
inline GridResult grid_search(const Eigen::MatrixXd& features,
                              std::span<const SentimentLabel> labels,
                              std::span<const GmmConfig> grid,
                              MacroAverage average = MacroAverage::AllClasses) {
  if (grid.empty()) throw DataError("gmm: empty hyperparameter grid");
  GridResult result;
  std::optional<std::size_t> best_index;
  for (const auto& config : grid) {
    GridEntry entry{config, -1.0, {}};
    try {
      auto init = init_supervised(features, labels, config);
      auto fit = fit_em(features, init, config);
      entry.score = macro_f1(labels, predict(fit.params, features), average);
      if (!best_index || entry.score > result.scores[*best_index].score) {
        best_index = result.scores.size();
        result.best = std::move(fit.params);
        result.best_config = config;
        result.best_report = std::move(fit.report);
      }
    } catch (const DataError& e) {
      entry.error = e.what();
    }
    result.scores.push_back(std::move(entry));
  }
  if (!best_index) {
    throw DataError("gmm: every grid configuration failed (first error: " +
                    result.scores.front().error + ")");
  }
  return result;
}

// Serialization -------------------------------------------------------------

inline nlohmann::ordered_json to_json(const GmmConfig& c) {
  return {{"covariance_type", std::string(to_string(c.covariance_type))},
          {"tol", c.tol},
          {"max_iter", c.max_iter},
          {"reg_covar", c.reg_covar},
          {"seed", c.seed},
          {"n_init", c.n_init}};
}

/// Missing keys keep the values from `base`.
inline GmmConfig gmm_config_from_json(const nlohmann::json& j, GmmConfig base = {}) {
  if (!j.is_object()) throw DataError("gmm config must be a JSON object");
  try {
    if (j.contains("covariance_type")) {
      base.covariance_type = parse_covariance_type(j.at("covariance_type").get<std::string>());
    }
    if (j.contains("tol")) base.tol = j.at("tol").get<double>();
    if (j.contains("max_iter")) base.max_iter = j.at("max_iter").get<int>();
    if (j.contains("reg_covar")) base.reg_covar = j.at("reg_covar").get<double>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_init")) base.n_init = j.at("n_init").get<int>();
    if (j.contains("n_components") && j.at("n_components").get<int>() != 4) {
      throw DataError("gmm: n_components is fixed at 4");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("gmm config: ") + e.what());
  }
  base.validate();
  return base;
}

inline nlohmann::ordered_json to_json(const GmmParams& p) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::ordered_json j;
  j["covariance_type"] = std::string(to_string(p.covariance_type));
  j["feature_dim"] = p.feature_dim;
  j["n_components"] = kNumClasses;
  std::vector<std::string> binding;
  for (auto l : p.binding) binding.emplace_back(to_string(l));
  j["class_binding"] = binding;
  j["weights"] = vec(p.weights);
  auto means = nlohmann::ordered_json::array();
  for (const auto& m : p.means) means.push_back(vec(m));
  j["means"] = std::move(means);
  auto covs = nlohmann::ordered_json::array();
  for (const auto& c : p.covariances) {
    switch (p.covariance_type) {
      case CovarianceType::Full:
      case CovarianceType::Tied: {
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < c.rows(); ++r) rows.push_back(vec(c.row(r).transpose()));
        covs.push_back(std::move(rows));
        break;
      }
      case CovarianceType::Diagonal: covs.push_back(vec(c.col(0))); break;
      case CovarianceType::Spherical: covs.push_back(c(0, 0)); break;
    }
  }
  j["covariances"] = std::move(covs);
  return j;
}

inline GmmParams gmm_params_from_json(const nlohmann::json& j) {
  auto to_vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  GmmParams p;
  try {
    p.covariance_type = parse_covariance_type(j.at("covariance_type").get<std::string>());
    p.feature_dim = j.at("feature_dim").get<std::size_t>();
    if (j.contains("class_binding")) {
      const auto names = j.at("class_binding").get<std::vector<std::string>>();
      if (names.size() != kNumClasses) throw DataError("gmm: class_binding needs 4 labels");
      for (std::size_t k = 0; k < kNumClasses; ++k) p.binding[k] = parse_label(names[k]);
    }
    p.weights = to_vec(j.at("weights"));
    for (const auto& m : j.at("means")) p.means.push_back(to_vec(m));
    for (const auto& c : j.at("covariances")) {
      switch (p.covariance_type) {
        case CovarianceType::Full:
        case CovarianceType::Tied: {
          const auto d = static_cast<Eigen::Index>(c.size());
          Eigen::MatrixXd m(d, d);
          for (Eigen::Index r = 0; r < d; ++r) {
            const auto row = to_vec(c.at(static_cast<std::size_t>(r)));
            if (row.size() != d) throw DataError("gmm: covariance must be square");
            m.row(r) = row.transpose();
          }
          p.covariances.push_back(std::move(m));
          break;
        }
        case CovarianceType::Diagonal: p.covariances.emplace_back(to_vec(c)); break;
        case CovarianceType::Spherical:
          p.covariances.emplace_back(Eigen::MatrixXd::Constant(1, 1, c.get<double>()));
          break;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("gmm params: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace sentclust
