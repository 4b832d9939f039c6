#include "pairscale/stats.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include "pairscale/errors.hpp"
#include "pairscale/normal.hpp"

namespace pairscale {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::VectorXd column_sds(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd sds(x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    double mean = x.col(k).mean();
    double ss = (x.col(k).array() - mean).square().sum();
    sds(k) = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return sds;
}

}  // namespace

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw LengthMismatchError("pearson: vectors have different lengths");
  }
  if (x.size() < 3) {
    throw LengthMismatchError("pearson: need at least 3 observations");
  }
  Eigen::ArrayXd xc = x.array() - x.mean();
  Eigen::ArrayXd yc = y.array() - y.mean();
  double sxx = (xc * xc).sum();
  double syy = (yc * yc).sum();
  if (sxx <= 0.0) throw ConstantVectorError("pearson: first argument is constant");
  if (syy <= 0.0) throw ConstantVectorError("pearson: second argument is constant");
  double r = (xc * yc).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

void DesignMatrix::check_invariants() const {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) {
    throw LengthMismatchError("design: y length does not match X rows");
  }
  if (static_cast<Eigen::Index>(predictor_names.size()) != p) {
    throw LengthMismatchError("design: predictor_names do not match X columns");
  }
  if (p < 1 || (X.col(0).array() != 1.0).any()) {
    throw ValidationError("design: column 0 must be the intercept (all ones)");
  }
  if (!X.allFinite() || !y.allFinite()) {
    throw ValidationError("design: non-finite entry");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) {
      throw ValidationError("design: outcome must be 0 or 1");
    }
  }
  if (n <= p) {
    throw ValidationError("design: need more observations than coefficients");
  }
  for (Eigen::Index k = 1; k < p; ++k) {
    if ((X.col(k).array() == X(0, k)).all()) {
      throw ConstantVectorError("design: predictor '" + predictor_names[static_cast<std::size_t>(k)] +
                                "' is constant");
    }
  }
}

DesignMatrix make_design(const std::vector<std::string>& names,
                         const Eigen::MatrixXd& predictors,
                         Eigen::VectorXd y) {
  if (static_cast<Eigen::Index>(names.size()) != predictors.cols()) {
    throw LengthMismatchError("make_design: names do not match predictor columns");
  }
  DesignMatrix design;
  design.predictor_names.reserve(names.size() + 1);
  design.predictor_names.push_back(kConstantLabel);
  design.predictor_names.insert(design.predictor_names.end(), names.begin(),
                                names.end());
  design.X.resize(predictors.rows(), predictors.cols() + 1);
  design.X.col(0).setOnes();
  design.X.rightCols(predictors.cols()) = predictors;
  design.y = std::move(y);
  design.check_invariants();
  return design;
}

double logistic_log_likelihood(const DesignMatrix& design,
                               const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = design.X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll += design.y(i) * eta(i) - softplus(eta(i));
  }
  return ll;
}

RegressionResult logistic_fit(const DesignMatrix& design) {
  design.check_invariants();
  const Eigen::Index n = design.X.rows();
  const Eigen::Index p = design.X.cols();
  double y_sum = design.y.sum();
  if (y_sum == 0.0 || y_sum == static_cast<double>(n)) {
    throw DegenerateOutcomeError(
        y_sum == 0.0 ? "outcome is 0 for every observation"
                     : "outcome is 1 for every observation");
  }

  const Eigen::VectorXd sds = column_sds(design.X);
  // Separation always pulls some slope to infinity (an intercept alone
  // cannot separate a non-degenerate outcome), so the intercept is exempt:
  // with uncentered covariates its honest magnitude is unbounded.
  auto check_separation = [&](const Eigen::VectorXd& beta) {
    for (Eigen::Index k = 1; k < p; ++k) {
      double scale = sds(k);
      if (std::fabs(beta(k)) * scale > 30.0) {
        const std::string& name = design.predictor_names[static_cast<std::size_t>(k)];
        throw SeparationError(
            "separation: predictor '" + name +
                "' perfectly predicts the outcome (coefficient diverges)",
            name);
      }
    }
  };

  constexpr double kGradTol = 1e-10;
  constexpr int kMaxIterations = 100;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double ll = logistic_log_likelihood(design, beta);
  bool converged = false;
  int iterations = 0;
  Eigen::VectorXd mu(n);
  while (iterations < kMaxIterations) {
    Eigen::VectorXd eta = design.X * beta;
    for (Eigen::Index i = 0; i < n; ++i) mu(i) = sigmoid(eta(i));
    Eigen::VectorXd grad = design.X.transpose() * (design.y - mu);
    if (grad.norm() < kGradTol) {
      converged = true;
      break;
    }
    ++iterations;
    Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
    Eigen::MatrixXd info = design.X.transpose() * w.asDiagonal() * design.X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    Eigen::VectorXd direction = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !direction.allFinite()) {
      throw SingularInformationError(
          "observed information is singular (collinear predictors?)");
    }
    // Newton with step halving keeps the log-likelihood nondecreasing.
    double step = 1.0;
    double next_ll = ll;
    Eigen::VectorXd next_beta = beta;
    for (int half = 0; half < 60; ++half) {
      next_beta = beta + step * direction;
      next_ll = logistic_log_likelihood(design, next_beta);
      if (next_ll >= ll - 1e-12 * (1.0 + std::fabs(ll))) break;
      step *= 0.5;
    }
    assert(next_ll >= ll - 1e-9 * (1.0 + std::fabs(ll)));
    beta = next_beta;
    ll = next_ll;
    check_separation(beta);
  }

  // Standard errors from the inverse observed information at the optimum.
  Eigen::VectorXd eta = design.X * beta;
  for (Eigen::Index i = 0; i < n; ++i) mu(i) = sigmoid(eta(i));
  Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
  Eigen::MatrixXd info = design.X.transpose() * w.asDiagonal() * design.X;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  Eigen::MatrixXd covariance = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  if (ldlt.info() != Eigen::Success || !covariance.allFinite()) {
    throw SingularInformationError(
        "observed information is singular at the optimum");
  }

  RegressionResult result;
  result.predictor_names = design.predictor_names;
  result.beta = beta;
  result.se.resize(p);
  result.z.resize(p);
  result.p.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    double var = covariance(k, k);
    if (!(var > 0.0) || !std::isfinite(var)) {
      throw SingularInformationError(
          "nonpositive variance for coefficient '" +
          design.predictor_names[static_cast<std::size_t>(k)] + "'");
    }
    result.se(k) = std::sqrt(var);
    result.z(k) = beta(k) / result.se(k);
    result.p(k) = normal_two_sided_p(result.z(k));
  }
  result.n_obs = n;
  result.converged = converged;
  result.iterations = iterations;
  result.log_likelihood = ll;
  return result;
}

ModelSpec build_layoff_design(const std::string& name,
                              const std::vector<Entity>& roster,
                              const std::vector<ScoreSet>& score_columns) {
  const Eigen::Index n = static_cast<Eigen::Index>(roster.size());
  const Eigen::Index k = static_cast<Eigen::Index>(score_columns.size()) + 2;
  Eigen::MatrixXd predictors(n, k);
  Eigen::VectorXd y(n);
  std::vector<std::string> names;
  for (const auto& column : score_columns) names.push_back(column.label);
  names.push_back(kLogBudgetLabel);
  names.push_back(kLogStaffLabel);

  for (Eigen::Index row = 0; row < n; ++row) {
    const Entity& entity = roster[static_cast<std::size_t>(row)];
    if (!entity.covariates.layoff) {
      throw MissingCovariateError(entity.id, "layoff");
    }
    y(row) = static_cast<double>(*entity.covariates.layoff);
    for (std::size_t c = 0; c < score_columns.size(); ++c) {
      auto it = score_columns[c].values.find(entity.id);
      if (it == score_columns[c].values.end()) {
        throw MissingCovariateError(entity.id, score_columns[c].label);
      }
      predictors(row, static_cast<Eigen::Index>(c)) = it->second;
    }
    if (!entity.covariates.annual_budget) {
      throw MissingCovariateError(entity.id, "annual_budget");
    }
    if (!entity.covariates.total_staff) {
      throw MissingCovariateError(entity.id, "total_staff");
    }
    if (*entity.covariates.annual_budget <= 0.0 ||
        *entity.covariates.total_staff <= 0.0) {
      throw NonPositiveCovariateError("entity '" + entity.id +
                                      "' has a nonpositive budget or staff");
    }
    predictors(row, k - 2) = std::log(*entity.covariates.annual_budget);
    predictors(row, k - 1) = std::log(*entity.covariates.total_staff);
  }

  ModelSpec spec;
  spec.name = name;
  for (const auto& entity : roster) spec.entity_ids.push_back(entity.id);
  spec.design = make_design(names, predictors, std::move(y));
  return spec;
}

std::vector<ModelSpec> model_specs(const std::vector<Entity>& roster,
                                   const std::optional<ScoreSet>& aips,
                                   const std::optional<ScoreSet>& kips) {
  std::vector<ModelSpec> specs;
  if (aips) {
    ScoreSet ideology{kIdeologyLabel, aips->values};
    specs.push_back(build_layoff_design("Table 2", roster, {ideology}));
  }
  if (kips) {
    ScoreSet knowledge{kKipsLabel, kips->values};
    specs.push_back(build_layoff_design("Table 3 Model 1", roster, {knowledge}));
    if (aips) {
      ScoreSet ideology{kAipsLabel, aips->values};
      specs.push_back(
          build_layoff_design("Table 3 Model 2", roster, {knowledge, ideology}));
    }
    std::size_t with_external = 0;
    for (const auto& entity : roster) {
      if (entity.covariates.external_score) ++with_external;
    }
    if (with_external == roster.size() && !roster.empty()) {
      ScoreSet external{kExternalLabel, {}};
      for (const auto& entity : roster) {
        external.values[entity.id] = *entity.covariates.external_score;
      }
      specs.push_back(
          build_layoff_design("Table 3 Model 3", roster, {knowledge, external}));
    } else if (with_external > 0) {
      for (const auto& entity : roster) {
        if (!entity.covariates.external_score) {
          throw MissingCovariateError(entity.id, "external_score");
        }
      }
    }
  }
  return specs;
}

}  // namespace pairscale
