#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pairscale/entity.hpp"

namespace pairscale {

// Sample Pearson correlation. Both vectors must have the same length >= 3
// and nonzero variance.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Logistic-regression design. Column 0 of X is the intercept and
// predictor_names[0] is "Constant"; the remaining columns are the named
// predictors in order.
struct DesignMatrix {
  std::vector<std::string> predictor_names;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Eigen::Index n_obs() const { return X.rows(); }
  void check_invariants() const;
};

// Prepends the intercept column to an n x k predictor block.
DesignMatrix make_design(const std::vector<std::string>& names,
                         const Eigen::MatrixXd& predictors,
                         Eigen::VectorXd y);

struct RegressionResult {
  std::vector<std::string> predictor_names;
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  Eigen::VectorXd z;
  Eigen::VectorXd p;
  Eigen::Index n_obs = 0;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
};

double logistic_log_likelihood(const DesignMatrix& design,
                               const Eigen::VectorXd& beta);

// Maximum-likelihood logit fit via iteratively reweighted least squares with
// step halving, run to gradient-norm tolerance 1e-10. Standard errors come
// from the inverse observed information.
RegressionResult logistic_fit(const DesignMatrix& design);

// A named score vector keyed by entity id (one fitted attribute).
struct ScoreSet {
  std::string label;
  std::map<std::string, double> values;
};

struct ModelSpec {
  std::string name;
  std::vector<std::string> entity_ids;
  DesignMatrix design;
};

inline constexpr const char* kIdeologyLabel = "Ideology";
inline constexpr const char* kKipsLabel = "Knowledge Institution Pairwise Scores";
inline constexpr const char* kAipsLabel = "Agency Ideology Pairwise Scores";
inline constexpr const char* kExternalLabel = "Perceived Agency Ideology";
inline constexpr const char* kLogBudgetLabel = "log(Annual Budget)";
inline constexpr const char* kLogStaffLabel = "log(Total Staff)";
inline constexpr const char* kConstantLabel = "Constant";

// Builds a layoff-outcome design over the roster: the given score columns
// first, then log(annual_budget) and log(total_staff), plus the intercept.
ModelSpec build_layoff_design(const std::string& name,
                              const std::vector<Entity>& roster,
                              const std::vector<ScoreSet>& score_columns);

// The standard model suite, depending on which score sets are supplied:
//   "Table 2"          Ideology (AIPS) + controls
//   "Table 3 Model 1"  KIPS + controls
//   "Table 3 Model 2"  KIPS + AIPS + controls
//   "Table 3 Model 3"  KIPS + external ideology + controls
// Model 3 is built only when every entity carries external_score.
std::vector<ModelSpec> model_specs(const std::vector<Entity>& roster,
                                   const std::optional<ScoreSet>& aips,
                                   const std::optional<ScoreSet>& kips);

}  // namespace pairscale
