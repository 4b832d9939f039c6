#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "pairscale/stats.hpp"

namespace pairscale {

struct CorrelationTable {
  std::vector<std::string> labels;
  Eigen::MatrixXd r;
};

// Pairwise Pearson correlations among equally long columns.
CorrelationTable correlation_table(const std::vector<std::string>& labels,
                                   const std::vector<Eigen::VectorXd>& columns);

std::string format_correlation_csv(const CorrelationTable& table);
std::string format_correlation_text(const CorrelationTable& table);

// "***" p<0.001, "**" p<0.01, "*" p<0.05, "" otherwise.
std::string significance_stars(double p);

// Paper-style block: one row per predictor with coefficient, stars and the
// standard error in parentheses; Constant last; observation count and the
// star legend at the bottom.
std::string format_regression_text(const std::string& title,
                                   const RegressionResult& result);

// predictor,beta,se,z,p,stars at full precision.
std::string format_regression_csv(const RegressionResult& result);

}  // namespace pairscale
