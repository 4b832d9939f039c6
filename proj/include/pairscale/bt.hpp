#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "pairscale/comparison.hpp"

namespace pairscale {

struct FitConfig {
  int max_iterations = 1000;
  // Convergence is declared when the max absolute lambda change in one
  // iteration drops below this.
  double tolerance = 1e-10;
  // Optional regularization for exploratory runs: adds this many wins in
  // both directions to every compared pair, which keeps the MLE finite
  // under separation. Zero (the default) keeps the likelihood exact and
  // makes separation a hard error.
  double pseudocount = 0.0;
  // Assert per-iteration likelihood ascent (debug aid; the MM update is an
  // ascent method, so a decrease indicates a bug).
  bool check_ascent = false;
};

// Fitted abilities under the mean-zero identification, plus the
// quasi-standard-error machinery filled in by the follow-up calls.
struct ScaledScores {
  std::vector<std::string> entities;
  Eigen::VectorXd lambda;
  Eigen::VectorXd quasi_se;  // empty until populated
  Eigen::VectorXd ci_low;    // empty until populated
  Eigen::VectorXd ci_high;
  double ci_level = 0.0;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
};

// Log-likelihood of abilities on a tally:
//   sum over ordered pairs of wins(i,j) * [lambda_i - log(e^li + e^lj)].
double bt_log_likelihood(const WinTally& tally, const Eigen::VectorXd& lambda);

// Maximum-likelihood fit via the MM iteration (guaranteed-ascent fixed
// point of the Bradley-Terry likelihood), identified by mean-zero lambda.
// Throws DisconnectedGraphError and, when pseudocount is zero,
// SeparationError before iterating. A fit that runs out of iterations
// returns the best iterate with converged = false.
ScaledScores fit_bt(const WinTally& tally, const FitConfig& config = {});

struct QuasiVariances {
  Eigen::VectorXd q;  // per-entity quasi-variances
  // max over pairs of |(q_i + q_j) - v_ij| / v_ij, the usual summary of
  // how well additive quasi-variances reproduce the contrast variances.
  double worst_relative_error = 0.0;
  int sweeps = 0;
};

// Contrast variance matrix: v(i,j) = Var(lambda_i - lambda_j) from the
// inverse observed Fisher information on the sum-zero subspace.
Eigen::MatrixXd contrast_variances(const WinTally& tally,
                                   const ScaledScores& scores);

// Reference-free quasi-variances: minimizes
//   sum over pairs of [log(q_i + q_j) - log v_ij]^2
// by coordinate descent to relative tolerance 1e-10.
QuasiVariances quasi_variances(const WinTally& tally, const ScaledScores& scores);

// Square roots of the quasi-variances; populates ScaledScores::quasi_se.
Eigen::VectorXd quasi_standard_errors(const WinTally& tally,
                                      const ScaledScores& scores);

// ci = lambda -/+ z(level) * quasi_se. Requires quasi_se populated.
ScaledScores confidence_intervals(ScaledScores scores, double level);

// Connected components of the comparison graph (edges where a pair was
// compared at all), as entity-id groups in roster order.
std::vector<std::vector<std::string>> comparison_components(const WinTally& tally);

}  // namespace pairscale
