#include "pairscale/bt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "pairscale/errors.hpp"
#include "pairscale/normal.hpp"

namespace pairscale {

namespace {

// log(e^a + e^b) without overflow.
double log_sum_exp2(double a, double b) {
  double hi = std::max(a, b);
  double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out << ", ";
    out << ids[i];
  }
  out << '}';
  return out.str();
}

// Kosaraju strongly connected components on the "beats" digraph
// (edge i -> j iff wins(i,j) > 0).
std::vector<int> strong_components(const Eigen::MatrixXd& wins) {
  const Eigen::Index n = wins.rows();
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Eigen::Index start = 0; start < n; ++start) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    // Iterative DFS, post-order.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> stack{{start, 0}};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      bool advanced = false;
      for (Eigen::Index j = next; j < n; ++j) {
        if (wins(node, j) > 0.0 && !seen[static_cast<std::size_t>(j)]) {
          next = j + 1;
          seen[static_cast<std::size_t>(j)] = 1;
          stack.emplace_back(j, 0);
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        order.push_back(static_cast<int>(node));
        stack.pop_back();
      }
    }
  }
  std::vector<int> component(static_cast<std::size_t>(n), -1);
  int count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (component[static_cast<std::size_t>(*it)] != -1) continue;
    std::vector<Eigen::Index> stack{*it};
    component[static_cast<std::size_t>(*it)] = count;
    while (!stack.empty()) {
      Eigen::Index node = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        // Reverse edge: j beat node.
        if (wins(j, node) > 0.0 && component[static_cast<std::size_t>(j)] == -1) {
          component[static_cast<std::size_t>(j)] = count;
          stack.push_back(j);
        }
      }
    }
    ++count;
  }
  return component;
}

void check_separation(const WinTally& tally) {
  const Eigen::Index n = tally.size();
  std::vector<int> component = strong_components(tally.wins);
  int count = 1 + *std::max_element(component.begin(), component.end());
  if (count <= 1) return;

  // Condensation in-/out-degrees tell us which groups are undefeated
  // (no incoming win edge) or winless (no outgoing one).
  std::vector<char> has_in(static_cast<std::size_t>(count), 0);
  std::vector<char> has_out(static_cast<std::size_t>(count), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      auto ci = component[static_cast<std::size_t>(i)];
      auto cj = component[static_cast<std::size_t>(j)];
      if (ci != cj && tally.wins(i, j) > 0.0) {
        has_out[static_cast<std::size_t>(ci)] = 1;
        has_in[static_cast<std::size_t>(cj)] = 1;
      }
    }
  }
  std::vector<std::string> undefeated;
  std::vector<std::string> winless;
  for (Eigen::Index i = 0; i < n; ++i) {
    int c = component[static_cast<std::size_t>(i)];
    if (!has_in[static_cast<std::size_t>(c)]) undefeated.push_back(tally.entities[static_cast<std::size_t>(i)]);
    if (!has_out[static_cast<std::size_t>(c)]) winless.push_back(tally.entities[static_cast<std::size_t>(i)]);
  }
  std::ostringstream msg;
  msg << "separation: the maximum-likelihood abilities are infinite";
  if (!undefeated.empty()) msg << "; undefeated group " << join_ids(undefeated);
  if (!winless.empty()) msg << "; winless group " << join_ids(winless);
  msg << " (set a positive pseudocount to regularize exploratory fits)";
  throw SeparationError(msg.str(), std::move(undefeated), std::move(winless));
}

Eigen::MatrixXd with_pseudocount(const WinTally& tally, double pseudocount) {
  Eigen::MatrixXd w = tally.wins;
  if (pseudocount > 0.0) {
    const Eigen::Index n = w.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (tally.wins(i, j) + tally.wins(j, i) > 0.0) {
          w(i, j) += pseudocount;
          w(j, i) += pseudocount;
        }
      }
    }
  }
  return w;
}

double log_likelihood_matrix(const Eigen::MatrixXd& wins,
                             const Eigen::VectorXd& lambda) {
  const Eigen::Index n = wins.rows();
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double wij = wins(i, j);
      double wji = wins(j, i);
      if (wij + wji == 0.0) continue;
      double lse = log_sum_exp2(lambda(i), lambda(j));
      ll += wij * (lambda(i) - lse) + wji * (lambda(j) - lse);
    }
  }
  return ll;
}

}  // namespace

double bt_log_likelihood(const WinTally& tally, const Eigen::VectorXd& lambda) {
  return log_likelihood_matrix(tally.wins, lambda);
}

std::vector<std::vector<std::string>> comparison_components(const WinTally& tally) {
  const Eigen::Index n = tally.size();
  std::vector<int> component(static_cast<std::size_t>(n), -1);
  int count = 0;
  for (Eigen::Index start = 0; start < n; ++start) {
    if (component[static_cast<std::size_t>(start)] != -1) continue;
    std::vector<Eigen::Index> stack{start};
    component[static_cast<std::size_t>(start)] = count;
    while (!stack.empty()) {
      Eigen::Index node = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (component[static_cast<std::size_t>(j)] == -1 &&
            tally.wins(node, j) + tally.wins(j, node) > 0.0) {
          component[static_cast<std::size_t>(j)] = count;
          stack.push_back(j);
        }
      }
    }
    ++count;
  }
  std::vector<std::vector<std::string>> groups(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < n; ++i) {
    groups[static_cast<std::size_t>(component[static_cast<std::size_t>(i)])].push_back(
        tally.entities[static_cast<std::size_t>(i)]);
  }
  return groups;
}

ScaledScores fit_bt(const WinTally& tally, const FitConfig& config) {
  tally.check_invariants();
  if (config.max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (!(config.tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (config.pseudocount < 0.0) throw ValidationError("pseudocount must be >= 0");
  const Eigen::Index n = tally.size();
  if (n < 2) throw TooFewEntitiesError("a fit needs at least two entities");

  auto components = comparison_components(tally);
  if (components.size() > 1) {
    std::ostringstream msg;
    msg << "comparison graph is disconnected into " << components.size()
        << " components:";
    for (const auto& group : components) msg << ' ' << join_ids(group);
    throw DisconnectedGraphError(msg.str(), std::move(components));
  }
  if (config.pseudocount == 0.0) check_separation(tally);

  const Eigen::MatrixXd wins = with_pseudocount(tally, config.pseudocount);
  const Eigen::MatrixXd pair_counts = wins + wins.transpose();
  const Eigen::VectorXd total_wins = wins.rowwise().sum();

  Eigen::VectorXd gamma = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd next_gamma(n);
  bool converged = false;
  int iterations = 0;
  double previous_ll =
      config.check_ascent ? log_likelihood_matrix(wins, lambda) : 0.0;

  while (iterations < config.max_iterations) {
    ++iterations;
    for (Eigen::Index i = 0; i < n; ++i) {
      // pair_counts(i, i) is zero, so the diagonal term vanishes.
      double denom =
          (pair_counts.row(i).transpose().array() / (gamma.array() + gamma(i)))
              .sum();
      next_gamma(i) = total_wins(i) / denom;
    }
    Eigen::VectorXd next_lambda = next_gamma.array().log();
    next_lambda.array() -= next_lambda.mean();
    double change = (next_lambda - lambda).cwiseAbs().maxCoeff();
    lambda = next_lambda;
    gamma = lambda.array().exp();
    if (config.check_ascent) {
      double ll = log_likelihood_matrix(wins, lambda);
      if (ll < previous_ll - 1e-9 * (1.0 + std::fabs(previous_ll))) {
        throw EstimationError("MM iteration decreased the log-likelihood");
      }
      previous_ll = ll;
    }
    if (change < config.tolerance) {
      converged = true;
      break;
    }
  }

  ScaledScores scores;
  scores.entities = tally.entities;
  lambda.array() -= lambda.mean();
  scores.lambda = lambda;
  scores.converged = converged;
  scores.iterations = iterations;
  // Reported on the unregularized likelihood the caller asked about.
  scores.log_likelihood = bt_log_likelihood(tally, lambda);
  return scores;
}

Eigen::MatrixXd contrast_variances(const WinTally& tally,
                                   const ScaledScores& scores) {
  const Eigen::Index n = tally.size();
  if (static_cast<Eigen::Index>(scores.lambda.size()) != n) {
    throw LengthMismatchError("scores do not match the tally");
  }
  // Observed information of the Bradley-Terry log-likelihood in lambda.
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double count = tally.wins(i, j) + tally.wins(j, i);
      if (count == 0.0) continue;
      double p = sigmoid(scores.lambda(i) - scores.lambda(j));
      double w = count * p * (1.0 - p);
      info(i, i) += w;
      info(j, j) += w;
      info(i, j) -= w;
      info(j, i) -= w;
    }
  }
  // The information is singular along the all-ones direction (translation
  // invariance). Adding the projector onto that direction makes it
  // invertible without disturbing any contrast.
  Eigen::MatrixXd augmented =
      info + Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::LDLT<Eigen::MatrixXd> ldlt(augmented);
  if (ldlt.info() != Eigen::Success) {
    throw SingularInformationError(
        "Fisher information is singular on the sum-zero subspace");
  }
  Eigen::MatrixXd covariance = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
  double residual = (augmented * covariance - Eigen::MatrixXd::Identity(n, n))
                        .cwiseAbs()
                        .maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-6) {
    throw SingularInformationError(
        "Fisher information is singular on the sum-zero subspace");
  }
  Eigen::MatrixXd v(n, n);
  v.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      v(i, j) = covariance(i, i) + covariance(j, j) - 2.0 * covariance(i, j);
      if (!(v(i, j) > 0.0) || !std::isfinite(v(i, j))) {
        throw SingularInformationError(
            "nonpositive contrast variance between '" +
            tally.entities[static_cast<std::size_t>(i)] + "' and '" +
            tally.entities[static_cast<std::size_t>(j)] + "'");
      }
    }
  }
  return v;
}

QuasiVariances quasi_variances(const WinTally& tally, const ScaledScores& scores) {
  const Eigen::Index n = tally.size();
  const Eigen::MatrixXd v = contrast_variances(tally, scores);
  const Eigen::MatrixXd log_v = v.array().max(1e-300).log();

  // Start from an equal split of each entity's average contrast variance;
  // for two entities this is already the symmetric optimum.
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) sum += v(i, j);
    }
    q(i) = sum / (2.0 * static_cast<double>(n - 1));
  }

  constexpr double kRelTol = 1e-10;
  constexpr int kMaxSweeps = 10000;
  int sweeps = 0;
  for (; sweeps < kMaxSweeps; ++sweeps) {
    double worst_change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      // 1-D Newton in u = log q_i on the coordinate objective
      //   g(u) = sum_j [log(e^u + q_j) - log v_ij]^2.
      double u = std::log(q(i));
      for (int step = 0; step < 100; ++step) {
        double grad = 0.0;
        double hess = 0.0;
        double eu = std::exp(u);
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j == i) continue;
          double total = eu + q(j);
          double share = eu / total;
          double err = std::log(total) - log_v(i, j);
          grad += 2.0 * err * share;
          hess += 2.0 * (share * share + err * share * (1.0 - share));
        }
        double delta = (hess > 1e-14) ? grad / hess : (grad > 0.0 ? 0.5 : -0.5);
        delta = std::clamp(delta, -4.0, 4.0);
        u = std::clamp(u - delta, -600.0, 600.0);
        if (std::fabs(delta) < 1e-14) break;
      }
      double updated = std::exp(u);
      worst_change = std::max(worst_change, std::fabs(updated - q(i)) / q(i));
      q(i) = updated;
    }
    if (worst_change < kRelTol) break;
  }

  QuasiVariances result;
  result.q = q;
  result.sweeps = sweeps + 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double rel = std::fabs(q(i) + q(j) - v(i, j)) / v(i, j);
      result.worst_relative_error = std::max(result.worst_relative_error, rel);
    }
  }
  return result;
}

Eigen::VectorXd quasi_standard_errors(const WinTally& tally,
                                      const ScaledScores& scores) {
  return quasi_variances(tally, scores).q.cwiseSqrt();
}

ScaledScores confidence_intervals(ScaledScores scores, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ValidationError("confidence level must be in (0, 1)");
  }
  if (scores.quasi_se.size() != scores.lambda.size()) {
    throw ValidationError("quasi_se is not populated");
  }
  double z = normal_quantile(0.5 + level / 2.0);
  scores.ci_low = scores.lambda - z * scores.quasi_se;
  scores.ci_high = scores.lambda + z * scores.quasi_se;
  scores.ci_level = level;
  return scores;
}

}  // namespace pairscale
