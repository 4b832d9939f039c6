#include "pairscale/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pairscale/errors.hpp"
#include "pairscale/text.hpp"

namespace pairscale {

namespace {

std::string fmt10(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

std::string fmt_fixed(double value) {
  char buffer[48];
  double magnitude = std::fabs(value);
  if (magnitude != 0.0 && (magnitude >= 1e6 || magnitude < 1e-4)) {
    std::snprintf(buffer, sizeof(buffer), "%.4g", value);
  } else {
    std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  }
  return buffer;
}

}  // namespace

CorrelationTable correlation_table(const std::vector<std::string>& labels,
                                   const std::vector<Eigen::VectorXd>& columns) {
  if (labels.size() != columns.size()) {
    throw LengthMismatchError("correlation table: labels do not match columns");
  }
  if (columns.size() < 2) {
    throw ValidationError("correlation table needs at least two columns");
  }
  const Eigen::Index k = static_cast<Eigen::Index>(columns.size());
  CorrelationTable table;
  table.labels = labels;
  table.r.resize(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    table.r(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < k; ++j) {
      double r = pearson(columns[static_cast<std::size_t>(i)],
                         columns[static_cast<std::size_t>(j)]);
      table.r(i, j) = r;
      table.r(j, i) = r;
    }
  }
  return table;
}

std::string format_correlation_csv(const CorrelationTable& table) {
  std::ostringstream out;
  out << "label";
  for (const auto& label : table.labels) out << ',' << csv_escape(label);
  out << '\n';
  for (Eigen::Index i = 0; i < table.r.rows(); ++i) {
    out << csv_escape(table.labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < table.r.cols(); ++j) {
      out << ',' << fmt10(table.r(i, j));
    }
    out << '\n';
  }
  return out.str();
}

std::string format_correlation_text(const CorrelationTable& table) {
  std::size_t width = 5;
  for (const auto& label : table.labels) width = std::max(width, label.size());
  std::ostringstream out;
  out << "Correlations\n";
  for (Eigen::Index i = 0; i < table.r.rows(); ++i) {
    const std::string& label = table.labels[static_cast<std::size_t>(i)];
    out << label << std::string(width - label.size() + 2, ' ');
    for (Eigen::Index j = 0; j < table.r.cols(); ++j) {
      char buffer[16];
      std::snprintf(buffer, sizeof(buffer), "%6.3f", table.r(i, j));
      out << buffer << (j + 1 < table.r.cols() ? "  " : "");
    }
    out << '\n';
  }
  return out.str();
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::string format_regression_text(const std::string& title,
                                   const RegressionResult& result) {
  // Paper row order: named predictors first, the intercept last.
  std::vector<Eigen::Index> rows;
  for (Eigen::Index k = 1; k < result.beta.size(); ++k) rows.push_back(k);
  rows.push_back(0);

  std::size_t width = 12;
  for (const auto& name : result.predictor_names) {
    width = std::max(width, name.size());
  }
  std::ostringstream out;
  out << title << '\n';
  out << std::string(width + 24, '-') << '\n';
  for (Eigen::Index k : rows) {
    const std::string& name = result.predictor_names[static_cast<std::size_t>(k)];
    std::string coef = fmt_fixed(result.beta(k)) + significance_stars(result.p(k));
    std::string se = "(" + fmt_fixed(result.se(k)) + ")";
    out << name << std::string(width - name.size() + 2, ' ');
    out << coef;
    std::size_t pad = coef.size() < 14 ? 14 - coef.size() : 1;
    out << std::string(pad, ' ') << se << '\n';
  }
  out << std::string(width + 24, '-') << '\n';
  out << "Observations" << std::string(width - 12 + 2, ' ') << result.n_obs
      << '\n';
  out << "*p<0.05; **p<0.01; ***p<0.001\n";
  return out.str();
}

std::string format_regression_csv(const RegressionResult& result) {
  std::ostringstream out;
  out << "predictor,beta,se,z,p,stars\n";
  for (Eigen::Index k = 1; k < result.beta.size(); ++k) {
    out << csv_escape(result.predictor_names[static_cast<std::size_t>(k)]) << ','
        << fmt10(result.beta(k)) << ',' << fmt10(result.se(k)) << ','
        << fmt10(result.z(k)) << ',' << fmt10(result.p(k)) << ','
        << significance_stars(result.p(k)) << '\n';
  }
  out << csv_escape(result.predictor_names[0]) << ',' << fmt10(result.beta(0))
      << ',' << fmt10(result.se(0)) << ',' << fmt10(result.z(0)) << ','
      << fmt10(result.p(0)) << ',' << significance_stars(result.p(0)) << '\n';
  return out.str();
}

}  // namespace pairscale
