#include "pairscale/scores_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
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

double parse_double(const std::string& field, const std::string& path,
                    std::size_t line) {
  char* end = nullptr;
  double value = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw ValidationError(path + ":" + std::to_string(line) +
                          ": not a number: '" + field + "'");
  }
  return value;
}

}  // namespace

void write_scores(const std::string& path, const ScaledScores& scores) {
  const Eigen::Index n = scores.lambda.size();
  if (static_cast<Eigen::Index>(scores.entities.size()) != n ||
      scores.quasi_se.size() != n || scores.ci_low.size() != n ||
      scores.ci_high.size() != n) {
    throw ValidationError("scores are not fully populated");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (scores.lambda(a) != scores.lambda(b)) {
      return scores.lambda(a) > scores.lambda(b);
    }
    return scores.entities[static_cast<std::size_t>(a)] <
           scores.entities[static_cast<std::size_t>(b)];
  });
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write scores file: " + path);
  out << "id,lambda,quasi_se,ci_low,ci_high\n";
  for (Eigen::Index row : order) {
    out << csv_escape(scores.entities[static_cast<std::size_t>(row)]) << ','
        << fmt10(scores.lambda(row)) << ',' << fmt10(scores.quasi_se(row)) << ','
        << fmt10(scores.ci_low(row)) << ',' << fmt10(scores.ci_high(row)) << '\n';
  }
  if (!out.flush()) throw ValidationError("failed writing scores file: " + path);
}

ScoresTable read_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scores file: " + path);
  auto rows = parse_csv(in);
  if (rows.empty()) throw ValidationError("scores file is empty: " + path);
  const std::vector<std::string> header = {"id", "lambda", "quasi_se", "ci_low",
                                           "ci_high"};
  if (rows[0] != header) {
    throw ValidationError("scores file " + path +
                          " must have header id,lambda,quasi_se,ci_low,ci_high");
  }
  ScoresTable table;
  const std::size_t n = rows.size() - 1;
  table.lambda.resize(static_cast<Eigen::Index>(n));
  table.quasi_se.resize(static_cast<Eigen::Index>(n));
  table.ci_low.resize(static_cast<Eigen::Index>(n));
  table.ci_high.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 5) {
      throw ValidationError(path + ":" + std::to_string(i + 1) +
                            ": expected 5 fields");
    }
    table.ids.push_back(row[0]);
    Eigen::Index k = static_cast<Eigen::Index>(i - 1);
    table.lambda(k) = parse_double(row[1], path, i + 1);
    table.quasi_se(k) = parse_double(row[2], path, i + 1);
    table.ci_low(k) = parse_double(row[3], path, i + 1);
    table.ci_high(k) = parse_double(row[4], path, i + 1);
  }
  return table;
}

std::string metadata_path(const std::string& scores_path) {
  return scores_path + ".meta.json";
}

void write_fit_metadata(const std::string& path, const FitMetadata& meta) {
  nlohmann::ordered_json doc;
  doc["attribute"] = meta.attribute;
  doc["model_id"] = meta.model_id;
  if (!meta.template_hash.empty()) doc["template_hash"] = meta.template_hash;
  doc["toolkit_version"] = meta.toolkit_version;
  doc["rng"] = meta.rng;
  if (meta.seed) doc["seed"] = *meta.seed;
  doc["sign_flip"] = meta.sign_flip;
  doc["ci_level"] = meta.ci_level;
  doc["usable"] = meta.usable;
  doc["unusable"] = meta.unusable;
  doc["converged"] = meta.converged;
  doc["iterations"] = meta.iterations;
  doc["log_likelihood"] = meta.log_likelihood;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write metadata file: " + path);
  out << doc.dump(2) << '\n';
  if (!out.flush()) throw ValidationError("failed writing metadata: " + path);
}

std::optional<FitMetadata> read_fit_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("metadata file " + path + ": " + e.what());
  }
  FitMetadata meta;
  meta.attribute = doc.value("attribute", "");
  meta.model_id = doc.value("model_id", "");
  meta.template_hash = doc.value("template_hash", "");
  meta.toolkit_version = doc.value("toolkit_version", "");
  meta.rng = doc.value("rng", "");
  if (doc.contains("seed")) meta.seed = doc.at("seed").get<std::uint64_t>();
  meta.sign_flip = doc.value("sign_flip", false);
  meta.ci_level = doc.value("ci_level", 0.95);
  meta.usable = doc.value("usable", static_cast<std::int64_t>(0));
  meta.unusable = doc.value("unusable", static_cast<std::int64_t>(0));
  meta.converged = doc.value("converged", false);
  meta.iterations = doc.value("iterations", 0);
  meta.log_likelihood = doc.value("log_likelihood", 0.0);
  return meta;
}

}  // namespace pairscale
