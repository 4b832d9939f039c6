#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>

#include "pairscale/bt.hpp"
#include "pairscale/cache.hpp"
#include "pairscale/client.hpp"
#include "pairscale/entity.hpp"
#include "pairscale/errors.hpp"
#include "pairscale/report.hpp"
#include "pairscale/rng.hpp"
#include "pairscale/schedule.hpp"
#include "pairscale/scores_io.hpp"
#include "pairscale/stats.hpp"
#include "pairscale/synth.hpp"
#include "pairscale/text.hpp"
#include "pairscale/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ElicitOptions {
  std::string roster_path;
  std::string attribute = "ideology-liberal";
  bool attribute_given = false;
  std::string template_path;
  std::string cache_path;
  std::string out_dir = ".";
  std::string base_url = "https://api.openai.com/v1";
  std::string model;
  int repeats = 3;
  std::uint64_t seed = 0;
  int max_concurrency = 8;
  int max_retries = 3;
  double timeout_s = 120.0;
  double unusable_threshold = 0.05;
  bool mock = false;
  double mock_gap = 1.0;
  double tie_rate = 0.0;
  double garbage_rate = 0.0;
};

struct FitOptions {
  std::string cache_path;
  std::string roster_path;
  std::string attribute = "ideology-liberal";
  std::string model;
  std::string out_dir = ".";
  bool sign_flip = false;
  double pseudocount = 0.0;
  double ci_level = 0.95;
};

struct AnalyzeOptions {
  std::vector<std::string> scores_paths;
  std::string roster_path;
  std::string out_dir = ".";
  std::string spec = "all";
};

struct SynthOptions {
  int n = 10;
  int repeats = 3;
  std::uint64_t seed = 0;
  double tie_rate = 0.0;
  double spread = 2.0;
  std::string attribute = pairscale::kSynthAttribute;
  std::string out_dir = ".";
};

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw pairscale::ValidationError("cannot create output directory " + dir +
                                     ": " + ec.message());
  }
}

std::string attribute_slug(const std::string& attribute) {
  std::string slug;
  for (char c : attribute) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      slug += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      slug += '_';
    }
  }
  return slug.empty() ? "attribute" : slug;
}

// The elicit sidecar (<cache>.meta.json) keeps one entry per
// (attribute, model) run so fit can recover the seed and template hash.
void update_elicit_metadata(const std::string& cache_path,
                            const pairscale::PromptTemplate& tpl,
                            const std::string& model, std::uint64_t seed,
                            int repeats) {
  const std::string path = cache_path + ".meta.json";
  json doc;
  {
    std::ifstream in(path);
    if (in) {
      try {
        in >> doc;
      } catch (const json::exception&) {
        doc = json();
      }
    }
  }
  if (!doc.is_object() || !doc.contains("runs") || !doc["runs"].is_array()) {
    doc = json{{"runs", json::array()}};
  }
  json run{{"attribute", tpl.attribute},
           {"model_id", model},
           {"seed", seed},
           {"repeats", repeats},
           {"template_hash", pairscale::template_hash(tpl)},
           {"toolkit_version", pairscale::kToolkitVersion},
           {"rng", std::string(pairscale::kRngName)}};
  json runs = json::array();
  for (const auto& existing : doc["runs"]) {
    if (existing.value("attribute", "") == tpl.attribute &&
        existing.value("model_id", "") == model) {
      continue;
    }
    runs.push_back(existing);
  }
  runs.push_back(run);
  doc["runs"] = runs;
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw pairscale::ValidationError("cannot write metadata file: " + path);
  }
  out << doc.dump(2) << '\n';
}

std::optional<json> find_elicit_run(const std::string& cache_path,
                                    const std::string& attribute,
                                    const std::string& model) {
  std::ifstream in(cache_path + ".meta.json");
  if (!in) return std::nullopt;
  json doc;
  try {
    in >> doc;
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (!doc.is_object() || !doc.contains("runs")) return std::nullopt;
  for (const auto& run : doc["runs"]) {
    if (run.value("attribute", "") == attribute &&
        run.value("model_id", "") == model) {
      return run;
    }
  }
  return std::nullopt;
}

int cmd_elicit(const ElicitOptions& options) {
  auto roster = pairscale::load_roster(options.roster_path);

  pairscale::PromptTemplate tpl =
      options.template_path.empty()
          ? pairscale::builtin_template(options.attribute)
          : pairscale::load_template(options.template_path);
  if (!options.template_path.empty() && options.attribute_given &&
      tpl.attribute != options.attribute) {
    throw pairscale::ValidationError(
        "--attribute '" + options.attribute +
        "' conflicts with template attribute '" + tpl.attribute + "'");
  }
  const std::string attribute = tpl.attribute;

  ensure_out_dir(options.out_dir);
  const std::string cache_path =
      options.cache_path.empty()
          ? (fs::path(options.out_dir) / "cache.jsonl").string()
          : options.cache_path;

  auto schedule =
      pairscale::schedule_pairs(roster, options.repeats, attribute, options.seed);
  const std::size_t n_pairs = roster.size() * (roster.size() - 1) / 2;
  std::printf("scheduled %zu tasks (%zu pairs x %d repeats)\n", schedule.size(),
              n_pairs, options.repeats);

  pairscale::EndpointConfig endpoint;
  endpoint.model_id = options.model;
  endpoint.max_retries = options.max_retries;
  endpoint.request_timeout_s = options.timeout_s;
  endpoint.max_concurrency = options.max_concurrency;

  std::unique_ptr<pairscale::MockServer> mock;
  std::unique_ptr<pairscale::Clock> clock;
  if (options.mock) {
    pairscale::MockConfig config;
    for (const auto& entity : roster) config.ids.push_back(entity.id);
    const auto n = static_cast<Eigen::Index>(roster.size());
    config.true_lambda.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      config.true_lambda(i) =
          options.mock_gap *
          (0.5 * static_cast<double>(n - 1) - static_cast<double>(i));
    }
    config.seed = options.seed;
    config.tie_rate = options.tie_rate;
    config.garbage_rate = options.garbage_rate;
    mock = std::make_unique<pairscale::MockServer>(std::move(config));
    endpoint.base_url = mock->base_url();
    endpoint.api_key = "mock";
    if (endpoint.model_id.empty()) endpoint.model_id = "mock-llm";
    clock = std::make_unique<pairscale::FixedClock>(pairscale::synth_epoch());
    std::printf("mock endpoint on %s\n", endpoint.base_url.c_str());
  } else {
    endpoint.base_url = options.base_url;
    const char* key = std::getenv("PAIRSCALE_API_KEY");
    if (!key || std::string(key).empty()) {
      throw pairscale::ValidationError(
          "PAIRSCALE_API_KEY is not set (required without --mock)");
    }
    endpoint.api_key = key;
    if (endpoint.model_id.empty()) {
      throw pairscale::ValidationError("--model is required without --mock");
    }
    clock = std::make_unique<pairscale::SystemClock>();
  }
  endpoint.check();

  auto existing = pairscale::read_cache(cache_path);
  auto pending =
      pairscale::pending_tasks(schedule, existing, endpoint.model_id);
  std::printf("cache %s: %zu tasks already usable, %zu to run\n",
              cache_path.c_str(), schedule.size() - pending.size(),
              pending.size());

  pairscale::CacheWriter writer(cache_path);
  pairscale::HttpChatClient client(endpoint);
  const std::int64_t total = static_cast<std::int64_t>(pending.size());
  const std::int64_t stride = std::max<std::int64_t>(1, total / 20);
  auto progress = [&](std::int64_t done, std::int64_t of) {
    if (done == of || done % stride == 0) {
      std::fprintf(stderr, "progress %lld/%lld\n",
                   static_cast<long long>(done), static_cast<long long>(of));
    }
  };
  pairscale::run_schedule(pending, tpl, endpoint, client, writer, *clock,
                          progress);

  auto records = pairscale::read_cache(cache_path);
  auto usable = pairscale::usable_keys(records, endpoint.model_id);
  std::int64_t usable_count = 0;
  for (const auto& task : schedule) {
    if (usable.count(pairscale::task_key(task, endpoint.model_id))) {
      ++usable_count;
    }
  }
  const std::int64_t unusable_count =
      static_cast<std::int64_t>(schedule.size()) - usable_count;
  const double rate = schedule.empty()
                          ? 0.0
                          : static_cast<double>(unusable_count) /
                                static_cast<double>(schedule.size());
  std::printf("usable %lld unusable %lld unusable_rate %.6f\n",
              static_cast<long long>(usable_count),
              static_cast<long long>(unusable_count), rate);

  update_elicit_metadata(cache_path, tpl, endpoint.model_id, options.seed,
                         options.repeats);

  if (rate > options.unusable_threshold) {
    throw pairscale::ValidationError(
        "unusable rate " + std::to_string(rate) + " exceeds threshold " +
        std::to_string(options.unusable_threshold));
  }
  return 0;
}

int cmd_fit(const FitOptions& options) {
  auto roster = pairscale::load_roster(options.roster_path);
  auto records = pairscale::read_cache(options.cache_path);

  std::vector<pairscale::ComparisonRecord> selected;
  std::set<std::string> models_seen;
  for (const auto& record : records) {
    if (record.task.attribute != options.attribute) continue;
    if (!options.model.empty() && record.model_id != options.model) continue;
    models_seen.insert(record.model_id);
    selected.push_back(record);
  }
  if (selected.empty()) {
    throw pairscale::ValidationError("cache has no records for attribute '" +
                                     options.attribute + "'" +
                                     (options.model.empty()
                                          ? ""
                                          : " and model '" + options.model + "'"));
  }
  if (models_seen.size() > 1) {
    std::string list;
    for (const auto& model : models_seen) list += " " + model;
    throw pairscale::ValidationError(
        "cache holds records from multiple models:" + list +
        "; pass --model to choose one");
  }
  const std::string model_id = *models_seen.begin();
  selected = pairscale::dedupe_by_key(selected);

  auto result = pairscale::tally(selected, roster);

  pairscale::FitConfig config;
  config.pseudocount = options.pseudocount;
  auto scores = pairscale::fit_bt(result.tally, config);
  scores.quasi_se = pairscale::quasi_standard_errors(result.tally, scores);
  scores = pairscale::confidence_intervals(scores, options.ci_level);
  if (options.sign_flip) {
    scores.lambda = -scores.lambda;
    Eigen::VectorXd low = -scores.ci_high;
    scores.ci_high = -scores.ci_low;
    scores.ci_low = low;
  }

  ensure_out_dir(options.out_dir);
  const std::string scores_path =
      (fs::path(options.out_dir) /
       ("scores_" + attribute_slug(options.attribute) + ".csv"))
          .string();
  pairscale::write_scores(scores_path, scores);

  pairscale::FitMetadata meta;
  meta.attribute = options.attribute;
  meta.model_id = model_id;
  meta.toolkit_version = pairscale::kToolkitVersion;
  meta.rng = std::string(pairscale::kRngName);
  meta.sign_flip = options.sign_flip;
  meta.ci_level = options.ci_level;
  meta.usable = result.summary.usable;
  meta.unusable = result.summary.unusable;
  meta.converged = scores.converged;
  meta.iterations = scores.iterations;
  meta.log_likelihood = scores.log_likelihood;
  if (auto run = find_elicit_run(options.cache_path, options.attribute, model_id)) {
    if (run->contains("seed")) meta.seed = run->at("seed").get<std::uint64_t>();
    meta.template_hash = run->value("template_hash", "");
  }
  if (meta.template_hash.empty() &&
      pairscale::is_builtin_attribute(options.attribute)) {
    meta.template_hash =
        pairscale::template_hash(pairscale::builtin_template(options.attribute));
  }
  pairscale::write_fit_metadata(pairscale::metadata_path(scores_path), meta);

  std::printf(
      "fit %s: %lld usable, %lld unusable; converged=%d iterations=%d "
      "log_likelihood=%.10g\n",
      options.attribute.c_str(), static_cast<long long>(result.summary.usable),
      static_cast<long long>(result.summary.unusable),
      scores.converged ? 1 : 0, scores.iterations, scores.log_likelihood);
  std::printf("wrote %s\n", scores_path.c_str());
  return 0;
}

int cmd_analyze(const AnalyzeOptions& options) {
  auto roster = pairscale::load_roster(options.roster_path);

  struct LoadedScores {
    std::string label;
    std::string attribute;
    pairscale::ScoreSet set;
  };
  std::vector<LoadedScores> loaded;
  std::set<std::string> labels_used;
  for (const auto& path : options.scores_paths) {
    auto table = pairscale::read_scores(path);
    auto meta = pairscale::read_fit_metadata(pairscale::metadata_path(path));
    LoadedScores entry;
    entry.attribute = meta ? meta->attribute : "";
    if (entry.attribute == "knowledge-institution") {
      entry.label = pairscale::kKipsLabel;
    } else if (entry.attribute == "ideology-liberal") {
      entry.label = pairscale::kAipsLabel;
    } else if (!entry.attribute.empty()) {
      entry.label = entry.attribute;
    } else {
      entry.label = fs::path(path).stem().string();
    }
    if (meta && !meta->model_id.empty()) {
      entry.label += " (" + meta->model_id + ")";
    }
    while (labels_used.count(entry.label)) entry.label += "'";
    labels_used.insert(entry.label);
    entry.set.label = entry.label;
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
      entry.set.values[table.ids[i]] = table.lambda(static_cast<Eigen::Index>(i));
    }
    for (const auto& entity : roster) {
      if (!entry.set.values.count(entity.id)) {
        throw pairscale::MissingCovariateError(entity.id, entry.label);
      }
    }
    loaded.push_back(std::move(entry));
  }
  if (loaded.empty()) {
    throw pairscale::ValidationError("analyze needs at least one scores file");
  }

  ensure_out_dir(options.out_dir);
  std::string report;

  // Correlation matrix over all score vectors plus external_score when the
  // whole roster carries it.
  std::vector<std::string> labels;
  std::vector<Eigen::VectorXd> columns;
  for (const auto& entry : loaded) {
    Eigen::VectorXd column(static_cast<Eigen::Index>(roster.size()));
    for (std::size_t i = 0; i < roster.size(); ++i) {
      column(static_cast<Eigen::Index>(i)) = entry.set.values.at(roster[i].id);
    }
    labels.push_back(entry.label);
    columns.push_back(std::move(column));
  }
  bool have_external = !roster.empty();
  for (const auto& entity : roster) {
    if (!entity.covariates.external_score) have_external = false;
  }
  if (have_external) {
    Eigen::VectorXd column(static_cast<Eigen::Index>(roster.size()));
    for (std::size_t i = 0; i < roster.size(); ++i) {
      column(static_cast<Eigen::Index>(i)) = *roster[i].covariates.external_score;
    }
    labels.push_back(pairscale::kExternalLabel);
    columns.push_back(std::move(column));
  }
  const bool want_correlations =
      options.spec == "all" || options.spec == "correlations";
  if (want_correlations) {
    if (columns.size() >= 2) {
      auto table = pairscale::correlation_table(labels, columns);
      const std::string csv = pairscale::format_correlation_csv(table);
      std::ofstream out(fs::path(options.out_dir) / "correlations.csv",
                        std::ios::trunc);
      out << csv;
      report += pairscale::format_correlation_text(table);
      report += '\n';
    } else {
      report += "Correlations skipped: only one score vector and no "
                "external_score column.\n\n";
    }
  }

  // Regression suite per the standard specs.
  std::optional<pairscale::ScoreSet> aips;
  std::optional<pairscale::ScoreSet> kips;
  for (const auto& entry : loaded) {
    if (entry.attribute == "knowledge-institution") {
      if (!kips) kips = entry.set;
    } else if (!aips) {
      aips = entry.set;
    }
  }
  const std::map<std::string, std::string> spec_names = {
      {"table2", "Table 2"},
      {"model1", "Table 3 Model 1"},
      {"model2", "Table 3 Model 2"},
      {"model3", "Table 3 Model 3"},
  };
  if (options.spec != "all" && options.spec != "correlations" &&
      !spec_names.count(options.spec)) {
    throw pairscale::ValidationError(
        "--spec must be one of all, correlations, table2, model1, model2, "
        "model3");
  }
  if (options.spec != "correlations") {
    auto specs = pairscale::model_specs(roster, aips, kips);
    bool matched = false;
    for (const auto& spec : specs) {
      if (options.spec != "all" && spec_names.at(options.spec) != spec.name) {
        continue;
      }
      matched = true;
      auto result = pairscale::logistic_fit(spec.design);
      report += pairscale::format_regression_text(spec.name, result);
      report += '\n';
      std::string slug;
      for (char c : spec.name) {
        slug += (c == ' ') ? '_'
                           : static_cast<char>(std::tolower(
                                 static_cast<unsigned char>(c)));
      }
      std::ofstream out(fs::path(options.out_dir) /
                            ("regression_" + slug + ".csv"),
                        std::ios::trunc);
      out << pairscale::format_regression_csv(result);
    }
    if (!matched && options.spec != "all") {
      throw pairscale::ValidationError(
          "spec '" + options.spec +
          "' cannot be built from the provided scores/roster (needs the "
          "matching score sets and covariates)");
    }
    if (specs.empty() && options.spec == "all") {
      report += "Regressions skipped: no score set maps to a model spec.\n";
    }
  }

  std::ofstream out(fs::path(options.out_dir) / "report.txt", std::ios::trunc);
  out << report;
  std::fputs(report.c_str(), stdout);
  return 0;
}

int cmd_synth(const SynthOptions& options) {
  if (options.n < 2) {
    throw pairscale::TooFewEntitiesError("--n must be at least 2");
  }
  ensure_out_dir(options.out_dir);
  auto roster = pairscale::make_synthetic_roster(
      static_cast<std::size_t>(options.n), options.seed, options.spread);

  const std::string roster_path =
      (fs::path(options.out_dir) / "roster.csv").string();
  pairscale::write_roster_csv(roster_path, roster.entities);

  pairscale::SynthSpec spec;
  spec.true_lambda = roster.true_lambda;
  spec.repeats = options.repeats;
  spec.tie_rate = options.tie_rate;
  spec.seed = options.seed;
  auto records = pairscale::generate(spec, options.attribute);

  const std::string cache_path =
      (fs::path(options.out_dir) / "cache.jsonl").string();
  std::error_code ec;
  fs::remove(cache_path, ec);
  pairscale::CacheWriter writer(cache_path);
  for (const auto& record : records) writer.append(record);

  pairscale::PromptTemplate tpl{options.attribute, "synthetic {A} {B}",
                                "synthetic {A} {B}"};
  update_elicit_metadata(cache_path, tpl, pairscale::kSynthModelId,
                         options.seed, options.repeats);

  const std::string lambda_path =
      (fs::path(options.out_dir) / "true_lambda.csv").string();
  std::ofstream lambda_out(lambda_path, std::ios::trunc);
  lambda_out << "id,true_lambda\n";
  for (std::size_t i = 0; i < roster.entities.size(); ++i) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.10g",
                  roster.true_lambda(static_cast<Eigen::Index>(i)));
    lambda_out << pairscale::csv_escape(roster.entities[i].id) << ',' << buffer
               << '\n';
  }

  std::printf("wrote %s, %s, %s (%d entities, %zu records)\n",
              roster_path.c_str(), cache_path.c_str(), lambda_path.c_str(),
              options.n, records.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-attribute scaling from LLM-elicited pairwise "
               "comparisons: Bradley-Terry scores with quasi-standard errors, "
               "plus correlation and logistic-regression validation."};
  app.require_subcommand(1);
  app.set_version_flag("--version", PAIRSCALE_VERSION);

  ElicitOptions elicit;
  auto* elicit_cmd = app.add_subcommand(
      "elicit", "Schedule and run pairwise comparisons against an "
                "OpenAI-compatible endpoint (resumable)");
  elicit_cmd->add_option("--roster", elicit.roster_path, "Roster CSV path")
      ->required();
  elicit_cmd->add_option("--attribute", elicit.attribute,
                         "Attribute key (built-ins: ideology-liberal, "
                         "knowledge-institution)");
  elicit_cmd->add_option("--template", elicit.template_path,
                         "Custom template JSON (attribute, stage1, stage2)");
  elicit_cmd->add_option("--repeats", elicit.repeats, "Repeats per pair");
  elicit_cmd->add_option("--seed", elicit.seed, "Schedule/mock seed");
  elicit_cmd->add_option("--base-url", elicit.base_url, "Endpoint base URL");
  elicit_cmd->add_option("--model", elicit.model, "Model id");
  elicit_cmd->add_option("--out", elicit.out_dir, "Output directory");
  elicit_cmd->add_option("--cache", elicit.cache_path,
                         "Cache file (default <out>/cache.jsonl)");
  elicit_cmd->add_option("--max-concurrency", elicit.max_concurrency,
                         "Concurrent requests");
  elicit_cmd->add_option("--max-retries", elicit.max_retries,
                         "Parse-failure retries per task");
  elicit_cmd->add_option("--timeout", elicit.timeout_s, "Request timeout (s)");
  elicit_cmd->add_option("--unusable-threshold", elicit.unusable_threshold,
                         "Fail when the unusable rate exceeds this");
  elicit_cmd->add_flag("--mock", elicit.mock,
                       "Serve comparisons from an in-process mock endpoint");
  elicit_cmd->add_option("--mock-gap", elicit.mock_gap,
                         "Mock: ability gap between adjacent roster entries");
  elicit_cmd->add_option("--tie-rate", elicit.tie_rate, "Mock: tie probability");
  elicit_cmd->add_option("--garbage-rate", elicit.garbage_rate,
                         "Mock: unparseable-reply probability");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand(
      "fit", "Fit Bradley-Terry scores with quasi-standard errors from a "
             "comparison cache");
  fit_cmd->add_option("--cache", fit.cache_path, "Cache JSONL path")->required();
  fit_cmd->add_option("--roster", fit.roster_path, "Roster CSV path")->required();
  fit_cmd->add_option("--attribute", fit.attribute, "Attribute key");
  fit_cmd->add_option("--model", fit.model,
                      "Model id (required when the cache holds several)");
  fit_cmd->add_option("--out", fit.out_dir, "Output directory");
  fit_cmd->add_flag("--sign-flip", fit.sign_flip,
                    "Negate lambda (and swap CI bounds)");
  fit_cmd->add_option("--pseudocount", fit.pseudocount,
                      "Regularization wins added to both directions of every "
                      "compared pair");
  fit_cmd->add_option("--ci-level", fit.ci_level, "Confidence level");

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Correlation matrix and logistic-regression tables from "
                 "scores files and a roster");
  analyze_cmd->add_option("scores", analyze.scores_paths, "Scores CSV file(s)")
      ->required();
  analyze_cmd->add_option("--roster", analyze.roster_path, "Roster CSV path")
      ->required();
  analyze_cmd->add_option("--out", analyze.out_dir, "Output directory");
  analyze_cmd->add_option(
      "--spec", analyze.spec,
      "all | correlations | table2 | model1 | model2 | model3");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a synthetic roster and comparison cache from known "
               "abilities");
  synth_cmd->add_option("--n", synth.n, "Number of entities");
  synth_cmd->add_option("--repeats", synth.repeats, "Repeats per pair");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_option("--tie-rate", synth.tie_rate, "Tie probability");
  synth_cmd->add_option("--spread", synth.spread,
                        "Abilities run from +spread to -spread");
  synth_cmd->add_option("--attribute", synth.attribute,
                        "Attribute tag for the records");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
    elicit.attribute_given = elicit_cmd->count("--attribute") > 0;
    if (elicit_cmd->parsed()) return cmd_elicit(elicit);
    if (fit_cmd->parsed()) return cmd_fit(fit);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze);
    if (synth_cmd->parsed()) return cmd_synth(synth);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pairscale::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const pairscale::EndpointError& e) {
    std::fprintf(stderr, "endpoint error: %s\n", e.what());
    return 3;
  } catch (const pairscale::EstimationError& e) {
    std::fprintf(stderr, "estimation error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
