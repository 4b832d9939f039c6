#pragma once

#include <Eigen/Core>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pairscale/comparison.hpp"
#include "pairscale/entity.hpp"

namespace pairscale {

inline constexpr const char* kSynthAttribute = "synthetic";
inline constexpr const char* kSynthModelId = "synthetic";

// Fixed instant stamped on synthetic records so streams are byte-identical.
std::chrono::system_clock::time_point synth_epoch();

struct SynthSpec {
  Eigen::VectorXd true_lambda;
  int repeats = 1;
  double tie_rate = 0.0;  // chance a comparison is forced to Tie pre-draw
  std::uint64_t seed = 0;

  void check() const;
};

// "Synthetic Agency 01" ... zero-padded so lexicographic order equals
// roster order.
std::vector<std::string> synth_entity_ids(std::size_t n);

// Stream seed for one (pair, repeat) cell; first/second in canonical
// (sorted) order so presentation order cannot change the draw.
std::uint64_t synth_stream_seed(std::uint64_t seed, const std::string& attribute,
                                const std::string& first,
                                const std::string& second, int repeat);

// The one sampler shared by generate() and the mock endpoint: a tie
// pre-draw at tie_rate, then Win(first) with the Bradley-Terry probability
// sigmoid(lambda_first - lambda_second). kWinLeft means `first` wins.
Outcome sample_outcome(std::uint64_t stream_seed, double lambda_first,
                       double lambda_second, double tie_rate);

// All pairs x repeats drawn from the model the fitter assumes. Deterministic
// and byte-stable for a given spec.
std::vector<ComparisonRecord> generate(const SynthSpec& spec,
                                       const std::string& attribute =
                                           kSynthAttribute);

// Roster with covariates simulated off the true abilities: layoff is
// Bernoulli(sigmoid(2*lambda)), external_score is a noisy copy of lambda,
// budget and staff are log-normal.
struct SyntheticRoster {
  std::vector<Entity> entities;
  Eigen::VectorXd true_lambda;  // evenly spaced, descending in roster order
};

SyntheticRoster make_synthetic_roster(std::size_t n, std::uint64_t seed,
                                      double spread = 2.0);

// In-process OpenAI-compatible endpoint on a loopback port. Stage-1 requests
// get a fixed sentence; stage-2 requests get the sampled winner's full name
// or "Tie", or (at garbage_rate, sticky per task so retries cannot wash it
// out) an unparseable sentence. Deterministic given the config: decisions
// are pure functions of hashed task coordinates, so concurrent requests
// need no shared generator state.
struct MockConfig {
  std::vector<std::string> ids;
  Eigen::VectorXd true_lambda;
  std::uint64_t seed = 0;
  double tie_rate = 0.0;
  double garbage_rate = 0.0;
};

class MockServer {
 public:
  explicit MockServer(MockConfig config);
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  int port() const;
  std::string base_url() const;  // http://127.0.0.1:<port>/v1
  std::int64_t request_count() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pairscale
