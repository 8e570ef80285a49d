#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfopt/problem.hpp"
#include "pfopt/tuner.hpp"

namespace pfopt::bench {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { kSgd, kAdaPsgd, kAlg1, kAlg2, kAlg3, kNoiseEst };

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm a);

enum class Metric { kFGap, kGradSq, kSigmaBound };

// Parsed from flat dotted-key config text (one `key = value` per line,
// `#` comments). Unknown keys and inconsistent fields are config errors.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kSgd;

  ProblemKind problem_kind = ProblemKind::kAbsLipschitz;
  int dim = 1;
  double problem_scale = 1.0;   // G or beta
  Vec problem_minimizer;        // empty => origin

  double sigma = 0.0;           // gradient noise radius
  double sigma0 = 0.0;          // value noise radius

  Vec w1;                       // empty => origin
  std::uint64_t T = 0;
  double delta = 0.1;

  // Explicit stepsize range (overrides derivation from ranges when set).
  std::optional<double> eta_min;
  std::optional<double> eta_max;
  std::optional<double> eta;    // fixed-stepsize SGD

  // AdaPSGD direct parameters.
  std::optional<double> adapsgd_D;
  std::optional<double> adapsgd_alpha;
  std::optional<double> adapsgd_gamma;

  ParamRanges ranges;

  std::vector<std::uint64_t> seeds;

  std::optional<Metric> metric;  // default depends on the algorithm

  std::string output_summary;    // per-seed CSV path ("" = don't write)
  std::string output_aggregate;  // one-row aggregate CSV path ("" = don't write)
  std::string output_traces;     // directory for per-seed traces ("" = don't write)
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Resolved metric for a config (explicit or per-algorithm default).
Metric effective_metric(const ExperimentConfig& config);

}  // namespace pfopt::bench
