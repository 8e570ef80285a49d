#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pfopt/bench/config.hpp"

namespace pfopt::bench {

// One per-seed result; wall time is reported but never serialized, so output
// files stay byte-identical across reruns.
struct SeedRow {
  std::uint64_t seed = 0;
  std::string algorithm;
  std::uint64_t T = 0;
  double metric = 0.0;
  std::uint64_t queries = 0;
  std::uint64_t selected_arm = 0;
  bool failed = false;
  double wall_seconds = 0.0;
};

struct SummaryRecord {
  std::string algorithm;
  std::uint64_t T = 0;
  std::vector<SeedRow> rows;       // sorted by seed
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  double benchmark = 0.0;          // Table-style tuned-SGD reference rate
  std::uint64_t max_queries = 0;
  std::uint64_t failures = 0;      // failed flags (divergence or exhaustion)
};

// Deterministic linear-interpolation quantile of the finite values.
double quantile(std::vector<double> values, double q);

// Tuned-SGD reference rate for the problem's ground-truth constants.
double benchmark_rate(const ExperimentConfig& config);

// Runs every seed (worker pool; PFOPT_WORKERS overrides the size), writes the
// configured CSV outputs, and returns the aggregate. Per-seed divergence
// yields a failure row and the run continues.
SummaryRecord run_experiment(const ExperimentConfig& config);

// The pinned per-seed CSV serialization (header seed,algorithm,T,metric,...).
std::string summary_csv(const SummaryRecord& record);
// One-row aggregate CSV.
std::string aggregate_csv(const SummaryRecord& record);

std::string format_double(double v);  // shortest round-trip decimal

unsigned worker_count();

}  // namespace pfopt::bench
