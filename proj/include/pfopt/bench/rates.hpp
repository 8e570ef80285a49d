#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pfopt::bench {

struct RatePoint {
  std::string algorithm;
  std::uint64_t T = 0;
  double median = 0.0;
  double benchmark = 0.0;
};

struct RateReport {
  double slope = 0.0;                  // least-squares slope of ln(median) vs ln(T)
  std::vector<RatePoint> points;       // sorted by T
  std::vector<double> ratio_to_benchmark;  // median / benchmark per point
};

// Fits the log-log rate. Rejects fewer than two distinct T values or mixed
// algorithms.
RateReport compare_rates(std::vector<RatePoint> points);

// Reads one aggregate CSV written by run_experiment.
RatePoint read_aggregate_csv(const std::string& path);

std::string format_rate_report(const RateReport& report);

}  // namespace pfopt::bench
