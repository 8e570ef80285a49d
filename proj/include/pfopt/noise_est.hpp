#pragma once

#include <cstdint>

#include "pfopt/oracle.hpp"
#include "pfopt/vec.hpp"

namespace pfopt {

struct NoiseBoundReport {
  double z_norm = 0.0;          // ||Z||, Z = mean of n gradient samples at w1
  std::uint64_t n_used = 0;     // floor(T/2)
  double sigma_bound = 0.0;     // 2 * z_norm * sqrt(T) / c
  double c_const = 0.0;         // c = 4 * sqrt(1 + 3 log2(1/delta))
};

// Averages floor(T/2) stochastic gradients at w1 and converts the norm of the
// average into an upper bound on the gradient-noise radius. The bound is only
// meaningful when w1 is a bad enough approximate minimizer (see
// bad_enough_initialization); the report is produced regardless.
NoiseBoundReport estimate_noise_bound(OracleHandle& oracle, const Vec& w1, std::uint64_t T,
                                      double delta);

// Verification-only helper: checks f(w1) - f* > c * sigma* * ||w1 - w*|| / sqrt(T)
// from ground-truth constants. Not part of the parameter-free pipeline.
bool bad_enough_initialization(const Problem& problem, const NoiseModel& noise, const Vec& w1,
                               std::uint64_t T, double delta);

}  // namespace pfopt
