#pragma once

#include <cstdint>
#include <optional>

#include "pfopt/problem.hpp"
#include "pfopt/rng.hpp"
#include "pfopt/vec.hpp"

namespace pfopt {

// Uniformly bounded, zero-mean noise: gradient noise uniform in the
// sigma-ball, value noise uniform on [-sigma0, sigma0].
struct NoiseModel {
  double grad_noise_radius = 0.0;   // sigma*
  double value_noise_radius = 0.0;  // sigma0
};

struct OracleSample {
  std::optional<double> noisy_value;
  Vec noisy_gradient;
  std::uint64_t query_index = 0;  // cumulative on the issuing handle
};

// Immutable (problem, noise) pair; shareable across threads. Stateful query
// handles are minted from it, one per run.
class Oracle {
 public:
  Oracle(const Problem& problem, NoiseModel noise)
      : problem_(&problem), noise_(noise) {}

  const Problem& problem() const { return *problem_; }
  const NoiseModel& noise() const { return noise_; }

 private:
  const Problem* problem_;
  NoiseModel noise_;
};

// Single-owner query handle: owns its RngStream and query counter. Parallel
// runs must each hold a distinct handle with a distinct stream id.
class OracleHandle {
 public:
  OracleHandle(const Oracle& oracle, RngStream rng)
      : oracle_(&oracle), rng_(rng) {}

  // One query: noisy value and noisy gradient at w.
  OracleSample first_order(VecView w);
  // One query: noisy gradient only.
  Vec gradient(VecView w);
  // One query: noisy value only.
  double value(VecView w);

  std::uint64_t queries() const { return queries_; }
  const Oracle& oracle() const { return *oracle_; }

 private:
  void check_dim(VecView w) const;

  const Oracle* oracle_;
  RngStream rng_;
  std::uint64_t queries_ = 0;
};

// Zero-mean noise uniform in the ball of the given radius. Every sample
// satisfies ||xi|| <= radius exactly (clamped against rounding).
Vec sample_ball_noise(int dim, double radius, RngStream& rng);

// Zero-mean noise uniform on [-radius, radius].
double sample_interval_noise(double radius, RngStream& rng);

}  // namespace pfopt
