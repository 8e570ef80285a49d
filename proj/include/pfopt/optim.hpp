#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pfopt/oracle.hpp"
#include "pfopt/vec.hpp"

namespace pfopt {

// Raised when a run produces a non-finite iterate (stepsize divergence).
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::uint64_t step, double eta)
      : std::runtime_error("non-finite iterate at step " + std::to_string(step) +
                           " (eta=" + std::to_string(eta) + "); run aborted"),
        step(step),
        eta(eta) {}
  std::uint64_t step;
  double eta;
};

// Per-step record of one optimizer run. Iterates w_1..w_{T+1} are stored only
// when T is at most the storage cap; the scalar per-step series and the
// streaming reductions (average iterate, max distance, cumulative squared
// gradient norm) are always kept. Immutable after the run completes.
struct RunTrace {
  std::vector<Vec> iterates;               // w_1..w_{T+1}, or empty above the cap
  std::vector<Vec> sampled_iterates;       // iterates at the requested sample steps
  std::vector<double> grad_norms;          // ||g_t||, t = 1..T
  std::vector<double> grad_sq_cumsum;      // sum_{s<=t} ||g_s||^2, t = 1..T
  std::vector<double> dist_from_init;      // ||w_{t+1} - w_1||, t = 1..T
  std::vector<double> etas;                // stepsize used at step t
  double max_dist_from_init = 0.0;
  Vec average_iterate;                     // (1/T) sum_{t=1..T} w_t
  std::uint64_t steps = 0;
  std::uint64_t queries_used = 0;
};

struct RunOptions {
  // Store the full iterate sequence only when T <= this cap.
  std::uint64_t iterate_storage_cap = 100000;
  // 1-based step indices whose iterate w_t must be retained even in streaming
  // mode (drawn up front by the caller; duplicates allowed).
  std::vector<std::uint64_t> sample_steps;
};

// Euclidean projection onto the D-ball around center. Output distance to the
// center never exceeds D (clamped against floating rounding).
Vec project_ball(VecView w, VecView center, double D);

// eta_t = alpha * D / sqrt(gamma^2 + cumsum); rejects a zero denominator.
double adagrad_stepsize(double alpha, double D, double gamma, double grad_sq_cumsum);

// Fixed-stepsize SGD: w_{t+1} = w_t - eta * g_t, g_t drawn at w_t.
RunTrace sgd_run(OracleHandle& oracle, const Vec& w1, double eta, std::uint64_t T,
                 const RunOptions& opts = {});

struct AdaPsgdConfig {
  double D = 1.0;       // ball radius around the start point
  double alpha = 1.0;   // > 0
  double gamma = 1.0;   // >= 0, with gamma > 0 whenever the first cumsum can be 0
  Vec center;           // w_1
};

// Projected SGD with AdaGrad-norm stepsizes. The stepsize at step t uses the
// cumulative squared norm through step t inclusive; an off-by-one here would
// change the algorithm.
RunTrace adapsgd_run(OracleHandle& oracle, const AdaPsgdConfig& config, std::uint64_t T,
                     const RunOptions& opts = {});

}  // namespace pfopt
