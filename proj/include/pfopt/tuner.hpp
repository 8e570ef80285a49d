#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pfopt/optim.hpp"
#include "pfopt/oracle.hpp"
#include "pfopt/rng.hpp"
#include "pfopt/vec.hpp"

namespace pfopt {

// All tuning formulas use base-2 logarithms; log_plus(x) = 1 + log2(x).
inline double log_plus(double x) { return 1.0 + std::log2(x); }

struct Range {
  double min = 0.0;
  double max = 0.0;
};

// Crude lower/upper bounds handed to the parameter-free methods. Each pair is
// optional; the range constructors below reject a missing pair they need.
struct ParamRanges {
  std::optional<Range> diameter;    // [D_min, D_max]
  std::optional<Range> lipschitz;   // [G_min, G_max]
  std::optional<Range> smoothness;  // [beta_min, beta_max]
  std::optional<Range> grad_noise;  // [sigma_min, sigma_max]
  std::optional<Range> initial_gap; // [F_min, F_max]
};

struct EtaRange {
  double eta_min = 0.0;
  double eta_max = 0.0;
};

// Stepsize range for the non-convex tuner from (beta, sigma, F) ranges.
EtaRange eta_range_nonconvex(const ParamRanges& ranges, std::uint64_t T);

// Stepsize range for the convex tuner from (D, G, sigma) ranges.
EtaRange eta_range_convex(const ParamRanges& ranges, std::uint64_t T);

// Grid plan of the non-convex tuner:
//   K  = ceil(log2((eta_max/eta_min) * sqrt(log_plus(ratio) * log_plus(1/delta)))), min 1
//   N  = ceil(log2(1/delta)), min 1
//   Tp = floor(T / (K * (1 + N))), rejected when < 1
struct NonconvexPlan {
  std::uint64_t K = 0;
  std::uint64_t N = 0;
  std::uint64_t Tp = 0;
};
NonconvexPlan plan_nonconvex(double eta_min, double eta_max, double delta, std::uint64_t T);

// Grid plan of the convex tuner: K = ceil(log2(ratio)) (min 1),
// N = ceil(log2(1/delta)) (min 1), Tp = floor(T / (2KN)), and the grid points
// are 2^{k-1} * eta_min * sqrt(2KN).
struct ConvexPlan {
  std::uint64_t K = 0;
  std::uint64_t N = 0;
  std::uint64_t Tp = 0;
  double grid_factor = 1.0;
};
ConvexPlan plan_convex(double eta_min, double eta_max, double delta, std::uint64_t T);

struct SelectionResult {
  std::size_t index = 0;            // argmin; ties broken by lowest index
  std::vector<double> scores;
};

// Score each candidate by ||sum of per_candidate_queries fresh gradient
// samples|| and return the argmin.
SelectionResult select_by_grad_norm(const std::vector<Vec>& candidates, OracleHandle& oracle,
                                    std::uint64_t per_candidate_queries);

// Score each candidate by the mean of per_candidate_queries fresh value
// samples and return the argmin.
SelectionResult select_by_value(const std::vector<Vec>& candidates, OracleHandle& oracle,
                                std::uint64_t per_candidate_queries);

struct ArmSummary {
  double param = 0.0;               // eta_k or D_k
  std::uint64_t queries = 0;
  double max_dist_from_init = 0.0;
  double final_grad_sq_cumsum = 0.0;
  bool diverged = false;
  // Min selection score among this arm's candidates; NaN when unscored.
  double best_selection_score = 0.0;
};

struct TuneResult {
  Vec solution;
  std::uint64_t selected_arm = 0;   // 1-based arm index; 0 when failed / none
  std::vector<ArmSummary> arms;
  std::uint64_t total_queries = 0;
  bool failed = false;
  // Full trace of the returned run (diameter tuning only).
  std::optional<RunTrace> selected_trace;
};

// Stepsize grid search for non-convex SGD: K arms of T' SGD steps each, N
// iterates sampled uniformly with replacement per arm, final pick by
// approximate gradient norm. Uses at most T oracle queries.
TuneResult nonconvex_tune(const Oracle& oracle, const Vec& w1, std::uint64_t T, double delta,
                          double eta_min, double eta_max, RngStream rng);

// Stepsize grid search for convex SGD with noisy-value selection: K x N
// independent runs of T' steps, candidates are average iterates, final pick
// by mean of T' fresh value samples. Uses at most T oracle queries.
TuneResult convex_tune_values(const Oracle& oracle, const Vec& w1, std::uint64_t T, double delta,
                              double eta_min, double eta_max, RngStream rng);

struct AlphaGammaTheta {
  double alpha = 0.0;
  double gamma = 0.0;
  double theta = 0.0;
};

// Constants of the adaptive diameter tuner (natural logs):
//   gamma = sqrt(5 sigma_max^2 ln(T/delta))
//   theta = ln(60 ln(6T) / delta)
//   alpha = 1 / (48 ln(1 + (2 G_max^2 T + 2 sigma_max^2 T) / (5 sigma_max^2 ln(T/delta)))
//               + 32 ln(1+T)
//               + 128 sqrt(theta ln(1+T) + theta^2 / (5 ln(T/delta))))
AlphaGammaTheta alpha_gamma_theta(double G_max, double sigma_max, std::uint64_t T, double delta);

// Diameter tuning for projected AdaGrad-norm SGD: arms D_k = 2^{k+2} D_min,
// k = 1..ceil(log2(D_max/D_min)); each arm runs T steps and the first run
// whose iterates all stay strictly inside its ball returns its average
// iterate. Exhaustion returns w1 with failed = true. Uses at most T*K queries.
TuneResult adaptive_diameter_tune(const Oracle& oracle, const Vec& w1, double D_min, double D_max,
                                  double G_max, double sigma_max, std::uint64_t T, double delta,
                                  RngStream rng);

}  // namespace pfopt
