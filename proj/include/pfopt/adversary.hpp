#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>

#include "pfopt/rng.hpp"

namespace pfopt {

// One of the two 1-D hard instances: f1(w) = G*|w - D1|, f2(w) = G*|w + D2|,
// with discrete stochastic subgradient oracles whose interior replies agree in
// distribution up to a rare 1/T branch of instance 2.
struct AdversarialInstance {
  int which = 1;          // 1 or 2
  std::uint64_t T = 0;
  double alpha = 1.0;
  double G_star = 0.0;    // sigma_max / (2T - 1)
  double D1 = 0.0;        // D_max
  double D2 = 0.0;        // D_max / (alpha * sqrt(T))
  double sigma1 = 0.0;    // sigma_max / (alpha * sqrt(T))
  double sigma2 = 0.0;    // sigma_max

  double diameter() const { return which == 1 ? D1 : D2; }
  double noise_radius() const { return which == 1 ? sigma1 : sigma2; }
  double minimizer() const { return which == 1 ? D1 : -D2; }
  // Expected oracle reply (the sign subgradient) at w.
  double subgradient(double w) const;
};

// Interior branch probabilities; rare = 0 for instance 1.
struct BranchProbs {
  double rare = 0.0;   // reply sigma2 + G
  double minus = 0.0;  // reply -sigma1 + G
  double plus = 0.0;   // reply  sigma1 - G
};
BranchProbs branch_probabilities(const AdversarialInstance& inst);

// Builds the coupled pair. Rejects T < 4 or alpha outside [1, (3/4)sqrt(T)],
// and hard-asserts that all oracle branch probabilities lie in [0,1] and sum
// to 1.
std::pair<AdversarialInstance, AdversarialInstance> build_instances(std::uint64_t T, double alpha,
                                                                    double D_max, double sigma_max);

// One oracle reply. The tape variant consumes an explicit uniform u in [0,1)
// and reports whether u fell in the rare 1/T sub-interval (instance 2,
// interior queries only); the shared tape is what couples the two oracles.
double sample_adversarial_gradient_with_tape(const AdversarialInstance& inst, double w, double u,
                                             bool* rare_fired);
double sample_adversarial_gradient(const AdversarialInstance& inst, double w, RngStream& rng);

// f_i(w) - f_i(w*_i).
double evaluate_gap(const AdversarialInstance& inst, double w);

// D_i (G + sigma_i) * alpha / (6 sqrt(T)).
double theorem_bound(const AdversarialInstance& inst);

// A deterministic T-query first-order procedure: the runner feeds each reply
// back and asks for the next query point; after T replies it asks for the
// output. Implementations may keep state but must be a pure function of the
// reply sequence (no internal randomness).
class FirstOrderAlgorithm {
 public:
  virtual ~FirstOrderAlgorithm() = default;
  virtual double next_query(std::span<const double> replies) = 0;
  virtual double output(std::span<const double> replies) = 0;
};

using AlgorithmFactory = std::function<std::unique_ptr<FirstOrderAlgorithm>()>;

struct IndistinguishabilityReport {
  bool rare_event_fired = false;
  double output_w = 0.0;
  double gap1 = 0.0, gap2 = 0.0;
  double bound1 = 0.0, bound2 = 0.0;
  bool violated_both = false;  // impossible on rare-event-free runs
  std::uint64_t queries = 0;
};

// Runs a fresh algorithm instance for exactly T queries against the g2 oracle
// over a uniform tape, tracking whether the tape ever entered the rare
// sub-interval. When it never did, the reply transcript is also a valid g1
// transcript, so the single output is evaluated against both instances.
IndistinguishabilityReport coupled_run(const AlgorithmFactory& make_algorithm, std::uint64_t T,
                                       double alpha, double D_max, double sigma_max, RngStream rng);

// Unprojected fixed-stepsize SGD from w1; outputs the average iterate.
AlgorithmFactory make_fixed_sgd_subject(double w1, double eta);

// The adaptive diameter tuner driven by the reply stream, arms of
// floor(T/K) steps; once it has returned internally it parks all remaining
// queries at its output point.
AlgorithmFactory make_diameter_tuned_subject(double w1, double D_min, double D_max, double G_max,
                                             double sigma_max, std::uint64_t T, double delta);

}  // namespace pfopt
