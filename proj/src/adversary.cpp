#include "pfopt/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pfopt/tuner.hpp"

namespace pfopt {

double AdversarialInstance::subgradient(double w) const {
  if (w <= -D2) return -G_star;
  if (w >= D1) return G_star;
  return which == 1 ? -G_star : G_star;
}

BranchProbs branch_probabilities(const AdversarialInstance& inst) {
  const double shift = inst.G_star / (2.0 * (inst.sigma1 - inst.G_star));
  BranchProbs p;
  if (inst.which == 1) {
    p.minus = 0.5 + shift;
    p.plus = 0.5 - shift;
  } else {
    const double half_rare = 0.5 / static_cast<double>(inst.T);
    p.rare = 1.0 / static_cast<double>(inst.T);
    p.minus = 0.5 + shift - half_rare;
    p.plus = 0.5 - shift - half_rare;
  }
  return p;
}

std::pair<AdversarialInstance, AdversarialInstance> build_instances(std::uint64_t T, double alpha,
                                                                    double D_max, double sigma_max) {
  if (T < 4) throw std::invalid_argument("build_instances: T must be >= 4");
  const double sqrt_T = std::sqrt(static_cast<double>(T));
  if (!(alpha >= 1.0 && alpha <= 0.75 * sqrt_T))
    throw std::invalid_argument("build_instances: alpha must lie in [1, (3/4)sqrt(T)]");
  if (!(D_max > 0.0) || !(sigma_max > 0.0))
    throw std::invalid_argument("build_instances: D_max and sigma_max must be > 0");

  AdversarialInstance base;
  base.T = T;
  base.alpha = alpha;
  base.G_star = sigma_max / (2.0 * static_cast<double>(T) - 1.0);
  base.D1 = D_max;
  base.D2 = D_max / (alpha * sqrt_T);
  base.sigma1 = sigma_max / (alpha * sqrt_T);
  base.sigma2 = sigma_max;

  AdversarialInstance inst1 = base;
  inst1.which = 1;
  AdversarialInstance inst2 = base;
  inst2.which = 2;

  for (const AdversarialInstance* inst : {&inst1, &inst2}) {
    const BranchProbs p = branch_probabilities(*inst);
    const double sum = p.rare + p.minus + p.plus;
    for (double q : {p.rare, p.minus, p.plus})
      if (!(q >= 0.0 && q <= 1.0))
        throw std::logic_error("build_instances: oracle branch probability outside [0,1]");
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::logic_error("build_instances: oracle branch probabilities do not sum to 1");
  }
  return {inst1, inst2};
}

double sample_adversarial_gradient_with_tape(const AdversarialInstance& inst, double w, double u,
                                             bool* rare_fired) {
  if (rare_fired != nullptr) *rare_fired = false;
  if (w <= -inst.D2) return -inst.G_star;
  if (w >= inst.D1) return inst.G_star;
  const BranchProbs p = branch_probabilities(inst);
  if (inst.which == 2 && u < p.rare) {
    if (rare_fired != nullptr) *rare_fired = true;
    return inst.sigma2 + inst.G_star;
  }
  if (u < p.rare + p.minus) return -inst.sigma1 + inst.G_star;
  return inst.sigma1 - inst.G_star;
}

double sample_adversarial_gradient(const AdversarialInstance& inst, double w, RngStream& rng) {
  return sample_adversarial_gradient_with_tape(inst, w, rng.next_unit(), nullptr);
}

double evaluate_gap(const AdversarialInstance& inst, double w) {
  return inst.G_star * std::abs(inst.which == 1 ? w - inst.D1 : w + inst.D2);
}

double theorem_bound(const AdversarialInstance& inst) {
  return inst.diameter() * (inst.G_star + inst.noise_radius()) * inst.alpha /
         (6.0 * std::sqrt(static_cast<double>(inst.T)));
}

IndistinguishabilityReport coupled_run(const AlgorithmFactory& make_algorithm, std::uint64_t T,
                                       double alpha, double D_max, double sigma_max, RngStream rng) {
  const auto [inst1, inst2] = build_instances(T, alpha, D_max, sigma_max);
  auto algorithm = make_algorithm();

  std::vector<double> replies;
  replies.reserve(T);
  IndistinguishabilityReport report;
  for (std::uint64_t t = 0; t < T; ++t) {
    const double w = algorithm->next_query(replies);
    bool fired = false;
    const double g = sample_adversarial_gradient_with_tape(inst2, w, rng.next_unit(), &fired);
    report.rare_event_fired = report.rare_event_fired || fired;
    replies.push_back(g);
  }
  report.queries = T;
  report.output_w = algorithm->output(replies);
  report.gap1 = evaluate_gap(inst1, report.output_w);
  report.gap2 = evaluate_gap(inst2, report.output_w);
  report.bound1 = theorem_bound(inst1);
  report.bound2 = theorem_bound(inst2);
  report.violated_both = report.gap1 < report.bound1 && report.gap2 < report.bound2;
  return report;
}

namespace {

class FixedSgdSubject final : public FirstOrderAlgorithm {
 public:
  FixedSgdSubject(double w1, double eta) : w_(w1), eta_(eta) {}

  double next_query(std::span<const double> replies) override {
    consume(replies);
    return w_;
  }

  double output(std::span<const double> replies) override {
    consume(replies);
    return steps_ == 0 ? w_ : sum_w_ / static_cast<double>(steps_);
  }

 private:
  void consume(std::span<const double> replies) {
    while (consumed_ < replies.size()) {
      const double g = replies[consumed_++];
      sum_w_ += w_;
      ++steps_;
      w_ -= eta_ * g;
    }
  }

  double w_;
  double eta_;
  double sum_w_ = 0.0;
  std::uint64_t steps_ = 0;
  std::size_t consumed_ = 0;
};

// Reply-driven replay of the adaptive diameter tuner (1-D): arms of
// floor(T/K) steps; after the tuner has produced its output, the remaining
// queries park at that point and replies are ignored.
class DiameterTunedSubject final : public FirstOrderAlgorithm {
 public:
  DiameterTunedSubject(double w1, double D_min, double D_max, double G_max, double sigma_max,
                       std::uint64_t T, double delta)
      : w1_(w1) {
    const double k_real = std::ceil(std::log2(D_max / D_min));
    K_ = k_real >= 1.0 ? static_cast<std::uint64_t>(k_real) : 1;
    arm_T_ = std::max<std::uint64_t>(1, T / K_);
    const AlphaGammaTheta agt = alpha_gamma_theta(G_max, sigma_max, arm_T_, delta);
    alpha_ = agt.alpha;
    gamma_ = agt.gamma;
    D_min_ = D_min;
    start_arm(1);
  }

  double next_query(std::span<const double> replies) override {
    consume(replies);
    return done_ ? out_ : w_;
  }

  double output(std::span<const double> replies) override {
    consume(replies);
    if (!done_) {
      done_ = true;
      out_ = w1_;  // budget ended mid-arm
    }
    return out_;
  }

 private:
  void start_arm(std::uint64_t k) {
    arm_ = k;
    D_ = std::ldexp(D_min_, static_cast<int>(k) + 2);
    w_ = w1_;
    cumsum_ = 0.0;
    sum_w_ = 0.0;
    max_dist_ = 0.0;
    step_ = 0;
  }

  void consume(std::span<const double> replies) {
    while (consumed_ < replies.size()) {
      const double g = replies[consumed_++];
      if (done_) continue;
      sum_w_ += w_;
      ++step_;
      cumsum_ += g * g;
      const double eta = alpha_ * D_ / std::sqrt(gamma_ * gamma_ + cumsum_);
      w_ = std::clamp(w_ - eta * g, w1_ - D_, w1_ + D_);
      max_dist_ = std::max(max_dist_, std::abs(w_ - w1_));
      if (step_ == arm_T_) {
        if (max_dist_ < D_) {
          done_ = true;
          out_ = sum_w_ / static_cast<double>(arm_T_);
        } else if (arm_ == K_) {
          done_ = true;
          out_ = w1_;  // exhausted every arm
        } else {
          start_arm(arm_ + 1);
        }
      }
    }
  }

  double w1_;
  std::uint64_t K_ = 1;
  std::uint64_t arm_T_ = 1;
  double alpha_ = 0.0, gamma_ = 0.0, D_min_ = 0.0;

  std::uint64_t arm_ = 1;
  double D_ = 0.0;
  double w_ = 0.0;
  double cumsum_ = 0.0;
  double sum_w_ = 0.0;
  double max_dist_ = 0.0;
  std::uint64_t step_ = 0;
  bool done_ = false;
  double out_ = 0.0;
  std::size_t consumed_ = 0;
};

}  // namespace

AlgorithmFactory make_fixed_sgd_subject(double w1, double eta) {
  return [w1, eta] { return std::make_unique<FixedSgdSubject>(w1, eta); };
}

AlgorithmFactory make_diameter_tuned_subject(double w1, double D_min, double D_max, double G_max,
                                             double sigma_max, std::uint64_t T, double delta) {
  return [=] {
    return std::make_unique<DiameterTunedSubject>(w1, D_min, D_max, G_max, sigma_max, T, delta);
  };
}

}  // namespace pfopt
