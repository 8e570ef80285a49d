#include "pfopt/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pfopt {

namespace {

constexpr std::uint64_t kArmRunStream = 0x41524d;      // per-arm SGD runs
constexpr std::uint64_t kArmSampleStream = 0x534d50;   // per-arm iterate sampling
constexpr std::uint64_t kSelectionStream = 0x53454c;   // final selection phase

std::uint64_t ceil_log_count(double x) {
  // ceil of a real-valued log expression, clamped to >= 1
  const double c = std::ceil(x);
  if (!(c >= 1.0)) return 1;
  return static_cast<std::uint64_t>(c);
}

void check_eta_inputs(double eta_min, double eta_max, double delta) {
  if (!(eta_min > 0.0) || !(eta_max >= eta_min) || !std::isfinite(eta_max))
    throw std::invalid_argument("tuner: need 0 < eta_min <= eta_max < inf");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("tuner: delta must lie in (0, 1)");
}

// The high-probability guarantees of the two grid tuners hold for
// delta < 1/3 (their success probability is 1 - 3*delta and 1 - 2*delta).
void check_tune_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0 / 3.0))
    throw std::invalid_argument("tuner: delta must lie in (0, 1/3)");
}

const Range& require(const std::optional<Range>& r, const char* name) {
  if (!r) throw std::invalid_argument(std::string("param range missing: ") + name);
  if (!(r->min > 0.0) || !(r->max >= r->min))
    throw std::invalid_argument(std::string("param range invalid (need 0 < min <= max): ") + name);
  return *r;
}

}  // namespace

EtaRange eta_range_nonconvex(const ParamRanges& ranges, std::uint64_t T) {
  const Range& beta = require(ranges.smoothness, "smoothness");
  const Range& sigma = require(ranges.grad_noise, "grad_noise");
  const Range& F = require(ranges.initial_gap, "initial_gap");
  const double Td = static_cast<double>(T);
  EtaRange out;
  out.eta_min = std::min(1.0 / (2.0 * beta.max), std::sqrt(F.min / (beta.max * sigma.max * sigma.max * Td)));
  out.eta_max = std::min(1.0 / (2.0 * beta.min), std::sqrt(F.max / (beta.min * sigma.min * sigma.min * Td)));
  if (!(out.eta_min <= out.eta_max))
    throw std::invalid_argument("eta_range_nonconvex: inconsistent ranges (eta_min > eta_max)");
  return out;
}

EtaRange eta_range_convex(const ParamRanges& ranges, std::uint64_t T) {
  const Range& D = require(ranges.diameter, "diameter");
  const Range& G = require(ranges.lipschitz, "lipschitz");
  const Range& sigma = require(ranges.grad_noise, "grad_noise");
  const double Td = static_cast<double>(T);
  EtaRange out;
  out.eta_min = D.min / std::sqrt((G.max * G.max + sigma.max * sigma.max) * Td);
  out.eta_max = D.max / std::sqrt((G.min * G.min + sigma.min * sigma.min) * Td);
  if (!(out.eta_min <= out.eta_max))
    throw std::invalid_argument("eta_range_convex: inconsistent ranges (eta_min > eta_max)");
  return out;
}

NonconvexPlan plan_nonconvex(double eta_min, double eta_max, double delta, std::uint64_t T) {
  check_eta_inputs(eta_min, eta_max, delta);
  const double ratio = eta_max / eta_min;
  NonconvexPlan plan;
  plan.K = ceil_log_count(std::log2(ratio * std::sqrt(log_plus(ratio) * log_plus(1.0 / delta))));
  plan.N = ceil_log_count(std::log2(1.0 / delta));
  const std::uint64_t denom = plan.K * (1 + plan.N);
  plan.Tp = T / denom;
  if (plan.Tp < 1)
    throw std::invalid_argument("nonconvex_tune: budget too small; requires T >= " +
                                std::to_string(denom) + " (K=" + std::to_string(plan.K) +
                                ", N=" + std::to_string(plan.N) + ")");
  return plan;
}

ConvexPlan plan_convex(double eta_min, double eta_max, double delta, std::uint64_t T) {
  check_eta_inputs(eta_min, eta_max, delta);
  ConvexPlan plan;
  plan.K = ceil_log_count(std::log2(eta_max / eta_min));
  plan.N = ceil_log_count(std::log2(1.0 / delta));
  const std::uint64_t denom = 2 * plan.K * plan.N;
  plan.Tp = T / denom;
  if (plan.Tp < 1)
    throw std::invalid_argument("convex_tune_values: budget too small; requires T >= " +
                                std::to_string(denom) + " (K=" + std::to_string(plan.K) +
                                ", N=" + std::to_string(plan.N) + ")");
  plan.grid_factor = std::sqrt(static_cast<double>(denom));
  return plan;
}

namespace {

SelectionResult select_generic(const std::vector<Vec>& candidates, OracleHandle& oracle,
                               std::uint64_t per_candidate_queries, bool by_value) {
  if (candidates.empty())
    throw std::invalid_argument("selection: empty candidate list");
  if (per_candidate_queries < 1)
    throw std::invalid_argument("selection: per-candidate query count must be >= 1");
  SelectionResult out;
  out.scores.reserve(candidates.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < candidates.size(); ++n) {
    double score;
    if (by_value) {
      double sum = 0.0;
      for (std::uint64_t t = 0; t < per_candidate_queries; ++t)
        sum += oracle.value(candidates[n]);
      score = sum / static_cast<double>(per_candidate_queries);
    } else {
      Vec sum(candidates[n].size(), 0.0);
      for (std::uint64_t t = 0; t < per_candidate_queries; ++t)
        axpy(1.0, oracle.gradient(candidates[n]), sum);
      score = norm(sum);
    }
    out.scores.push_back(score);
    if (score < best) {
      best = score;
      out.index = n;
    }
  }
  return out;
}

}  // namespace

SelectionResult select_by_grad_norm(const std::vector<Vec>& candidates, OracleHandle& oracle,
                                    std::uint64_t per_candidate_queries) {
  return select_generic(candidates, oracle, per_candidate_queries, /*by_value=*/false);
}

SelectionResult select_by_value(const std::vector<Vec>& candidates, OracleHandle& oracle,
                                std::uint64_t per_candidate_queries) {
  return select_generic(candidates, oracle, per_candidate_queries, /*by_value=*/true);
}

namespace {

void assert_budget(std::uint64_t used, std::uint64_t budget, const char* who) {
  if (used > budget)
    throw std::logic_error(std::string(who) + ": query budget exceeded (" +
                           std::to_string(used) + " > " + std::to_string(budget) + ")");
}

void apply_scores(std::vector<ArmSummary>& arms, const std::vector<std::uint64_t>& candidate_arm,
                  const std::vector<double>& scores) {
  for (ArmSummary& a : arms) a.best_selection_score = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n = 0; n < scores.size(); ++n) {
    ArmSummary& a = arms[candidate_arm[n] - 1];
    if (std::isnan(a.best_selection_score) || scores[n] < a.best_selection_score)
      a.best_selection_score = scores[n];
  }
}

}  // namespace

TuneResult nonconvex_tune(const Oracle& oracle, const Vec& w1, std::uint64_t T, double delta,
                          double eta_min, double eta_max, RngStream rng) {
  check_tune_delta(delta);
  const NonconvexPlan plan = plan_nonconvex(eta_min, eta_max, delta, T);

  TuneResult result;
  std::vector<Vec> candidates;
  std::vector<std::uint64_t> candidate_arm;  // 1-based arm index per candidate
  for (std::uint64_t k = 1; k <= plan.K; ++k) {
    const double eta_k = std::ldexp(eta_min, static_cast<int>(k) - 1);
    ArmSummary arm;
    arm.param = eta_k;

    RunOptions opts;
    RngStream idx_rng = rng.split(kArmSampleStream).split(k);
    opts.sample_steps.reserve(plan.N);
    for (std::uint64_t n = 0; n < plan.N; ++n) {
      const auto idx =
          1 + static_cast<std::uint64_t>(idx_rng.next_unit() * static_cast<double>(plan.Tp));
      opts.sample_steps.push_back(std::min(idx, plan.Tp));
    }

    OracleHandle handle(oracle, rng.split(kArmRunStream).split(k));
    try {
      RunTrace trace = sgd_run(handle, w1, eta_k, plan.Tp, opts);
      arm.max_dist_from_init = trace.max_dist_from_init;
      arm.final_grad_sq_cumsum = trace.grad_sq_cumsum.back();
      for (Vec& w : trace.sampled_iterates) {
        candidates.push_back(std::move(w));
        candidate_arm.push_back(k);
      }
    } catch (const DivergenceError&) {
      arm.diverged = true;  // arm contributes no candidates
    }
    arm.queries = handle.queries();
    result.total_queries += handle.queries();
    result.arms.push_back(arm);
  }
  if (candidates.empty())
    throw std::runtime_error("nonconvex_tune: every arm diverged; no candidates to select from");

  OracleHandle sel_handle(oracle, rng.split(kSelectionStream));
  const SelectionResult sel = select_by_grad_norm(candidates, sel_handle, plan.Tp);
  result.total_queries += sel_handle.queries();
  apply_scores(result.arms, candidate_arm, sel.scores);

  result.solution = candidates[sel.index];
  result.selected_arm = candidate_arm[sel.index];
  assert_budget(result.total_queries, T, "nonconvex_tune");
  return result;
}

TuneResult convex_tune_values(const Oracle& oracle, const Vec& w1, std::uint64_t T, double delta,
                              double eta_min, double eta_max, RngStream rng) {
  check_tune_delta(delta);
  const ConvexPlan plan = plan_convex(eta_min, eta_max, delta, T);

  TuneResult result;
  std::vector<Vec> candidates;
  std::vector<std::uint64_t> candidate_arm;
  for (std::uint64_t k = 1; k <= plan.K; ++k) {
    const double eta_k = std::ldexp(eta_min, static_cast<int>(k) - 1) * plan.grid_factor;
    ArmSummary arm;
    arm.param = eta_k;
    for (std::uint64_t n = 1; n <= plan.N; ++n) {
      OracleHandle handle(oracle, rng.split(kArmRunStream).split(k).split(n));
      try {
        RunTrace trace = sgd_run(handle, w1, eta_k, plan.Tp);
        arm.max_dist_from_init = std::max(arm.max_dist_from_init, trace.max_dist_from_init);
        arm.final_grad_sq_cumsum = std::max(arm.final_grad_sq_cumsum, trace.grad_sq_cumsum.back());
        candidates.push_back(std::move(trace.average_iterate));
        candidate_arm.push_back(k);
      } catch (const DivergenceError&) {
        arm.diverged = true;
      }
      arm.queries += handle.queries();
      result.total_queries += handle.queries();
    }
    result.arms.push_back(arm);
  }
  if (candidates.empty())
    throw std::runtime_error("convex_tune_values: every arm diverged; no candidates to select from");

  OracleHandle sel_handle(oracle, rng.split(kSelectionStream));
  const SelectionResult sel = select_by_value(candidates, sel_handle, plan.Tp);
  result.total_queries += sel_handle.queries();
  apply_scores(result.arms, candidate_arm, sel.scores);

  result.solution = candidates[sel.index];
  result.selected_arm = candidate_arm[sel.index];
  assert_budget(result.total_queries, T, "convex_tune_values");
  return result;
}

// Natural logs here: the concentration and summation lemmas behind these
// constants are native to ln (base-2 only loosens them), and the diameter
// tuner's step scale is too conservative at bench scale with the looser base.
AlphaGammaTheta alpha_gamma_theta(double G_max, double sigma_max, std::uint64_t T, double delta) {
  if (!(G_max > 0.0) || !(sigma_max > 0.0))
    throw std::invalid_argument("alpha_gamma_theta: G_max and sigma_max must be > 0");
  if (T < 2) throw std::invalid_argument("alpha_gamma_theta: T must be >= 2");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("alpha_gamma_theta: delta must lie in (0, 1)");
  const double Td = static_cast<double>(T);
  const double log_T_delta = std::log(Td / delta);

  AlphaGammaTheta out;
  out.gamma = std::sqrt(5.0 * sigma_max * sigma_max * log_T_delta);
  out.theta = std::log(60.0 * std::log(6.0 * Td) / delta);
  const double a1 = 48.0 * std::log(1.0 + (2.0 * G_max * G_max * Td + 2.0 * sigma_max * sigma_max * Td) /
                                              (5.0 * sigma_max * sigma_max * log_T_delta));
  const double a2 = 32.0 * std::log(1.0 + Td);
  const double a3 =
      128.0 * std::sqrt(out.theta * std::log(1.0 + Td) + out.theta * out.theta / (5.0 * log_T_delta));
  out.alpha = 1.0 / (a1 + a2 + a3);
  return out;
}

TuneResult adaptive_diameter_tune(const Oracle& oracle, const Vec& w1, double D_min, double D_max,
                                  double G_max, double sigma_max, std::uint64_t T, double delta,
                                  RngStream rng) {
  if (!(D_min > 0.0) || !(D_max >= D_min))
    throw std::invalid_argument("adaptive_diameter_tune: need 0 < D_min <= D_max");
  const AlphaGammaTheta agt = alpha_gamma_theta(G_max, sigma_max, T, delta);
  const std::uint64_t K = ceil_log_count(std::log2(D_max / D_min));

  TuneResult result;
  for (std::uint64_t k = 1; k <= K; ++k) {
    AdaPsgdConfig config;
    config.D = std::ldexp(D_min, static_cast<int>(k) + 2);
    config.alpha = agt.alpha;
    config.gamma = agt.gamma;
    config.center = w1;

    OracleHandle handle(oracle, rng.split(kArmRunStream).split(k));
    RunTrace trace = adapsgd_run(handle, config, T);
    ArmSummary arm;
    arm.param = config.D;
    arm.queries = handle.queries();
    arm.max_dist_from_init = trace.max_dist_from_init;
    arm.final_grad_sq_cumsum = trace.grad_sq_cumsum.back();
    result.total_queries += handle.queries();
    result.arms.push_back(arm);

    if (trace.max_dist_from_init < config.D) {
      result.solution = trace.average_iterate;
      result.selected_arm = k;
      result.selected_trace = std::move(trace);
      assert_budget(result.total_queries, T * K, "adaptive_diameter_tune");
      return result;
    }
  }
  result.solution = w1;  // failure case
  result.failed = true;
  assert_budget(result.total_queries, T * K, "adaptive_diameter_tune");
  return result;
}

}  // namespace pfopt
