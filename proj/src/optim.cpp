#include "pfopt/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfopt {

Vec project_ball(VecView w, VecView center, double D) {
  if (w.size() != center.size())
    throw std::invalid_argument("project_ball: dimension mismatch");
  if (D < 0.0) throw std::invalid_argument("project_ball: D must be >= 0");
  Vec d = sub(w, center);
  const double n = norm(d);
  if (n <= D) return Vec(w.begin(), w.end());
  // Scale the unit direction; d_i/n is exact in 1-D, and the shrink loop
  // absorbs any rounding past the radius in higher dimensions.
  for (double& v : d) v /= n;
  double s = D;
  Vec out(w.size());
  for (;;) {
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = center[i] + s * d[i];
    if (dist(out, center) <= D) return out;
    s = std::nextafter(s, 0.0);
  }
}

double adagrad_stepsize(double alpha, double D, double gamma, double grad_sq_cumsum) {
  const double denom_sq = gamma * gamma + grad_sq_cumsum;
  if (denom_sq <= 0.0)
    throw std::invalid_argument("adagrad_stepsize: gamma^2 + cumsum must be > 0");
  return alpha * D / std::sqrt(denom_sq);
}

namespace {

struct TraceBuilder {
  TraceBuilder(const Vec& w1, std::uint64_t T, const RunOptions& opts)
      : opts_(&opts), store_all_(T <= opts.iterate_storage_cap) {
    trace_.grad_norms.reserve(T);
    trace_.grad_sq_cumsum.reserve(T);
    trace_.dist_from_init.reserve(T);
    trace_.etas.reserve(T);
    trace_.average_iterate.assign(w1.size(), 0.0);
    if (store_all_) {
      trace_.iterates.reserve(T + 1);
      trace_.iterates.push_back(w1);
    }
    trace_.sampled_iterates.resize(opts.sample_steps.size());
  }

  // Called with w_t before the update at step t (1-based).
  void at_iterate(std::uint64_t t, const Vec& w) {
    axpy(1.0, w, trace_.average_iterate);
    for (std::size_t i = 0; i < opts_->sample_steps.size(); ++i)
      if (opts_->sample_steps[i] == t) trace_.sampled_iterates[i] = w;
  }

  void after_step(const Vec& w_next, const Vec& w1, double grad_norm, double cumsum,
                  double eta) {
    trace_.grad_norms.push_back(grad_norm);
    trace_.grad_sq_cumsum.push_back(cumsum);
    const double d = dist(w_next, w1);
    trace_.dist_from_init.push_back(d);
    trace_.max_dist_from_init = std::max(trace_.max_dist_from_init, d);
    trace_.etas.push_back(eta);
    if (store_all_) trace_.iterates.push_back(w_next);
  }

  RunTrace finish(std::uint64_t T, std::uint64_t queries) {
    scale(trace_.average_iterate, 1.0 / static_cast<double>(T));
    trace_.steps = T;
    trace_.queries_used = queries;
    return std::move(trace_);
  }

  const RunOptions* opts_;
  bool store_all_;
  RunTrace trace_;
};

}  // namespace

RunTrace sgd_run(OracleHandle& oracle, const Vec& w1, double eta, std::uint64_t T,
                 const RunOptions& opts) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("sgd_run: eta must be finite and positive");
  if (T < 1) throw std::invalid_argument("sgd_run: T must be >= 1");
  const std::uint64_t q0 = oracle.queries();

  TraceBuilder tb(w1, T, opts);
  Vec w = w1;
  double cumsum = 0.0;
  for (std::uint64_t t = 1; t <= T; ++t) {
    tb.at_iterate(t, w);
    Vec g = oracle.gradient(w);
    cumsum += norm_sq(g);
    axpy(-eta, g, w);
    if (!all_finite(w)) throw DivergenceError(t, eta);
    tb.after_step(w, w1, norm(g), cumsum, eta);
  }
  return tb.finish(T, oracle.queries() - q0);
}

RunTrace adapsgd_run(OracleHandle& oracle, const AdaPsgdConfig& config, std::uint64_t T,
                     const RunOptions& opts) {
  if (!(config.D > 0.0)) throw std::invalid_argument("adapsgd_run: D must be > 0");
  if (!(config.alpha > 0.0)) throw std::invalid_argument("adapsgd_run: alpha must be > 0");
  if (config.gamma < 0.0) throw std::invalid_argument("adapsgd_run: gamma must be >= 0");
  if (T < 1) throw std::invalid_argument("adapsgd_run: T must be >= 1");
  const std::uint64_t q0 = oracle.queries();

  TraceBuilder tb(config.center, T, opts);
  Vec w = config.center;
  double cumsum = 0.0;
  for (std::uint64_t t = 1; t <= T; ++t) {
    tb.at_iterate(t, w);
    Vec g = oracle.gradient(w);
    if (!all_finite(g)) throw DivergenceError(t, 0.0);
    cumsum += norm_sq(g);
    const double eta = adagrad_stepsize(config.alpha, config.D, config.gamma, cumsum);
    axpy(-eta, g, w);
    w = project_ball(w, config.center, config.D);
    if (!all_finite(w)) throw DivergenceError(t, eta);
    tb.after_step(w, config.center, norm(g), cumsum, eta);
  }
  return tb.finish(T, oracle.queries() - q0);
}

}  // namespace pfopt
