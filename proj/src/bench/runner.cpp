#include "pfopt/bench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "pfopt/noise_est.hpp"
#include "pfopt/optim.hpp"
#include "pfopt/oracle.hpp"
#include "pfopt/tuner.hpp"

namespace pfopt::bench {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

unsigned worker_count() {
  if (const char* env = std::getenv("PFOPT_WORKERS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1 && n <= 256) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct SeedOutcome {
  Vec solution;
  std::uint64_t queries = 0;
  std::uint64_t selected_arm = 0;
  bool failed = false;
  double direct_metric = 0.0;   // used by noise_est
  bool has_direct_metric = false;
  const RunTrace* trace = nullptr;  // valid only within run_seed
};

EtaRange resolve_eta_range(const ExperimentConfig& cfg) {
  if (cfg.eta_min) return EtaRange{*cfg.eta_min, *cfg.eta_max};
  if (cfg.algorithm == Algorithm::kAlg1) return eta_range_nonconvex(cfg.ranges, cfg.T);
  return eta_range_convex(cfg.ranges, cfg.T);
}

std::string trace_path(const ExperimentConfig& cfg, std::uint64_t seed) {
  return cfg.output_traces + "/trace_seed" + std::to_string(seed) + ".csv";
}

void write_trace(const std::string& path, const RunTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "step,grad_norm,dist_init,eta\n";
  for (std::size_t t = 0; t < trace.grad_norms.size(); ++t)
    out << (t + 1) << ',' << format_double(trace.grad_norms[t]) << ','
        << format_double(trace.dist_from_init[t]) << ',' << format_double(trace.etas[t]) << '\n';
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double benchmark_rate(const ExperimentConfig& cfg) {
  ProblemParams params;
  params.scale = cfg.problem_scale;
  params.minimizer = cfg.problem_minimizer;
  const Problem problem = make_test_problem(cfg.problem_kind, cfg.dim, params);
  const double Td = static_cast<double>(cfg.T);
  const double sigma = cfg.sigma;
  const double d_star = dist(cfg.w1, *problem.minimizer);
  switch (cfg.problem_kind) {
    case ProblemKind::kAbsLipschitz:
      return d_star * (*problem.lipschitz + sigma) / std::sqrt(Td);
    case ProblemKind::kQuadraticSmooth:
      return *problem.smoothness * d_star * d_star / Td + d_star * sigma / std::sqrt(Td);
    case ProblemKind::kSepNonconvex: {
      const double F = problem.value(cfg.w1) - *problem.min_value;
      const double beta = *problem.smoothness;
      return beta * F / Td + sigma * sigma / Td + std::sqrt(beta * F * sigma * sigma / Td);
    }
  }
  return 0.0;
}

SummaryRecord run_experiment(const ExperimentConfig& cfg) {
  ProblemParams params;
  params.scale = cfg.problem_scale;
  params.minimizer = cfg.problem_minimizer;
  const Problem problem = make_test_problem(cfg.problem_kind, cfg.dim, params);
  const NoiseModel noise{cfg.sigma, cfg.sigma0};
  const Oracle oracle(problem, noise);
  const Metric metric_kind = effective_metric(cfg);

  if (!cfg.output_traces.empty()) std::filesystem::create_directories(cfg.output_traces);

  SummaryRecord record;
  record.algorithm = to_string(cfg.algorithm);
  record.T = cfg.T;
  record.rows.resize(cfg.seeds.size());

  parallel_for(cfg.seeds.size(), [&](std::size_t i) {
    const std::uint64_t seed = cfg.seeds[i];
    SeedRow row;
    row.seed = seed;
    row.algorithm = to_string(cfg.algorithm);
    row.T = cfg.T;
    const auto t0 = std::chrono::steady_clock::now();

    RunTrace single_trace;
    SeedOutcome outcome;
    try {
      RngStream rng(seed);
      switch (cfg.algorithm) {
        case Algorithm::kSgd: {
          OracleHandle handle(oracle, rng);
          single_trace = sgd_run(handle, cfg.w1, *cfg.eta, cfg.T);
          outcome.solution = single_trace.average_iterate;
          outcome.queries = handle.queries();
          outcome.trace = &single_trace;
          break;
        }
        case Algorithm::kAdaPsgd: {
          OracleHandle handle(oracle, rng);
          AdaPsgdConfig ac{*cfg.adapsgd_D, *cfg.adapsgd_alpha, *cfg.adapsgd_gamma, cfg.w1};
          single_trace = adapsgd_run(handle, ac, cfg.T);
          outcome.solution = single_trace.average_iterate;
          outcome.queries = handle.queries();
          outcome.trace = &single_trace;
          break;
        }
        case Algorithm::kAlg1: {
          const EtaRange er = resolve_eta_range(cfg);
          TuneResult res =
              nonconvex_tune(oracle, cfg.w1, cfg.T, cfg.delta, er.eta_min, er.eta_max, rng);
          outcome.solution = res.solution;
          outcome.queries = res.total_queries;
          outcome.selected_arm = res.selected_arm;
          break;
        }
        case Algorithm::kAlg2: {
          const EtaRange er = resolve_eta_range(cfg);
          TuneResult res =
              convex_tune_values(oracle, cfg.w1, cfg.T, cfg.delta, er.eta_min, er.eta_max, rng);
          outcome.solution = res.solution;
          outcome.queries = res.total_queries;
          outcome.selected_arm = res.selected_arm;
          break;
        }
        case Algorithm::kAlg3: {
          TuneResult res = adaptive_diameter_tune(
              oracle, cfg.w1, cfg.ranges.diameter->min, cfg.ranges.diameter->max,
              cfg.ranges.lipschitz->max, cfg.ranges.grad_noise->max, cfg.T, cfg.delta, rng);
          outcome.solution = res.solution;
          outcome.queries = res.total_queries;
          outcome.selected_arm = res.selected_arm;
          outcome.failed = res.failed;
          if (res.selected_trace) {
            single_trace = std::move(*res.selected_trace);
            outcome.trace = &single_trace;
          }
          break;
        }
        case Algorithm::kNoiseEst: {
          OracleHandle handle(oracle, rng);
          const NoiseBoundReport rep = estimate_noise_bound(handle, cfg.w1, cfg.T, cfg.delta);
          outcome.queries = handle.queries();
          outcome.direct_metric = rep.sigma_bound;
          outcome.has_direct_metric = true;
          break;
        }
      }

      if (outcome.has_direct_metric) {
        row.metric = outcome.direct_metric;
      } else if (metric_kind == Metric::kGradSq) {
        row.metric = norm_sq(problem.gradient(outcome.solution));
      } else {
        row.metric = problem.value(outcome.solution) - problem.min_value.value_or(0.0);
      }
      row.queries = outcome.queries;
      row.selected_arm = outcome.selected_arm;
      row.failed = outcome.failed;
      if (outcome.trace != nullptr && !cfg.output_traces.empty())
        write_trace(trace_path(cfg, seed), *outcome.trace);
    } catch (const DivergenceError&) {
      row.failed = true;
      row.metric = std::numeric_limits<double>::quiet_NaN();
    }

    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    record.rows[i] = std::move(row);
  });

  std::stable_sort(record.rows.begin(), record.rows.end(),
                   [](const SeedRow& a, const SeedRow& b) { return a.seed < b.seed; });

  std::vector<double> metrics;
  metrics.reserve(record.rows.size());
  for (const SeedRow& row : record.rows) {
    metrics.push_back(row.metric);
    record.max_queries = std::max(record.max_queries, row.queries);
    if (row.failed) ++record.failures;
  }
  record.median = quantile(metrics, 0.5);
  record.q10 = quantile(metrics, 0.1);
  record.q90 = quantile(metrics, 0.9);
  record.benchmark = benchmark_rate(cfg);

  if (!cfg.output_summary.empty()) {
    std::ofstream out(cfg.output_summary, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write summary file: " + cfg.output_summary);
    out << summary_csv(record);
  }
  if (!cfg.output_aggregate.empty()) {
    std::ofstream out(cfg.output_aggregate, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write aggregate file: " + cfg.output_aggregate);
    out << aggregate_csv(record);
  }
  return record;
}

std::string summary_csv(const SummaryRecord& record) {
  std::string out = "seed,algorithm,T,metric,queries,selected_arm,failed\n";
  for (const SeedRow& row : record.rows) {
    out += std::to_string(row.seed);
    out += ',';
    out += row.algorithm;
    out += ',';
    out += std::to_string(row.T);
    out += ',';
    out += format_double(row.metric);
    out += ',';
    out += std::to_string(row.queries);
    out += ',';
    out += std::to_string(row.selected_arm);
    out += ',';
    out += row.failed ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string aggregate_csv(const SummaryRecord& record) {
  std::string out = "algorithm,T,seeds,median,q10,q90,benchmark,max_queries,failures\n";
  out += record.algorithm;
  out += ',';
  out += std::to_string(record.T);
  out += ',';
  out += std::to_string(record.rows.size());
  out += ',';
  out += format_double(record.median);
  out += ',';
  out += format_double(record.q10);
  out += ',';
  out += format_double(record.q90);
  out += ',';
  out += format_double(record.benchmark);
  out += ',';
  out += std::to_string(record.max_queries);
  out += ',';
  out += std::to_string(record.failures);
  out += '\n';
  return out;
}

}  // namespace pfopt::bench
