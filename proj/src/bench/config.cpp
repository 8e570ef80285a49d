#include "pfopt/bench/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace pfopt::bench {

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "sgd") return Algorithm::kSgd;
  if (name == "adapsgd") return Algorithm::kAdaPsgd;
  if (name == "alg1") return Algorithm::kAlg1;
  if (name == "alg2") return Algorithm::kAlg2;
  if (name == "alg3") return Algorithm::kAlg3;
  if (name == "noise_est") return Algorithm::kNoiseEst;
  throw ConfigError("algorithm: unknown value '" + name + "'");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kSgd: return "sgd";
    case Algorithm::kAdaPsgd: return "adapsgd";
    case Algorithm::kAlg1: return "alg1";
    case Algorithm::kAlg2: return "alg2";
    case Algorithm::kAlg3: return "alg3";
    case Algorithm::kNoiseEst: return "noise_est";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return x;
}

Vec parse_vec(const std::string& key, const std::string& v) {
  Vec out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated vector");
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_u64(key, trim(item)));
  return out;
}

// Broadcast a 1-element vector to dim, or validate the length.
Vec fit_dim(const std::string& key, Vec v, int dim) {
  if (static_cast<int>(v.size()) == dim) return v;
  if (v.size() == 1) return Vec(static_cast<std::size_t>(dim), v[0]);
  throw ConfigError(key + ": length " + std::to_string(v.size()) + " does not match problem.dim " +
                    std::to_string(dim));
}

struct RangeKeys {
  std::optional<double> lo, hi;
  void finish(const std::string& name, std::optional<Range>& out) const {
    if (!lo && !hi) return;
    if (!lo || !hi) throw ConfigError("ranges." + name + ": need both _min and _max");
    if (!(*lo > 0.0) || !(*hi >= *lo))
      throw ConfigError("ranges." + name + ": need 0 < min <= max");
    out = Range{*lo, *hi};
  }
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (kv.count(key)) throw ConfigError(key + ": duplicate key");
    kv[key] = value;
  }

  ExperimentConfig cfg;
  RangeKeys d, g, beta, sig, f;
  std::optional<std::uint64_t> seeds_base, seeds_count;
  Vec w1_raw, minimizer_raw;

  for (const auto& [key, value] : kv) {
    if (key == "algorithm") cfg.algorithm = algorithm_from_string(value);
    else if (key == "problem.kind") cfg.problem_kind = problem_kind_from_string(value);
    else if (key == "problem.dim") cfg.dim = static_cast<int>(parse_u64(key, value));
    else if (key == "problem.scale") cfg.problem_scale = parse_double(key, value);
    else if (key == "problem.minimizer") minimizer_raw = parse_vec(key, value);
    else if (key == "noise.sigma") cfg.sigma = parse_double(key, value);
    else if (key == "noise.sigma0") cfg.sigma0 = parse_double(key, value);
    else if (key == "w1") w1_raw = parse_vec(key, value);
    else if (key == "T") cfg.T = parse_u64(key, value);
    else if (key == "delta") cfg.delta = parse_double(key, value);
    else if (key == "eta") cfg.eta = parse_double(key, value);
    else if (key == "eta_min") cfg.eta_min = parse_double(key, value);
    else if (key == "eta_max") cfg.eta_max = parse_double(key, value);
    else if (key == "adapsgd.d") cfg.adapsgd_D = parse_double(key, value);
    else if (key == "adapsgd.alpha") cfg.adapsgd_alpha = parse_double(key, value);
    else if (key == "adapsgd.gamma") cfg.adapsgd_gamma = parse_double(key, value);
    else if (key == "ranges.d_min") d.lo = parse_double(key, value);
    else if (key == "ranges.d_max") d.hi = parse_double(key, value);
    else if (key == "ranges.g_min") g.lo = parse_double(key, value);
    else if (key == "ranges.g_max") g.hi = parse_double(key, value);
    else if (key == "ranges.beta_min") beta.lo = parse_double(key, value);
    else if (key == "ranges.beta_max") beta.hi = parse_double(key, value);
    else if (key == "ranges.sigma_min") sig.lo = parse_double(key, value);
    else if (key == "ranges.sigma_max") sig.hi = parse_double(key, value);
    else if (key == "ranges.f_min") f.lo = parse_double(key, value);
    else if (key == "ranges.f_max") f.hi = parse_double(key, value);
    else if (key == "seeds.base") seeds_base = parse_u64(key, value);
    else if (key == "seeds.count") seeds_count = parse_u64(key, value);
    else if (key == "seeds.list") cfg.seeds = parse_u64_list(key, value);
    else if (key == "metric") {
      if (value == "f_gap") cfg.metric = Metric::kFGap;
      else if (value == "grad_sq") cfg.metric = Metric::kGradSq;
      else if (value == "sigma_bound") cfg.metric = Metric::kSigmaBound;
      else throw ConfigError("metric: unknown value '" + value + "'");
    }
    else if (key == "output.summary") cfg.output_summary = value;
    else if (key == "output.aggregate") cfg.output_aggregate = value;
    else if (key == "output.traces") cfg.output_traces = value;
    else throw ConfigError(key + ": unknown key");
  }

  d.finish("d", cfg.ranges.diameter);
  g.finish("g", cfg.ranges.lipschitz);
  beta.finish("beta", cfg.ranges.smoothness);
  sig.finish("sigma", cfg.ranges.grad_noise);
  f.finish("f", cfg.ranges.initial_gap);

  if (cfg.dim < 1) throw ConfigError("problem.dim: must be >= 1");
  if (cfg.T < 1) throw ConfigError("T: required and must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta: must lie in (0, 1)");
  if (cfg.sigma < 0.0) throw ConfigError("noise.sigma: must be >= 0");
  if (cfg.sigma0 < 0.0) throw ConfigError("noise.sigma0: must be >= 0");

  if (!minimizer_raw.empty()) cfg.problem_minimizer = fit_dim("problem.minimizer", minimizer_raw, cfg.dim);
  cfg.w1 = w1_raw.empty() ? Vec(static_cast<std::size_t>(cfg.dim), 0.0)
                          : fit_dim("w1", w1_raw, cfg.dim);

  if (seeds_base || seeds_count) {
    if (!cfg.seeds.empty()) throw ConfigError("seeds.list given alongside seeds.base/count");
    if (!seeds_base || !seeds_count) throw ConfigError("seeds: need both seeds.base and seeds.count");
    for (std::uint64_t i = 0; i < *seeds_count; ++i) cfg.seeds.push_back(*seeds_base + i);
  }
  if (cfg.seeds.empty()) throw ConfigError("seeds: provide seeds.list or seeds.base + seeds.count");

  if ((cfg.eta_min.has_value()) != (cfg.eta_max.has_value()))
    throw ConfigError("eta_min/eta_max: need both or neither");

  switch (cfg.algorithm) {
    case Algorithm::kSgd:
      if (!cfg.eta) throw ConfigError("eta: required for algorithm sgd");
      break;
    case Algorithm::kAdaPsgd:
      if (!cfg.adapsgd_D || !cfg.adapsgd_alpha || !cfg.adapsgd_gamma)
        throw ConfigError("adapsgd.d/adapsgd.alpha/adapsgd.gamma: required for algorithm adapsgd");
      break;
    case Algorithm::kAlg1:
      if (!cfg.eta_min && !(cfg.ranges.smoothness && cfg.ranges.grad_noise && cfg.ranges.initial_gap))
        throw ConfigError("alg1: need eta_min/eta_max or ranges.beta_*, ranges.sigma_*, ranges.f_*");
      break;
    case Algorithm::kAlg2:
      if (!cfg.eta_min && !(cfg.ranges.diameter && cfg.ranges.lipschitz && cfg.ranges.grad_noise))
        throw ConfigError("alg2: need eta_min/eta_max or ranges.d_*, ranges.g_*, ranges.sigma_*");
      break;
    case Algorithm::kAlg3:
      if (!cfg.ranges.diameter) throw ConfigError("alg3: ranges.d_min/d_max required");
      if (!cfg.ranges.lipschitz) throw ConfigError("alg3: ranges.g_max required");
      if (!cfg.ranges.grad_noise) throw ConfigError("alg3: ranges.sigma_max required");
      break;
    case Algorithm::kNoiseEst:
      break;
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Metric effective_metric(const ExperimentConfig& config) {
  if (config.metric) return *config.metric;
  switch (config.algorithm) {
    case Algorithm::kAlg1: return Metric::kGradSq;
    case Algorithm::kNoiseEst: return Metric::kSigmaBound;
    default: return Metric::kFGap;
  }
}

}  // namespace pfopt::bench
