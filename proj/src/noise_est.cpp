#include "pfopt/noise_est.hpp"

#include <cmath>
#include <stdexcept>

namespace pfopt {

NoiseBoundReport estimate_noise_bound(OracleHandle& oracle, const Vec& w1, std::uint64_t T,
                                      double delta) {
  if (T < 2) throw std::invalid_argument("estimate_noise_bound: T must be >= 2");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("estimate_noise_bound: delta must lie in (0, 1)");

  NoiseBoundReport report;
  report.n_used = T / 2;
  report.c_const = 4.0 * std::sqrt(1.0 + 3.0 * std::log2(1.0 / delta));

  Vec z(w1.size(), 0.0);
  for (std::uint64_t i = 0; i < report.n_used; ++i) axpy(1.0, oracle.gradient(w1), z);
  scale(z, 1.0 / static_cast<double>(report.n_used));

  report.z_norm = norm(z);
  report.sigma_bound = 2.0 * report.z_norm * std::sqrt(static_cast<double>(T)) / report.c_const;
  return report;
}

bool bad_enough_initialization(const Problem& problem, const NoiseModel& noise, const Vec& w1,
                               std::uint64_t T, double delta) {
  if (!problem.minimizer || !problem.min_value)
    throw std::invalid_argument("bad_enough_initialization: needs ground-truth w* and f*");
  const double c = 4.0 * std::sqrt(1.0 + 3.0 * std::log2(1.0 / delta));
  const double gap = problem.value(w1) - *problem.min_value;
  const double d_star = dist(w1, *problem.minimizer);
  return gap > c * noise.grad_noise_radius * d_star / std::sqrt(static_cast<double>(T));
}

}  // namespace pfopt
