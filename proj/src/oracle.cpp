#include "pfopt/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace pfopt {

Vec sample_ball_noise(int dim, double radius, RngStream& rng) {
  Vec xi(static_cast<std::size_t>(dim), 0.0);
  if (radius == 0.0) return xi;
  double n = 0.0;
  do {
    for (double& v : xi) v = rng.next_normal();
    n = norm(xi);
  } while (n == 0.0);
  const double r = rng.next_unit();
  double s = radius * std::pow(r, 1.0 / static_cast<double>(dim)) / n;
  scale(xi, s);
  // Rounding can push the norm a hair past the radius; the bound is hard.
  const double out = norm(xi);
  if (out > radius) scale(xi, radius / out);
  return xi;
}

double sample_interval_noise(double radius, RngStream& rng) {
  if (radius == 0.0) return 0.0;
  return radius * (2.0 * rng.next_unit() - 1.0);
}

void OracleHandle::check_dim(VecView w) const {
  if (static_cast<int>(w.size()) != oracle_->problem().dim)
    throw std::invalid_argument("oracle query: dimension mismatch");
}

OracleSample OracleHandle::first_order(VecView w) {
  check_dim(w);
  const NoiseModel& nm = oracle_->noise();
  OracleSample s;
  s.noisy_gradient = oracle_->problem().gradient(w);
  axpy(1.0, sample_ball_noise(oracle_->problem().dim, nm.grad_noise_radius, rng_),
       s.noisy_gradient);
  s.noisy_value = oracle_->problem().value(w) + sample_interval_noise(nm.value_noise_radius, rng_);
  s.query_index = ++queries_;
  return s;
}

Vec OracleHandle::gradient(VecView w) {
  check_dim(w);
  Vec g = oracle_->problem().gradient(w);
  axpy(1.0, sample_ball_noise(oracle_->problem().dim, oracle_->noise().grad_noise_radius, rng_), g);
  ++queries_;
  return g;
}

double OracleHandle::value(VecView w) {
  check_dim(w);
  const double v =
      oracle_->problem().value(w) + sample_interval_noise(oracle_->noise().value_noise_radius, rng_);
  ++queries_;
  return v;
}

}  // namespace pfopt
