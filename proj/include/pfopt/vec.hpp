#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace pfopt {

using Vec = std::vector<double>;
using VecView = std::span<const double>;

inline double dot(VecView a, VecView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(VecView a) { return dot(a, a); }

inline double norm(VecView a) { return std::sqrt(norm_sq(a)); }

inline double dist(VecView a, VecView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// y += a * x
inline void axpy(double a, VecView x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline Vec sub(VecView a, VecView b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline void scale(Vec& a, double s) {
  for (double& v : a) v *= s;
}

inline bool all_finite(VecView a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace pfopt
