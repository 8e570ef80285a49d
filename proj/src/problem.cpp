#include "pfopt/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace pfopt {

namespace {

Vec resolve_minimizer(int dim, const ProblemParams& params) {
  if (params.minimizer.empty()) return Vec(static_cast<std::size_t>(dim), 0.0);
  if (static_cast<int>(params.minimizer.size()) != dim)
    throw std::invalid_argument("make_test_problem: minimizer length != dim");
  return params.minimizer;
}

}  // namespace

ProblemKind problem_kind_from_string(const std::string& name) {
  if (name == "abs_lipschitz") return ProblemKind::kAbsLipschitz;
  if (name == "quadratic_smooth") return ProblemKind::kQuadraticSmooth;
  if (name == "sep_nonconvex") return ProblemKind::kSepNonconvex;
  throw std::invalid_argument("unknown problem kind: " + name);
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kAbsLipschitz: return "abs_lipschitz";
    case ProblemKind::kQuadraticSmooth: return "quadratic_smooth";
    case ProblemKind::kSepNonconvex: return "sep_nonconvex";
  }
  return "?";
}

Problem make_test_problem(ProblemKind kind, int dim, const ProblemParams& params) {
  if (dim < 1) throw std::invalid_argument("make_test_problem: dim must be >= 1");
  Vec center = resolve_minimizer(dim, params);

  Problem p;
  p.dim = dim;
  p.minimizer = center;
  p.min_value = 0.0;
  p.lower_bounded = true;

  switch (kind) {
    case ProblemKind::kAbsLipschitz: {
      const double g = params.scale;
      if (g <= 0.0) throw std::invalid_argument("abs_lipschitz: scale (G) must be > 0");
      p.lipschitz = g;
      p.value = [g, center](VecView w) { return g * dist(w, center); };
      p.gradient = [g, center](VecView w) {
        Vec d = sub(w, center);
        const double n = norm(d);
        if (n == 0.0) return Vec(d.size(), 0.0);  // subgradient at the kink
        scale(d, g / n);
        return d;
      };
      break;
    }
    case ProblemKind::kQuadraticSmooth: {
      const double beta = params.scale;
      if (beta <= 0.0) throw std::invalid_argument("quadratic_smooth: scale (beta) must be > 0");
      p.smoothness = beta;
      p.value = [beta, center](VecView w) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          const double d = w[i] - center[i];
          s += d * d;
        }
        return 0.5 * beta * s;
      };
      p.gradient = [beta, center](VecView w) {
        Vec g(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) g[i] = beta * (w[i] - center[i]);
        return g;
      };
      break;
    }
    case ProblemKind::kSepNonconvex: {
      // Per-coordinate r(x) = x^2/(1+x^2): bounded in [0,1), |r'| <= 3*sqrt(3)/8,
      // |r''| <= 2, so the separable sum has beta* = 2 and G* = sqrt(d)*3*sqrt(3)/8.
      p.smoothness = 2.0;
      p.lipschitz = std::sqrt(static_cast<double>(dim)) * 3.0 * std::sqrt(3.0) / 8.0;
      p.value = [center](VecView w) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          const double x = w[i] - center[i];
          s += x * x / (1.0 + x * x);
        }
        return s;
      };
      p.gradient = [center](VecView w) {
        Vec g(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
          const double x = w[i] - center[i];
          const double q = 1.0 + x * x;
          g[i] = 2.0 * x / (q * q);
        }
        return g;
      };
      break;
    }
  }
  return p;
}

}  // namespace pfopt
