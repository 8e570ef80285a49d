#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "pfopt/vec.hpp"

namespace pfopt {

// An objective with exact evaluators plus whatever ground-truth constants are
// known for it. The constants are used only for verification and benchmark
// curves; tuning algorithms never see them.
struct Problem {
  int dim = 0;
  std::function<double(VecView)> value;
  std::function<Vec(VecView)> gradient;
  std::optional<double> lipschitz;       // G*
  std::optional<double> smoothness;      // beta*
  std::optional<Vec> minimizer;          // w*
  std::optional<double> min_value;       // f*
  bool lower_bounded = false;
};

enum class ProblemKind {
  kAbsLipschitz,     // f(w) = G * ||w - w*||
  kQuadraticSmooth,  // f(w) = (beta/2) * ||w - w*||^2
  kSepNonconvex,     // f(w) = sum_i r(w_i - w*_i), r(x) = x^2 / (1 + x^2)
};

struct ProblemParams {
  // G for kAbsLipschitz, beta for kQuadraticSmooth; ignored by kSepNonconvex.
  double scale = 1.0;
  // Minimizer w*; empty means the origin.
  Vec minimizer;
};

ProblemKind problem_kind_from_string(const std::string& name);
std::string to_string(ProblemKind kind);

// Builds one of the three test objectives with all ground-truth constants
// populated. Throws std::invalid_argument on bad kind/params.
Problem make_test_problem(ProblemKind kind, int dim, const ProblemParams& params);

}  // namespace pfopt
