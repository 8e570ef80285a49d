#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pfopt/tuner.hpp"

using namespace pfopt;

namespace {

ParamRanges nonconvex_ranges(double b_lo, double b_hi, double s_lo, double s_hi, double f_lo,
                             double f_hi) {
  ParamRanges r;
  r.smoothness = Range{b_lo, b_hi};
  r.grad_noise = Range{s_lo, s_hi};
  r.initial_gap = Range{f_lo, f_hi};
  return r;
}

ParamRanges convex_ranges(double d_lo, double d_hi, double g_lo, double g_hi, double s_lo,
                          double s_hi) {
  ParamRanges r;
  r.diameter = Range{d_lo, d_hi};
  r.lipschitz = Range{g_lo, g_hi};
  r.grad_noise = Range{s_lo, s_hi};
  return r;
}

}  // namespace

TEST_CASE("eta_range_nonconvex") {
  SUBCASE("degenerate ranges collapse to a single point") {
    const EtaRange er = eta_range_nonconvex(nonconvex_ranges(1, 1, 1, 1, 1, 1), 4);
    CHECK(er.eta_min == doctest::Approx(0.5));
    CHECK(er.eta_max == doctest::Approx(0.5));
  }
  SUBCASE("direct formula evaluation") {
    const EtaRange er = eta_range_nonconvex(nonconvex_ranges(1, 4, 1, 2, 1, 16), 16);
    CHECK(er.eta_min == doctest::Approx(1.0 / 16.0));
    CHECK(er.eta_max == doctest::Approx(0.5));
  }
  SUBCASE("scaling T by 100 divides the sqrt branch of eta_min by 10") {
    const EtaRange a = eta_range_nonconvex(nonconvex_ranges(1, 4, 1, 2, 1, 16), 16);
    const EtaRange b = eta_range_nonconvex(nonconvex_ranges(1, 4, 1, 2, 1, 16), 1600);
    CHECK(b.eta_min == doctest::Approx(a.eta_min / 10.0));
  }
  SUBCASE("missing range rejected") {
    ParamRanges r;
    r.smoothness = Range{1, 2};
    CHECK_THROWS_AS(eta_range_nonconvex(r, 16), std::invalid_argument);
  }
}

TEST_CASE("eta_range_convex") {
  SUBCASE("degenerate ranges") {
    const EtaRange er = eta_range_convex(convex_ranges(1, 1, 1, 1, 1, 1), 2);
    CHECK(er.eta_min == doctest::Approx(0.5));
    CHECK(er.eta_max == doctest::Approx(0.5));
  }
  SUBCASE("direct formula evaluation") {
    const EtaRange er = eta_range_convex(convex_ranges(1, 8, 1, 3, 1, 4), 25);
    CHECK(er.eta_min == doctest::Approx(1.0 / 25.0));
    CHECK(er.eta_max == doctest::Approx(8.0 / (5.0 * std::sqrt(2.0))));
  }
  SUBCASE("doubling D_max doubles eta_max only") {
    const EtaRange a = eta_range_convex(convex_ranges(1, 8, 1, 3, 1, 4), 25);
    const EtaRange b = eta_range_convex(convex_ranges(1, 16, 1, 3, 1, 4), 25);
    CHECK(b.eta_max == doctest::Approx(2.0 * a.eta_max));
    CHECK(b.eta_min == a.eta_min);
  }
}

TEST_CASE("non-convex grid plan arithmetic") {
  SUBCASE("ratio 2^10, delta 2^-4, T 6500") {
    const NonconvexPlan plan = plan_nonconvex(std::ldexp(1.0, -10), 1.0, 0.0625, 6500);
    CHECK(plan.K == 13);
    CHECK(plan.N == 4);
    CHECK(plan.Tp == 100);
  }
  SUBCASE("eta_min == eta_max collapses to a single arm") {
    CHECK(plan_nonconvex(0.25, 0.25, 0.5, 1000).K == 1);
    CHECK(plan_nonconvex(0.25, 0.25, 0.25, 1000).K == 1);
  }
  SUBCASE("budget too small is rejected with the required minimum") {
    // K=13, N=4 needs T >= 65
    CHECK_THROWS_WITH_AS(plan_nonconvex(std::ldexp(1.0, -10), 1.0, 0.0625, 64),
                         doctest::Contains("requires T >= 65"), std::invalid_argument);
  }
}

TEST_CASE("convex grid plan arithmetic") {
  SUBCASE("ratio 2^10, delta 2^-4, T 8000") {
    const ConvexPlan plan = plan_convex(std::ldexp(1.0, -10), 1.0, 0.0625, 8000);
    CHECK(plan.K == 10);
    CHECK(plan.N == 4);
    CHECK(plan.Tp == 100);
    CHECK(plan.grid_factor == doctest::Approx(std::sqrt(80.0)));
  }
  SUBCASE("eta_min == eta_max clamps K to 1") {
    CHECK(plan_convex(0.125, 0.125, 0.25, 100).K == 1);
  }
  SUBCASE("budget too small is rejected") {
    CHECK_THROWS_AS(plan_convex(std::ldexp(1.0, -10), 1.0, 0.0625, 79), std::invalid_argument);
  }
}

TEST_CASE("grid coverage: a point within factor 2 of any in-range eta") {
  for (const double delta : {0.05, 0.1, 0.25}) {
    for (const double ratio : {1.0, 2.0, 37.5, 1024.0, 1.0e6}) {
      const double eta_min = 1e-4;
      const double eta_max = eta_min * ratio;
      const NonconvexPlan plan = plan_nonconvex(eta_min, eta_max, delta, 1u << 30);
      const double upper = eta_max * std::sqrt(log_plus(ratio) * log_plus(1.0 / delta));
      for (int i = 0; i <= 1000; ++i) {
        const double eta_star =
            eta_min * std::pow(upper / eta_min, static_cast<double>(i) / 1000.0);
        // some grid point must sit within a factor 2 of eta_star
        bool covered = false;
        for (std::uint64_t k = 1; k <= plan.K && !covered; ++k) {
          const double eta_k = std::ldexp(eta_min, static_cast<int>(k) - 1);
          covered = eta_k / 2.0 <= eta_star && eta_star <= 2.0 * eta_k;
        }
        REQUIRE(covered);
      }
    }
  }
}

TEST_CASE("monotone degradation under widening the eta range by 4x") {
  // The convex tuner's K moves by exactly +2. The non-convex K carries the
  // sqrt(log_plus...) correction inside its log, so +3 occurs (e.g. ratio
  // 2 -> 8 at delta = 0.1). Per-arm stepsizes of the non-convex grid are
  // K-independent, so shared arms keep identical semantics either way.
  for (const double delta : {0.05, 0.1, 0.25}) {
    for (double ratio = 1.0; ratio <= 1.0e7; ratio *= 2.7) {
      const double eta_min = 1e-5;
      const ConvexPlan c1 = plan_convex(eta_min, eta_min * ratio, delta, 1u << 30);
      const ConvexPlan c4 = plan_convex(eta_min, eta_min * ratio * 4.0, delta, 1u << 30);
      CHECK(c4.K - c1.K <= 2);
      if (ratio > 1.0) CHECK(c4.K - c1.K == 2);  // ratio 1 clamps K to 1

      const NonconvexPlan n1 = plan_nonconvex(eta_min, eta_min * ratio, delta, 1u << 30);
      const NonconvexPlan n4 = plan_nonconvex(eta_min, eta_min * ratio * 4.0, delta, 1u << 30);
      CHECK(n4.K >= n1.K + 2);
      CHECK(n4.K <= n1.K + 3);
    }
  }
  {
    const NonconvexPlan a = plan_nonconvex(1e-5, 2e-5, 0.1, 1u << 30);
    const NonconvexPlan b = plan_nonconvex(1e-5, 8e-5, 0.1, 1u << 30);
    CHECK(a.K == 3);
    CHECK(b.K == 6);  // the +3 case is real
  }
}

TEST_CASE("select_by_grad_norm") {
  Problem p = make_test_problem(ProblemKind::kQuadraticSmooth, 1, {1.0, {}});

  SUBCASE("single candidate wins and uses exactly T' queries") {
    Oracle oracle(p, NoiseModel{0.5, 0.0});
    OracleHandle handle(oracle, RngStream(3));
    const SelectionResult sel = select_by_grad_norm({Vec{2.0}}, handle, 25);
    CHECK(sel.index == 0);
    CHECK(handle.queries() == 25);
  }
  SUBCASE("noiseless: exact argmin with lowest-index ties") {
    Oracle oracle(p, NoiseModel{0.0, 0.0});
    OracleHandle handle(oracle, RngStream(3));
    const SelectionResult sel =
        select_by_grad_norm({Vec{2.0}, Vec{-2.0}, Vec{0.5}, Vec{-0.5}}, handle, 10);
    CHECK(sel.index == 2);  // |grad| = 0.5, tie with index 3 broken low
    CHECK(sel.scores[2] == sel.scores[3]);
  }
  SUBCASE("argmin is invariant under positive rescaling of the candidates") {
    Oracle oracle(p, NoiseModel{0.0, 0.0});
    for (double c : {0.001, 1.0, 750.0}) {
      OracleHandle handle(oracle, RngStream(3));
      const SelectionResult sel =
          select_by_grad_norm({Vec{3.0 * c}, Vec{-0.25 * c}, Vec{c}}, handle, 5);
      CHECK(sel.index == 1);
    }
  }
  SUBCASE("separation 10 sigma wins in >= 99% of 1000 seeds") {
    const double sigma = 0.5;
    Oracle oracle(p, NoiseModel{sigma, 0.0});
    int first = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
      OracleHandle handle(oracle, RngStream(seed));
      // gradients 0 and 10*sigma
      if (select_by_grad_norm({Vec{0.0}, Vec{10.0 * sigma}}, handle, 100).index == 0) ++first;
    }
    CHECK(first >= 990);
  }
  SUBCASE("empty candidate list rejected") {
    Oracle oracle(p, NoiseModel{});
    OracleHandle handle(oracle, RngStream(1));
    CHECK_THROWS_AS(select_by_grad_norm({}, handle, 5), std::invalid_argument);
  }
}

TEST_CASE("select_by_value") {
  Problem p = make_test_problem(ProblemKind::kQuadraticSmooth, 1, {2.0, {}});

  SUBCASE("single candidate and exact noiseless argmin") {
    Oracle oracle(p, NoiseModel{0.0, 0.0});
    OracleHandle handle(oracle, RngStream(2));
    CHECK(select_by_value({Vec{5.0}}, handle, 3).index == 0);
    CHECK(select_by_value({Vec{2.0}, Vec{-1.0}, Vec{1.0}, Vec{-1.0}}, handle, 3).index == 1);
  }
  SUBCASE("f-gap of 10 sigma0 wins in >= 99% of 1000 seeds") {
    const double sigma0 = 0.3;
    Oracle oracle(p, NoiseModel{0.0, sigma0});
    // f(w) = w^2, so the f-gap between the candidates is 10 * sigma0
    const double w_hi = std::sqrt(10.0 * sigma0);
    int first = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
      OracleHandle handle(oracle, RngStream(seed));
      if (select_by_value({Vec{0.0}, Vec{w_hi}}, handle, 100).index == 0) ++first;
    }
    CHECK(first >= 990);
  }
}

TEST_CASE("nonconvex_tune on a noiseless quadratic never beats-worse the start point") {
  Problem p = make_test_problem(ProblemKind::kQuadraticSmooth, 2, {2.0, {}});
  Oracle oracle(p, NoiseModel{0.0, 0.0});
  const Vec w1{3.0, -1.0};
  // grid contains 1/(2 beta) = 0.25; the largest arms overflow and are dropped
  TuneResult res =
      nonconvex_tune(oracle, w1, 4000, 0.25, 1.0 / 64.0, std::ldexp(1.0, 20), RngStream(5));
  CHECK(norm_sq(p.gradient(res.solution)) <= norm_sq(p.gradient(w1)));
  CHECK(res.total_queries <= 4000);
  bool any_diverged = false;
  for (const ArmSummary& arm : res.arms) any_diverged = any_diverged || arm.diverged;
  CHECK(any_diverged);
  CHECK(res.selected_arm >= 1);
  CHECK(res.failed == false);
}

TEST_CASE("nonconvex_tune budget accounting is exact on a bounded problem") {
  Problem p = make_test_problem(ProblemKind::kSepNonconvex, 3, {});
  Oracle oracle(p, NoiseModel{0.5, 0.0});
  const std::uint64_t T = 5000;
  const double delta = 0.1;
  const NonconvexPlan plan = plan_nonconvex(0.01, 0.16, delta, T);
  TuneResult res = nonconvex_tune(oracle, Vec{1.0, 1.0, 1.0}, T, delta, 0.01, 0.16, RngStream(7));
  CHECK(res.total_queries == plan.K * (1 + plan.N) * plan.Tp);
  CHECK(res.total_queries <= T);
  CHECK(res.arms.size() == plan.K);
  std::uint64_t arm_queries = 0;
  for (const ArmSummary& arm : res.arms) arm_queries += arm.queries;
  CHECK(arm_queries == plan.K * plan.Tp);
}

TEST_CASE("nonconvex_tune rejects delta outside (0, 1/3)") {
  Problem p = make_test_problem(ProblemKind::kSepNonconvex, 1, {});
  Oracle oracle(p, NoiseModel{});
  CHECK_THROWS_AS(nonconvex_tune(oracle, Vec{1.0}, 1000, 0.5, 0.01, 0.02, RngStream(1)),
                  std::invalid_argument);
}

TEST_CASE("convex_tune_values: noiseless selection returns the best candidate") {
  // 1-D |w - 1|: every run is deterministic, so the tune result must equal
  // the best arm of an independent replay.
  const double G = 1.0, w_star = 1.0;
  Problem p = make_test_problem(ProblemKind::kAbsLipschitz, 1, {G, {w_star}});
  Oracle oracle(p, NoiseModel{0.0, 0.0});
  const std::uint64_t T = 8000;
  const double delta = 0.25, eta_min = 0.001, eta_max = 1.024;
  const ConvexPlan plan = plan_convex(eta_min, eta_max, delta, T);

  TuneResult res = convex_tune_values(oracle, Vec{0.0}, T, delta, eta_min, eta_max, RngStream(9));

  double best_gap = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 1; k <= plan.K; ++k) {
    const double eta = std::ldexp(eta_min, static_cast<int>(k) - 1) * plan.grid_factor;
    double w = 0.0, sum = 0.0;
    for (std::uint64_t t = 0; t < plan.Tp; ++t) {
      sum += w;
      w -= eta * (w < w_star ? -G : (w > w_star ? G : 0.0));
    }
    best_gap = std::min(best_gap, p.value(Vec{sum / static_cast<double>(plan.Tp)}));
  }
  CHECK(p.value(res.solution) == doctest::Approx(best_gap).epsilon(1e-12));
  CHECK(res.total_queries == 2 * plan.K * plan.N * plan.Tp);
  CHECK(res.total_queries <= T);
}

TEST_CASE("alpha_gamma_theta") {
  SUBCASE("gamma matches sqrt(5 sigma^2 ln(T/delta)) at sigma_max=1, T=16, delta=1/2") {
    const AlphaGammaTheta agt = alpha_gamma_theta(1.0, 1.0, 16, 0.5);
    CHECK(agt.gamma == doctest::Approx(std::sqrt(5.0 * std::log(32.0))));
    CHECK(agt.theta == doctest::Approx(std::log(60.0 * std::log(96.0) / 0.5)));
  }
  SUBCASE("alpha <= 1 across a parameter sweep") {
    for (double G : {0.01, 1.0, 100.0})
      for (double sigma : {0.01, 1.0, 100.0})
        for (std::uint64_t T : {2ull, 100ull, 1000000ull})
          for (double delta : {0.001, 0.5, 0.99}) {
            const AlphaGammaTheta agt = alpha_gamma_theta(G, sigma, T, delta);
            REQUIRE(agt.alpha > 0.0);
            REQUIRE(agt.alpha <= 1.0);
          }
  }
  SUBCASE("alpha strictly decreases in G_max") {
    double prev = alpha_gamma_theta(0.5, 1.0, 1000, 0.1).alpha;
    for (double G : {1.0, 2.0, 8.0, 64.0}) {
      const double a = alpha_gamma_theta(G, 1.0, 1000, 0.1).alpha;
      CHECK(a < prev);
      prev = a;
    }
  }
}

TEST_CASE("adaptive_diameter_tune") {
  SUBCASE("first diameter is 8 * D_min; D_min == D_max is a single arm") {
    Problem p = make_test_problem(ProblemKind::kAbsLipschitz, 1, {1.0, {0.5}});
    Oracle oracle(p, NoiseModel{0.0, 0.0});
    TuneResult res =
        adaptive_diameter_tune(oracle, Vec{0.0}, 1.0, 1.0, 1.0, 1.0, 100, 0.1, RngStream(1));
    REQUIRE(res.arms.size() == 1);
    CHECK(res.arms[0].param == doctest::Approx(8.0));
    CHECK(res.total_queries <= 100);
  }

  SUBCASE("noiseless near start: first arm is contained and matches a replay") {
    const double D_min = 1.0, D_max = 16.0, G_max = 1.0, sigma_max = 1.0, delta = 0.1;
    const std::uint64_t T = 100;
    const double w_star = D_min / 2.0;  // ||w1 - w*|| < D_1 / 8
    Problem p = make_test_problem(ProblemKind::kAbsLipschitz, 1, {1.0, {w_star}});
    Oracle oracle(p, NoiseModel{0.0, 0.0});
    TuneResult res = adaptive_diameter_tune(oracle, Vec{0.0}, D_min, D_max, G_max, sigma_max, T,
                                            delta, RngStream(4));
    CHECK(res.failed == false);
    CHECK(res.selected_arm == 1);
    CHECK(res.total_queries == T);

    // independent step-by-step replay of the first arm
    const AlphaGammaTheta agt = alpha_gamma_theta(G_max, sigma_max, T, delta);
    const double D1 = 8.0 * D_min;
    double w = 0.0, cumsum = 0.0, sum = 0.0, max_dist = 0.0;
    for (std::uint64_t t = 1; t <= T; ++t) {
      sum += w;
      const double g = w < w_star ? -1.0 : (w > w_star ? 1.0 : 0.0);
      cumsum += g * g;
      w = std::clamp(w - agt.alpha * D1 / std::sqrt(agt.gamma * agt.gamma + cumsum) * g, -D1, D1);
      max_dist = std::max(max_dist, std::abs(w));
    }
    REQUIRE(max_dist < D1);
    CHECK(res.solution[0] == doctest::Approx(sum / static_cast<double>(T)).epsilon(1e-12));
  }

  SUBCASE("exhaustion returns w1 with failed = true") {
    // A long noiseless run toward a distant minimizer reaches the single
    // arm's boundary, so containment fails and the tuner reports failure.
    const std::uint64_t T = 4000000;
    Problem p = make_test_problem(ProblemKind::kAbsLipschitz, 1, {1.0, {1000.0}});
    Oracle oracle(p, NoiseModel{0.0, 0.0});
    TuneResult res =
        adaptive_diameter_tune(oracle, Vec{0.0}, 1.0, 1.0, 1.0, 1.0, T, 0.9, RngStream(2));
    CHECK(res.failed == true);
    CHECK(res.solution == Vec{0.0});
    CHECK(res.selected_arm == 0);
    REQUIRE(res.arms.size() == 1);
    CHECK(res.arms[0].max_dist_from_init == doctest::Approx(8.0));
    CHECK(res.total_queries == T);
  }
}
