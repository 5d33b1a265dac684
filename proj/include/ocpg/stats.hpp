#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ocpg/env.hpp"
#include "ocpg/linalg.hpp"

namespace ocpg {

// ---------------------------------------------------------------------------
// Special functions (no external statistics dependency; exact small-n
// behavior is testable by brute force).

// Regularized incomplete beta I_x(a, b) via Lentz continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

double normal_cdf(double z);

double student_t_cdf(double t, double dof);

// Two-sided tail probability for |t| under Student's t.
double student_t_two_sided_p(double t, double dof);

// Inverse CDF by bisection; p in (0, 1).
double student_t_quantile(double p, double dof);

// ---------------------------------------------------------------------------
// Evaluation protocol

struct EvalPoint {
  long step = 0;
  double reward = 0.0;
};
using EvalSeries = std::vector<EvalPoint>;

struct EvalCurve {
  std::string algorithm;
  std::string environment;
  std::vector<std::uint64_t> seeds;
  std::vector<EvalSeries> series;  // one per seed, identical step grids
};

using Policy = std::function<Vector(const Vector&)>;

// Mean undiscounted return over n_episodes under deterministic, clipped
// actions. The environment is re-seeded with eval_seed first, so repeated
// evaluations see identical initial states.
double evaluate_policy(const Policy& policy, Environment& env, int n_episodes,
                       std::uint64_t eval_seed);

// Offset added to the training seed to form the evaluation seed.
constexpr std::uint64_t kEvalSeedOffset = 1'000'000;

// Per-seed mean of the final `tail` evaluation rewards.
std::vector<double> converged_rewards(const EvalCurve& curve, int tail = 50);

// Sliding-window mean, window = max(1, round(0.05 n)), shrinking at the head.
EvalSeries smooth_series(const EvalSeries& series);

struct Ci {
  double mean = 0.0;
  double half_width = 0.0;
};

// Student-t confidence interval for the mean.
Ci confidence_interval(std::span<const double> values, double level = 0.95);

// ---------------------------------------------------------------------------
// Significance tests

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

struct StatReport {
  TestResult welch;
  TestResult student;
  TestResult paired;
  TestResult wilcoxon;
};

TestResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05);
TestResult student_t_test(std::span<const double> a, std::span<const double> b,
                          double alpha = 0.05);
TestResult paired_t_test(std::span<const double> a, std::span<const double> b,
                         double alpha = 0.05);
// Rank-sum test with midranks. Exact subset enumeration when both groups have
// at most 7 values; otherwise the tie-corrected normal approximation (no
// continuity correction). The statistic is the rank sum of the first group.
TestResult wilcoxon_rank_sum_test(std::span<const double> a, std::span<const double> b,
                                  double alpha = 0.05);

// All four tests, two-sided at the given level.
StatReport significance_tests(std::span<const double> a, std::span<const double> b,
                              double alpha = 0.05);

}  // namespace ocpg
