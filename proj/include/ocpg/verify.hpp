#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocpg/oracle.hpp"
#include "ocpg/zeroth_order.hpp"

namespace ocpg {

// Reverse-mode gradients against central finite differences on random
// networks (sampled parameter coordinates per case).
struct GradCheckResult {
  int cases = 0;
  double max_rel_error = 0.0;
  double seconds = 0.0;
  bool passed = false;
  std::vector<double> per_case_error;
};

GradCheckResult verify_gradcheck(std::uint64_t seed = 2024, int n_cases = 50);

// Smoothing-bias bound on analytic G-smooth test functions over a grid of
// (function, dimension, mu), plus the 1/sqrt(N) convergence-rate check of the
// two-point Monte-Carlo mean.
struct Proposition1Result {
  std::vector<BiasCheckRow> bias_rows;
  std::vector<std::pair<long, double>> convergence;  // (n_samples, mean error)
  double convergence_slope = 0.0;                    // log-log regression
  bool bias_passed = false;
  bool slope_passed = false;
  bool passed = false;
  double seconds = 0.0;
};

Proposition1Result verify_proposition1(std::uint64_t seed = 2024);

// Gradient-error bound on randomized linear-quadratic configurations with
// oracle and perturbed critics, the near-zero oracle-critic gap, and the
// U-shape of the bound across a mu sweep.
struct Theorem1Case {
  std::string label;
  int state_dim = 0;
  BoundReport report;
};

struct Theorem1Result {
  std::vector<Theorem1Case> cases;
  std::vector<BoundReport> mu_sweep;  // fixed imperfect critic
  bool bound_passed = false;          // every case within bound + 3 SE
  bool oracle_gap_passed = false;     // exact-critic cases within MC noise
  bool sweep_u_shaped = false;
  bool passed = false;
  double seconds = 0.0;
};

Theorem1Result verify_theorem1(std::uint64_t seed = 2024, int n_random_cases = 20);

// Linear-gradient-form compatibility diagnostics.
struct CompatResult {
  double constructed_residual = 0.0;  // compatible-by-construction critic
  double mlp_residual = 0.0;          // generic network critic
  double mlp_gradient_rms = 0.0;
  double offset_residual_delta = 0.0;
  bool passed = false;
};

CompatResult verify_compat(std::uint64_t seed = 2024);

// The four significance tests and the t-quantiles against frozen reference
// values (external reference implementation and published tables).
struct StatsVerifyRow {
  std::string label;
  double value = 0.0;
  double reference = 0.0;
  bool pass = false;
};

struct StatsVerifyResult {
  std::vector<StatsVerifyRow> rows;
  bool passed = false;
};

StatsVerifyResult verify_stats();

}  // namespace ocpg
