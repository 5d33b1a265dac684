#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ocpg/env.hpp"
#include "ocpg/linalg.hpp"
#include "ocpg/mlp.hpp"
#include "ocpg/rng.hpp"

namespace ocpg {

// Closed-form action-value of a linear policy a = K s on a linear-quadratic
// system: V(s) = -s'Ps with P the policy-evaluation fixed point, and
// Q(s, a) = -s'Qc s - a'Rc a - g (As + Ba)'P(As + Ba).
struct LqrOracle {
  LqrParams system;
  Matrix gain;          // K
  Matrix value_matrix;  // P, symmetric

  double value(const Vector& s) const;
  double q_value(const Vector& s, const Vector& a) const;
  Vector action_gradient(const Vector& s, const Vector& a) const;
  Matrix action_hessian() const;        // constant: -2 (Rc + g B'PB)
  double smoothness_constant() const;   // operator norm of the action Hessian
};

// Iterates P <- Qc + K'RcK + g (A+BK)'P(A+BK) to a fixed point.
LqrOracle solve_policy_q(const LqrParams& system, const Matrix& gain);

struct RiccatiSolution {
  Matrix value_matrix;  // optimal P
  Matrix gain;          // optimal K
};

// Value iteration on the discounted Riccati recurrence.
RiccatiSolution solve_optimal(const LqrParams& system);

// Policy abstraction for the verification harness: the action map, the
// Jacobian-transpose product, and the full (transposed) Jacobian for norm
// measurement.
struct PolicyModel {
  std::function<Vector(const Vector&)> act;
  std::function<Vector(const Vector&, const Vector&)> jacobian_transpose_vector;
  long param_dim = 0;
  int action_dim = 0;
};

PolicyModel linear_policy(const Matrix& gain);
PolicyModel mlp_policy(const Mlp& net);  // net must outlive the model

// Per-sample critic for verification (analytic fields or wrapped networks).
using Critic = std::function<double(const Vector& s, const Vector& a)>;

struct PreEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// Root-mean-square critic error at Gaussian-perturbed policy actions,
// estimated over the given state sample.
PreEstimate compute_pre(const LqrOracle& oracle, const Critic& critic, const PolicyModel& policy,
                        double mu, const std::vector<Vector>& states, long n_samples, Rng& rng);

struct BoundReport {
  double jacobian_bound = 0.0;      // B, max spectral norm over the state sample
  double smoothness = 0.0;          // G, exact for the quadratic oracle
  int action_dim = 0;               // p
  double mu = 0.0;
  double pre = 0.0;                 // perturbation representation error
  double measured_error = 0.0;      // || grad-hat - grad ||
  double bound = 0.0;               // B sqrt(p) / (1-g) * (pre/mu + G mu)
  double mc_standard_error = 0.0;
  bool pass = false;
};

// Estimates the two-point policy-gradient surrogate by Monte Carlo, compares
// it against the exact gradient from the oracle's action-gradient, and checks
// the error bound. Both sides carry the 1/(1 - discount) factor.
BoundReport theorem1_check(const LqrOracle& oracle, const Critic& critic,
                           const PolicyModel& policy, double mu,
                           const std::vector<Vector>& states, long n_samples_per_state, Rng& rng);

struct CompatReport {
  double residual = 0.0;    // RMS of the best linear-gradient-form fit
  double gradient_rms = 0.0;  // RMS of the critic action-gradients themselves
};

// Fits the best least-squares coefficient vector for the linear
// gradient-form condition and reports the residual; diagnostic only.
CompatReport compatibility_conditions_report(
    const std::function<Vector(const Vector& s, const Vector& a)>& critic_action_gradient,
    const PolicyModel& policy, const std::vector<Vector>& states);

// ---------------------------------------------------------------------------
// Interpolation counterexample: a degree-(n-1) polynomial and a barycentric
// Lagrange interpolant both match 1/(25x^2+1) exactly at equispaced nodes,
// while the fitted derivative departs strongly from the true one.

struct InterpolationDemoResult {
  double max_node_error_poly = 0.0;
  double max_node_error_bary = 0.0;
  double max_true_derivative = 0.0;
  double max_derivative_error_poly = 0.0;
  double derivative_discrepancy_factor = 0.0;  // max |p' - f'| / max |f'|
  bool vandermonde_fallback = false;
  std::string data_path;  // CSV written when out_dir is non-empty
};

InterpolationDemoResult interpolation_demo(int n_nodes, const std::string& out_dir);

}  // namespace ocpg
