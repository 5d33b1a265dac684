#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ocpg/linalg.hpp"
#include "ocpg/mlp.hpp"
#include "ocpg/rng.hpp"

namespace ocpg {

struct SmoothingConfig {
  double mu = 0.1;  // smoothing / exploration scale, in action units
  int action_dim = 1;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(mu > 0.0)) throw ConfigError("smoothing: mu must be positive");
    if (action_dim < 1) throw ConfigError("smoothing: action_dim must be >= 1");
  }
};

using ScalarField = std::function<double(const Vector&)>;

// Per-sample critic; states and actions are columns, returns one value per column.
using BatchCritic = std::function<Vector(const Matrix& states, const Matrix& actions)>;

BatchCritic batch_critic(const Mlp& critic);
BatchCritic batch_critic(std::function<double(const Vector&, const Vector&)> pointwise);

Vector sample_std_normal(int dim, Rng& rng);

// Single-sample two-point estimate ((f(x + mu*u) - f(x)) / mu) * u.
Vector two_point_grad(const ScalarField& f, const Vector& x, double mu, const Vector& u);

// Monte-Carlo mean of the two-point estimate; estimates the smoothed gradient.
// one_sided drops the baseline f(x) term (diagnostics only).
Vector smoothed_grad_mc(const ScalarField& f, const Vector& x, double mu, long n_samples,
                        Rng& rng, bool one_sided = false);

struct BiasCheckRow {
  std::string test_function;
  double mu = 0.0;
  int dim = 0;
  double measured_bias = 0.0;
  double bound = 0.0;  // mu * G * sqrt(p)
  double mc_se = 0.0;
  bool pass = false;
};

using GradientField = std::function<Vector(const Vector&)>;

// Checks the smoothing-bias bound at each test point: the MC estimate of
// ||grad f_mu(x) - grad f(x)|| must stay below mu*G*sqrt(p) plus three MC
// standard errors. Violations are reported, never silently dropped.
std::vector<BiasCheckRow> smoothing_bias_check(const ScalarField& f, const GradientField& grad_f,
                                               double smoothness, double mu,
                                               const std::vector<Vector>& test_points,
                                               long n_samples, Rng& rng,
                                               const std::string& label);

struct CpgEstimate {
  Matrix perturbations;  // action_dim x batch (first probe per state)
  Vector deltas;         // batch (first probe per state)
  Vector gradient;       // actor parameter space, mean over batch
  int batch_size = 0;
};

// Batch policy-gradient estimate: per state s_i draw u_i, form the two-point
// finite difference of the critic at a_i = actor(s_i), and average the
// Jacobian-transpose products. Perturbed actions are evaluated unclipped.
// probes_per_state > 1 averages several perturbations per state (diagnostics).
CpgEstimate cpg_batch_gradient(const Mlp& actor, const BatchCritic& critic, const Matrix& states,
                               double mu, Rng& rng, int probes_per_state = 1);

}  // namespace ocpg
