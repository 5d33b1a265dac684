#include "ocpg/zeroth_order.hpp"

#include <cmath>

namespace ocpg {

BatchCritic batch_critic(const Mlp& critic) {
  if (critic.output_dim() != 1) throw ContractError("batch_critic: critic must be scalar-valued");
  return [&critic](const Matrix& states, const Matrix& actions) -> Vector {
    Matrix joint(states.rows() + actions.rows(), states.cols());
    joint.topRows(states.rows()) = states;
    joint.bottomRows(actions.rows()) = actions;
    return critic.forward_batch(joint).transpose();
  };
}

BatchCritic batch_critic(std::function<double(const Vector&, const Vector&)> pointwise) {
  return [fn = std::move(pointwise)](const Matrix& states, const Matrix& actions) -> Vector {
    Vector out(states.cols());
    for (long i = 0; i < states.cols(); ++i) {
      out(i) = fn(states.col(i), actions.col(i));
    }
    return out;
  };
}

Vector sample_std_normal(int dim, Rng& rng) {
  if (dim < 1) throw ContractError("sample_std_normal: dim must be >= 1");
  Vector u(dim);
  for (int i = 0; i < dim; ++i) u(i) = rng.normal();
  return u;
}

Vector two_point_grad(const ScalarField& f, const Vector& x, double mu, const Vector& u) {
  if (!(mu > 0.0)) throw ContractError("two_point_grad: mu must be positive");
  const double fx = f(x);
  const double fp = f(x + mu * u);
  if (!std::isfinite(fx) || !std::isfinite(fp)) {
    throw DivergenceError("two_point_grad: non-finite function value");
  }
  return ((fp - fx) / mu) * u;
}

Vector smoothed_grad_mc(const ScalarField& f, const Vector& x, double mu, long n_samples,
                        Rng& rng, bool one_sided) {
  if (n_samples < 1) throw ContractError("smoothed_grad_mc: n_samples must be >= 1");
  const int dim = static_cast<int>(x.size());
  Vector acc = Vector::Zero(dim);
  const double fx = f(x);
  if (!std::isfinite(fx)) throw DivergenceError("smoothed_grad_mc: non-finite f(x)");
  for (long i = 0; i < n_samples; ++i) {
    const Vector u = sample_std_normal(dim, rng);
    const double fp = f(x + mu * u);
    if (!std::isfinite(fp)) throw DivergenceError("smoothed_grad_mc: non-finite f(x + mu*u)");
    const double diff = one_sided ? fp : (fp - fx);
    acc += (diff / mu) * u;
  }
  return acc / static_cast<double>(n_samples);
}

std::vector<BiasCheckRow> smoothing_bias_check(const ScalarField& f, const GradientField& grad_f,
                                               double smoothness, double mu,
                                               const std::vector<Vector>& test_points,
                                               long n_samples, Rng& rng,
                                               const std::string& label) {
  if (!(mu > 0.0)) throw ContractError("smoothing_bias_check: mu must be positive");
  std::vector<BiasCheckRow> rows;
  rows.reserve(test_points.size());
  for (const Vector& x : test_points) {
    const int dim = static_cast<int>(x.size());
    const Vector exact = grad_f(x);
    // Mean and per-coordinate variance of the two-point samples.
    Vector mean = Vector::Zero(dim);
    Vector m2 = Vector::Zero(dim);
    const double fx = f(x);
    for (long i = 0; i < n_samples; ++i) {
      const Vector u = sample_std_normal(dim, rng);
      const Vector sample = ((f(x + mu * u) - fx) / mu) * u;
      const Vector delta = sample - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta.cwiseProduct(sample - mean);
    }
    const Vector var = m2 / static_cast<double>(n_samples - 1);
    const double se = std::sqrt(var.sum() / static_cast<double>(n_samples));

    BiasCheckRow row;
    row.test_function = label;
    row.mu = mu;
    row.dim = dim;
    row.measured_bias = (mean - exact).norm();
    row.bound = mu * smoothness * std::sqrt(static_cast<double>(dim));
    row.mc_se = se;
    row.pass = row.measured_bias <= row.bound + 3.0 * se;
    rows.push_back(std::move(row));
  }
  return rows;
}

CpgEstimate cpg_batch_gradient(const Mlp& actor, const BatchCritic& critic, const Matrix& states,
                               double mu, Rng& rng, int probes_per_state) {
  if (states.cols() == 0) throw ContractError("cpg_batch_gradient: empty state batch");
  if (!(mu > 0.0)) throw ContractError("cpg_batch_gradient: mu must be positive");
  if (probes_per_state < 1) throw ContractError("cpg_batch_gradient: probes_per_state must be >= 1");

  const long n = states.cols();
  const int p = actor.output_dim();
  const Matrix actions = actor.forward_batch(states);
  const Vector q_base = critic(states, actions);
  if (!q_base.allFinite()) {
    long bad = 0;
    for (long i = 0; i < n; ++i) {
      if (!std::isfinite(q_base(i))) { bad = i; break; }
    }
    throw DivergenceError("cpg_batch_gradient: non-finite critic value at batch sample " +
                          std::to_string(bad));
  }

  CpgEstimate est;
  est.batch_size = static_cast<int>(n);
  est.perturbations.resize(p, n);
  est.deltas.resize(n);
  // v_i accumulates mean_k delta_ik * u_ik over the probes for state i.
  Matrix v = Matrix::Zero(p, n);
  for (int probe = 0; probe < probes_per_state; ++probe) {
    Matrix u(p, n);
    for (long i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) u(j, i) = rng.normal();
    }
    const Vector q_pert = critic(states, actions + mu * u);
    if (!q_pert.allFinite()) {
      long bad = 0;
      for (long i = 0; i < n; ++i) {
        if (!std::isfinite(q_pert(i))) { bad = i; break; }
      }
      throw DivergenceError("cpg_batch_gradient: non-finite perturbed critic value at batch sample " +
                            std::to_string(bad));
    }
    const Vector delta = (q_pert - q_base) / mu;
    v += u * delta.asDiagonal();
    if (probe == 0) {
      est.perturbations = u;
      est.deltas = delta;
    }
  }
  v /= static_cast<double>(probes_per_state);

  est.gradient = backward_batch(actor, states, v, true, false).param_grad / static_cast<double>(n);
  require_finite(est.gradient, "cpg gradient");
  return est;
}

}  // namespace ocpg
