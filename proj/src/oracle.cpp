#include "ocpg/oracle.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ocpg/errors.hpp"

namespace ocpg {

double LqrOracle::value(const Vector& s) const { return -s.dot(value_matrix * s); }

double LqrOracle::q_value(const Vector& s, const Vector& a) const {
  const Vector next = system.dynamics * s + system.input_matrix * a;
  return -s.dot(system.state_cost * s) - a.dot(system.action_cost * a) -
         system.discount * next.dot(value_matrix * next);
}

Vector LqrOracle::action_gradient(const Vector& s, const Vector& a) const {
  const Vector next = system.dynamics * s + system.input_matrix * a;
  return -2.0 * system.action_cost * a -
         2.0 * system.discount * system.input_matrix.transpose() * (value_matrix * next);
}

Matrix LqrOracle::action_hessian() const {
  return -2.0 * (system.action_cost + system.discount * system.input_matrix.transpose() *
                                           value_matrix * system.input_matrix);
}

double LqrOracle::smoothness_constant() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(action_hessian());
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

LqrOracle solve_policy_q(const LqrParams& system, const Matrix& gain) {
  system.validate();
  if (gain.rows() != system.action_dim() || gain.cols() != system.state_dim()) {
    throw ConfigError("solve_policy_q: gain must be p x q");
  }
  const Matrix closed_loop = system.dynamics + system.input_matrix * gain;
  const Matrix cost = system.state_cost + gain.transpose() * system.action_cost * gain;

  Matrix value = Matrix::Zero(system.state_dim(), system.state_dim());
  constexpr long kMaxIter = 100000;
  constexpr double kTol = 1e-13;
  double residual = 0.0;
  for (long i = 0; i < kMaxIter; ++i) {
    const Matrix next =
        cost + system.discount * closed_loop.transpose() * value * closed_loop;
    residual = (next - value).cwiseAbs().maxCoeff();
    value = next;
    if (residual < kTol) break;
  }
  if (!(residual < 1e-10)) {
    throw ConfigError("solve_policy_q: policy evaluation did not converge (unstable policy?)");
  }
  // Symmetrize away round-off drift.
  value = 0.5 * (value + value.transpose());
  return LqrOracle{system, gain, value};
}

RiccatiSolution solve_optimal(const LqrParams& system) {
  system.validate();
  const Matrix& a = system.dynamics;
  const Matrix& b = system.input_matrix;
  const double g = system.discount;

  Matrix value = system.state_cost;
  constexpr long kMaxIter = 100000;
  constexpr double kTol = 1e-14;
  for (long i = 0; i < kMaxIter; ++i) {
    const Matrix mid = system.action_cost + g * b.transpose() * value * b;
    const Matrix next = system.state_cost + g * a.transpose() * value * a -
                        g * g * a.transpose() * value * b *
                            mid.ldlt().solve(b.transpose() * value * a);
    const double residual = (next - value).cwiseAbs().maxCoeff();
    value = next;
    if (residual < kTol) break;
  }
  value = 0.5 * (value + value.transpose());
  const Matrix mid = system.action_cost + g * b.transpose() * value * b;
  const Matrix gain = -g * mid.ldlt().solve(b.transpose() * value * a);
  return {value, gain};
}

PolicyModel linear_policy(const Matrix& gain) {
  PolicyModel model;
  const int p = static_cast<int>(gain.rows());
  const int q = static_cast<int>(gain.cols());
  model.param_dim = static_cast<long>(p) * q;
  model.action_dim = p;
  model.act = [gain](const Vector& s) -> Vector { return gain * s; };
  // Parameters in row-major order; the product with an action-space vector v
  // is the outer structure v s' flattened the same way.
  model.jacobian_transpose_vector = [p, q](const Vector& s, const Vector& v) -> Vector {
    Vector out(static_cast<long>(p) * q);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < q; ++j) {
        out(static_cast<long>(i) * q + j) = v(i) * s(j);
      }
    }
    return out;
  };
  return model;
}

PolicyModel mlp_policy(const Mlp& net) {
  PolicyModel model;
  model.param_dim = net.param_count();
  model.action_dim = net.output_dim();
  model.act = [&net](const Vector& s) -> Vector { return net.forward(s); };
  model.jacobian_transpose_vector = [&net](const Vector& s, const Vector& v) -> Vector {
    return jacobian_transpose_vector(net, s, v);
  };
  return model;
}

namespace {

// Max spectral norm of the (transposed) policy Jacobian over the states.
double measure_jacobian_bound(const PolicyModel& policy, const std::vector<Vector>& states) {
  double bound = 0.0;
  for (const Vector& s : states) {
    Matrix jac_t(policy.param_dim, policy.action_dim);
    for (int i = 0; i < policy.action_dim; ++i) {
      Vector basis = Vector::Zero(policy.action_dim);
      basis(i) = 1.0;
      jac_t.col(i) = policy.jacobian_transpose_vector(s, basis);
    }
    Eigen::JacobiSVD<Matrix> svd(jac_t);
    bound = std::max(bound, svd.singularValues()(0));
  }
  return bound;
}

}  // namespace

PreEstimate compute_pre(const LqrOracle& oracle, const Critic& critic, const PolicyModel& policy,
                        double mu, const std::vector<Vector>& states, long n_samples, Rng& rng) {
  if (states.empty()) throw ContractError("compute_pre: empty state sample");
  if (n_samples < 2) throw ContractError("compute_pre: need n_samples >= 2");
  // Mean and variance of the squared error over all (state, perturbation)
  // pairs; the PRE is the square root of the mean.
  double mean = 0.0;
  double m2 = 0.0;
  long count = 0;
  for (const Vector& s : states) {
    const Vector a = policy.act(s);
    for (long k = 0; k < n_samples; ++k) {
      Vector u(policy.action_dim);
      for (int i = 0; i < policy.action_dim; ++i) u(i) = rng.normal();
      const Vector perturbed = a + mu * u;
      const double err = critic(s, perturbed) - oracle.q_value(s, perturbed);
      const double sq = err * err;
      ++count;
      const double delta = sq - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (sq - mean);
    }
  }
  const double var_of_mean = m2 / static_cast<double>(count - 1) / static_cast<double>(count);
  PreEstimate est;
  est.value = std::sqrt(mean);
  // Delta method: se(sqrt(m)) = se(m) / (2 sqrt(m)).
  est.standard_error = est.value > 0.0 ? std::sqrt(var_of_mean) / (2.0 * est.value) : 0.0;
  return est;
}

BoundReport theorem1_check(const LqrOracle& oracle, const Critic& critic,
                           const PolicyModel& policy, double mu,
                           const std::vector<Vector>& states, long n_samples_per_state,
                           Rng& rng) {
  if (states.empty()) throw ContractError("theorem1_check: empty state sample");
  if (!(mu > 0.0)) throw ContractError("theorem1_check: mu must be positive");
  const double inv_one_minus_gamma = 1.0 / (1.0 - oracle.system.discount);
  const long dim = policy.param_dim;
  const double n_states = static_cast<double>(states.size());

  // Exact gradient over the fixed state sample.
  Vector exact = Vector::Zero(dim);
  for (const Vector& s : states) {
    const Vector a = policy.act(s);
    exact += policy.jacobian_transpose_vector(s, oracle.action_gradient(s, a));
  }
  exact *= inv_one_minus_gamma / n_states;

  // Monte-Carlo surrogate; only the perturbations are stochastic, so the
  // variance of the estimate comes from the per-state means.
  Vector estimate = Vector::Zero(dim);
  Vector variance_of_mean = Vector::Zero(dim);
  for (const Vector& s : states) {
    const Vector a = policy.act(s);
    const double q_base = critic(s, a);
    Vector state_mean = Vector::Zero(dim);
    Vector state_m2 = Vector::Zero(dim);
    for (long k = 0; k < n_samples_per_state; ++k) {
      Vector u(policy.action_dim);
      for (int i = 0; i < policy.action_dim; ++i) u(i) = rng.normal();
      const double delta = (critic(s, a + mu * u) - q_base) / mu;
      const Vector sample = policy.jacobian_transpose_vector(s, delta * u);
      const Vector dev = sample - state_mean;
      state_mean += dev / static_cast<double>(k + 1);
      state_m2 += dev.cwiseProduct(sample - state_mean);
    }
    estimate += state_mean;
    variance_of_mean += state_m2 / static_cast<double>(n_samples_per_state - 1) /
                        static_cast<double>(n_samples_per_state);
  }
  estimate *= inv_one_minus_gamma / n_states;
  variance_of_mean *= inv_one_minus_gamma * inv_one_minus_gamma / (n_states * n_states);

  BoundReport report;
  report.mu = mu;
  report.action_dim = policy.action_dim;
  report.jacobian_bound = measure_jacobian_bound(policy, states);
  report.smoothness = oracle.smoothness_constant();
  report.pre = compute_pre(oracle, critic, policy, mu, states, n_samples_per_state, rng).value;
  report.measured_error = (estimate - exact).norm();
  report.bound = report.jacobian_bound * std::sqrt(static_cast<double>(policy.action_dim)) *
                 inv_one_minus_gamma * (report.pre / mu + report.smoothness * mu);
  report.mc_standard_error = std::sqrt(variance_of_mean.sum());
  report.pass = report.measured_error <= report.bound + 3.0 * report.mc_standard_error;
  return report;
}

CompatReport compatibility_conditions_report(
    const std::function<Vector(const Vector& s, const Vector& a)>& critic_action_gradient,
    const PolicyModel& policy, const std::vector<Vector>& states) {
  if (states.empty()) throw ContractError("compatibility report: empty state sample");
  const long rows = static_cast<long>(states.size()) * policy.action_dim;
  Matrix design(rows, policy.param_dim);
  Vector target(rows);
  long row = 0;
  for (const Vector& s : states) {
    const Vector a = policy.act(s);
    const Vector grad = critic_action_gradient(s, a);
    // Rows of the transposed Jacobian, one per action coordinate.
    for (int i = 0; i < policy.action_dim; ++i) {
      Vector basis = Vector::Zero(policy.action_dim);
      basis(i) = 1.0;
      design.row(row) = policy.jacobian_transpose_vector(s, basis).transpose();
      target(row) = grad(i);
      ++row;
    }
  }
  const Vector omega = design.colPivHouseholderQr().solve(target);
  const double rss = (design * omega - target).squaredNorm();
  CompatReport report;
  report.residual = std::sqrt(rss / static_cast<double>(states.size()));
  report.gradient_rms = std::sqrt(target.squaredNorm() / static_cast<double>(states.size()));
  return report;
}

// ---------------------------------------------------------------------------

namespace {

double runge(double x) { return 1.0 / (25.0 * x * x + 1.0); }
double runge_derivative(double x) {
  const double d = 25.0 * x * x + 1.0;
  return -50.0 * x / (d * d);
}

struct Barycentric {
  std::vector<double> nodes, values, weights;

  double eval(double x) const {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double dx = x - nodes[i];
      if (std::abs(dx) < 1e-14) return values[i];
      const double w = weights[i] / dx;
      num += w * values[i];
      den += w;
    }
    return num / den;
  }

  double derivative(double x) const {
    // At a node, use the differentiation-matrix row; elsewhere differentiate
    // the rational barycentric form directly.
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (std::abs(x - nodes[j]) < 1e-14) {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
          if (i == j) continue;
          sum += (weights[i] / weights[j]) * (values[i] - values[j]) / (nodes[j] - nodes[i]);
        }
        return sum;
      }
    }
    double num = 0.0, den = 0.0, dnum = 0.0, dden = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double dx = x - nodes[i];
      const double w = weights[i] / dx;
      num += w * values[i];
      den += w;
      dnum -= w / dx * values[i];
      dden -= w / dx;
    }
    return (dnum * den - num * dden) / (den * den);
  }
};

}  // namespace

InterpolationDemoResult interpolation_demo(int n_nodes, const std::string& out_dir) {
  if (n_nodes < 3) throw ContractError("interpolation_demo: need at least 3 nodes");
  const int n = n_nodes;
  std::vector<double> nodes(n), values(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    values[i] = runge(nodes[i]);
  }

  // (i) monomial-basis polynomial through the nodes, via a Vandermonde solve
  Matrix vandermonde(n, n);
  for (int i = 0; i < n; ++i) {
    double pw = 1.0;
    for (int j = 0; j < n; ++j) {
      vandermonde(i, j) = pw;
      pw *= nodes[i];
    }
  }
  Vector rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = values[i];
  Vector coef = vandermonde.partialPivLu().solve(rhs);
  bool fallback = false;
  if ((vandermonde * coef - rhs).cwiseAbs().maxCoeff() > 1e-8) {
    fallback = true;  // ill-conditioned solve; report and use the stable path
  }

  auto poly_eval = [&](double x) {
    double acc = 0.0;
    for (int j = n - 1; j >= 0; --j) acc = acc * x + coef(j);
    return acc;
  };
  auto poly_derivative = [&](double x) {
    double acc = 0.0;
    for (int j = n - 1; j >= 1; --j) acc = acc * x + coef(j) * j;
    return acc;
  };

  // (ii) barycentric Lagrange interpolant with exact equispaced weights
  Barycentric bary;
  bary.nodes = nodes;
  bary.values = values;
  bary.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double w = (i % 2 == 0) ? 1.0 : -1.0;  // (-1)^i binomial(n-1, i)
    for (int k = 1; k <= i; ++k) w *= static_cast<double>(n - k) / static_cast<double>(k);
    bary.weights[i] = w;
  }

  InterpolationDemoResult result;
  result.vandermonde_fallback = fallback;
  for (int i = 0; i < n; ++i) {
    result.max_node_error_poly =
        std::max(result.max_node_error_poly, std::abs(poly_eval(nodes[i]) - values[i]));
    result.max_node_error_bary =
        std::max(result.max_node_error_bary, std::abs(bary.eval(nodes[i]) - values[i]));
  }

  const int grid = 2001;
  std::ofstream csv;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    result.data_path = out_dir + "/interpolation_demo.csv";
    csv.open(result.data_path);
    csv << "# ocpg-interpolation v1\n";
    csv << "x,true_value,true_derivative,poly_value,poly_derivative,bary_value,bary_derivative\n";
  }
  const auto& fit_eval = fallback ? std::function<double(double)>([&](double x) { return bary.eval(x); })
                                  : std::function<double(double)>(poly_eval);
  const auto& fit_deriv = fallback
                              ? std::function<double(double)>([&](double x) { return bary.derivative(x); })
                              : std::function<double(double)>(poly_derivative);
  for (int i = 0; i < grid; ++i) {
    const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double fd = runge_derivative(x);
    const double pd = fit_deriv(x);
    result.max_true_derivative = std::max(result.max_true_derivative, std::abs(fd));
    result.max_derivative_error_poly =
        std::max(result.max_derivative_error_poly, std::abs(pd - fd));
    if (csv.is_open()) {
      csv << x << ',' << runge(x) << ',' << fd << ',' << fit_eval(x) << ',' << pd << ','
          << bary.eval(x) << ',' << bary.derivative(x) << '\n';
    }
  }
  result.derivative_discrepancy_factor =
      result.max_derivative_error_poly / result.max_true_derivative;
  return result;
}

}  // namespace ocpg
