#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ocpg/checkpoint.hpp"
#include "ocpg/mlp.hpp"
#include "ocpg/optim.hpp"

using namespace ocpg;

namespace {

// Straight-line re-evaluation of the layer composition, independent of
// Mlp::forward's internals.
Vector reference_forward(const Mlp& net, const Vector& input) {
  Vector h = input;
  for (const auto& layer : net.layers()) {
    Vector z = layer.weight * h + layer.bias;
    Vector out(z.size());
    for (long i = 0; i < z.size(); ++i) {
      switch (layer.activation) {
        case Activation::kIdentity: out(i) = z(i); break;
        case Activation::kRelu: out(i) = z(i) > 0 ? z(i) : 0.0; break;
        case Activation::kTanh: out(i) = std::tanh(z(i)); break;
      }
    }
    h = out;
  }
  for (long i = 0; i < h.size(); ++i) h(i) *= net.output_scale()(i);
  return h;
}

// Central finite difference of v . net(x) with respect to parameter j.
double fd_param(Mlp& net, const Vector& x, const Vector& v, long j, double h = 1e-5) {
  Vector params = net.flat_params();
  const double saved = params(j);
  params(j) = saved + h;
  net.set_flat_params(params);
  const double up = v.dot(net.forward(x));
  params(j) = saved - h;
  net.set_flat_params(params);
  const double down = v.dot(net.forward(x));
  params(j) = saved;
  net.set_flat_params(params);
  return (up - down) / (2.0 * h);
}

Mlp random_net(Rng& rng, int in, const std::vector<int>& hidden, int out,
               Activation hidden_act = Activation::kTanh,
               Activation out_act = Activation::kIdentity) {
  Mlp net = Mlp::make(in, hidden, out, hidden_act, out_act);
  net.init_uniform(rng);
  return net;
}

}  // namespace

TEST_CASE("forward: identity layer passes input through") {
  Mlp net({2, 2}, {Activation::kIdentity});
  net.layers()[0].weight = Matrix::Identity(2, 2);
  Vector x(2);
  x << 1.0, 2.0;
  const Vector y = net.forward(x);
  CHECK(y(0) == doctest::Approx(1.0));
  CHECK(y(1) == doctest::Approx(2.0));
}

TEST_CASE("forward: relu clamps negatives") {
  Mlp net({2, 2}, {Activation::kRelu});
  net.layers()[0].weight = Matrix::Identity(2, 2);
  Vector x(2);
  x << -1.0, 3.0;
  const Vector y = net.forward(x);
  CHECK(y(0) == 0.0);
  CHECK(y(1) == doctest::Approx(3.0));
}

TEST_CASE("forward: matches layer-by-layer re-evaluation on random nets") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Mlp net = random_net(rng, 3, {5, 4}, 2,
                         trial % 2 == 0 ? Activation::kRelu : Activation::kTanh,
                         Activation::kTanh);
    Vector scale(2);
    scale << 1.5, 0.5;
    net.set_output_scale(scale);
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = rng.normal();
    CHECK((net.forward(x) - reference_forward(net, x)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("forward: dimension mismatch raises configuration error") {
  Mlp net({2, 3}, {Activation::kIdentity});
  Vector x(3);
  x.setZero();
  CHECK_THROWS_AS(net.forward(x), ConfigError);
}

TEST_CASE("grad_scalar: linear model gradient equals the input") {
  // output = w . x, single identity layer
  Mlp net({3, 1}, {Activation::kIdentity});
  net.layers()[0].weight << 0.3, -0.7, 1.1;
  Vector x(3);
  x << 0.5, 2.0, -1.0;
  const Vector g = grad_scalar(net, x, 1.0);
  // layout: weights row-major, then bias
  CHECK(g(0) == doctest::Approx(0.5));
  CHECK(g(1) == doctest::Approx(2.0));
  CHECK(g(2) == doctest::Approx(-1.0));
  CHECK(g(3) == doctest::Approx(1.0));  // bias
}

TEST_CASE("grad_scalar: zero upstream gives a zero vector") {
  Rng rng(3);
  Mlp net = random_net(rng, 4, {6}, 1);
  Vector x(4);
  for (int i = 0; i < 4; ++i) x(i) = rng.normal();
  CHECK(grad_scalar(net, x, 0.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grad_scalar: rejects non-scalar outputs") {
  Mlp net({2, 2}, {Activation::kIdentity});
  Vector x = Vector::Zero(2);
  CHECK_THROWS_AS(grad_scalar(net, x, 1.0), ContractError);
}

TEST_CASE("grad_scalar: matches central finite differences on random nets") {
  Rng rng(11);
  Mlp net = random_net(rng, 3, {8, 8}, 1, Activation::kTanh, Activation::kIdentity);
  Vector x(3);
  for (int i = 0; i < 3; ++i) x(i) = rng.normal();
  const Vector v = Vector::Ones(1);
  const Vector analytic = grad_scalar(net, x, 1.0);
  for (long j = 0; j < net.param_count(); ++j) {
    const double fd = fd_param(net, x, v, j);
    const double denom = std::max({std::abs(fd), std::abs(analytic(j)), 1e-10});
    CHECK(std::abs(fd - analytic(j)) / denom < 1e-4);
  }
}

TEST_CASE("jacobian_transpose_vector: zero vector annihilates") {
  Rng rng(5);
  Mlp net = random_net(rng, 3, {4}, 2);
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  CHECK(jacobian_transpose_vector(net, x, Vector::Zero(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jacobian_transpose_vector: linear layer gives outer product v x'") {
  Mlp net({3, 2}, {Activation::kIdentity});
  net.layers()[0].weight << 1, 2, 3, 4, 5, 6;
  Vector x(3), v(2);
  x << 0.5, -1.0, 2.0;
  v << 2.0, -3.0;
  const Vector g = jacobian_transpose_vector(net, x, v);
  // weight entries row-major: dW(i,j) = v_i x_j
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(g(i * 3 + j) == doctest::Approx(v(i) * x(j)));
    }
  }
  CHECK(g(6) == doctest::Approx(v(0)));  // biases
  CHECK(g(7) == doctest::Approx(v(1)));
}

TEST_CASE("jacobian_transpose_vector: equals sum of per-output gradients") {
  Rng rng(13);
  Mlp net = random_net(rng, 4, {7, 5}, 3, Activation::kTanh, Activation::kTanh);
  Vector x(4), v(3);
  for (int i = 0; i < 4; ++i) x(i) = rng.normal();
  for (int i = 0; i < 3; ++i) v(i) = rng.normal();

  Vector combined = Vector::Zero(net.param_count());
  for (int i = 0; i < 3; ++i) {
    Vector basis = Vector::Zero(3);
    basis(i) = 1.0;
    combined += v(i) * jacobian_transpose_vector(net, x, basis);
  }
  const Vector direct = jacobian_transpose_vector(net, x, v);
  CHECK((combined - direct).cwiseAbs().maxCoeff() < 1e-10);

  // and against finite differences
  for (int k = 0; k < 40; ++k) {
    const long j = static_cast<long>(rng.below(net.param_count()));
    const double fd = fd_param(net, x, v, j);
    const double denom = std::max({std::abs(fd), std::abs(direct(j)), 1e-10});
    CHECK(std::abs(fd - direct(j)) / denom < 1e-4);
  }
}

TEST_CASE("gradient correctness: 50 random nets against finite differences") {
  Rng rng(17);
  double max_rel = 0.0;
  for (int c = 0; c < 50; ++c) {
    const int in = 2 + static_cast<int>(rng.below(3));
    const int out = 1 + static_cast<int>(rng.below(2));
    Mlp net = random_net(rng, in, {6, 6}, out,
                         c % 2 == 0 ? Activation::kTanh : Activation::kRelu,
                         Activation::kIdentity);
    Vector x(in), v(out);
    for (int i = 0; i < in; ++i) x(i) = rng.normal();
    for (int i = 0; i < out; ++i) v(i) = rng.uniform(0.5, 1.5);
    const Vector analytic = jacobian_transpose_vector(net, x, v);
    for (long j = 0; j < net.param_count(); ++j) {
      const double fd = fd_param(net, x, v, j);
      const double denom = std::max(std::abs(fd), std::abs(analytic(j)));
      if (denom < 1e-10) continue;
      max_rel = std::max(max_rel, std::abs(fd - analytic(j)) / denom);
    }
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("backward_batch: batched parameter gradient sums the per-sample ones") {
  Rng rng(19);
  Mlp net = random_net(rng, 3, {5}, 2, Activation::kRelu, Activation::kTanh);
  const int n = 6;
  Matrix xs(3, n), vs(2, n);
  for (int i = 0; i < 3 * n; ++i) xs.data()[i] = rng.normal();
  for (int i = 0; i < 2 * n; ++i) vs.data()[i] = rng.normal();

  Vector total = Vector::Zero(net.param_count());
  for (int i = 0; i < n; ++i) {
    total += jacobian_transpose_vector(net, xs.col(i), vs.col(i));
  }
  const Vector batched = backward_batch(net, xs, vs, true, false).param_grad;
  CHECK((total - batched).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("input_gradient: matches finite differences in the input") {
  Rng rng(23);
  Mlp net = random_net(rng, 4, {6}, 1);
  Vector x(4);
  for (int i = 0; i < 4; ++i) x(i) = rng.normal();
  const Vector g = input_gradient(net, x, Vector::Ones(1));
  for (int j = 0; j < 4; ++j) {
    Vector xp = x, xm = x;
    xp(j) += 1e-6;
    xm(j) -= 1e-6;
    const double fd = (net.forward(xp)(0) - net.forward(xm)(0)) / 2e-6;
    CHECK(g(j) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("flat parameters: write-then-read round-trips bit for bit") {
  Rng rng(29);
  Mlp net = random_net(rng, 5, {9, 3}, 2);
  const Vector params = net.flat_params();
  Mlp other = net;
  Vector mutated = params;
  mutated.setZero();
  other.set_flat_params(mutated);
  other.set_flat_params(params);
  const Vector back = other.flat_params();
  REQUIRE(back.size() == params.size());
  for (long i = 0; i < params.size(); ++i) {
    CHECK(back(i) == params(i));  // exact
  }
}

TEST_CASE("adam: zero gradient leaves parameters unchanged and decays moments") {
  Adam opt(3, 1e-3);
  Vector params(3);
  params << 1.0, -2.0, 3.0;
  Vector grad = Vector::Ones(3);
  opt.step(params, grad);  // build nonzero moments
  const Vector params_after_one = params;
  const Vector m_before = opt.first_moment();
  opt.step(params, Vector::Zero(3));
  CHECK((opt.first_moment() - 0.9 * m_before).cwiseAbs().maxCoeff() < 1e-15);
  // params move only by the decayed-moment drift, which is tiny but nonzero;
  // with a zero FIRST gradient they would not move at all:
  Adam fresh(3, 1e-3);
  Vector fresh_params = params_after_one;
  fresh.step(fresh_params, Vector::Zero(3));
  CHECK((fresh_params - params_after_one).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adam: first and second steps match the hand-evaluated recurrence") {
  const double lr = 1e-2;
  Adam opt(2, lr);
  Vector params(2);
  params << 0.5, -0.25;
  Vector grad(2);
  grad << 0.2, -0.4;
  const Vector initial = params;

  // independent evaluation of the recurrence
  Vector m = Vector::Zero(2), v = Vector::Zero(2), expected = initial;
  for (int t = 1; t <= 2; ++t) {
    m = 0.9 * m + 0.1 * grad;
    v = 0.999 * v.array() + 0.001 * grad.array().square();
    const Vector m_hat = m / (1.0 - std::pow(0.9, t));
    const Vector v_hat = v / (1.0 - std::pow(0.999, t));
    expected.array() -= lr * m_hat.array() / (v_hat.array().sqrt() + Adam::kEps);
  }

  opt.step(params, grad);
  opt.step(params, grad);
  CHECK((params - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(opt.step_count() == 2);
}

TEST_CASE("adam: non-finite gradients raise a divergence error") {
  Adam opt(2, 1e-3);
  Vector params = Vector::Zero(2);
  Vector grad(2);
  grad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(opt.step(params, grad), DivergenceError);
}

TEST_CASE("checkpoint: network and optimizer round-trip bit for bit") {
  Rng rng(31);
  Mlp net = random_net(rng, 3, {4, 4}, 2, Activation::kRelu, Activation::kTanh);
  Vector scale(2);
  scale << 2.0, 0.5;
  net.set_output_scale(scale);
  Adam opt(net.param_count(), 3e-4);
  Vector params = net.flat_params();
  Vector grad(net.param_count());
  for (long i = 0; i < grad.size(); ++i) grad(i) = rng.normal();
  opt.step(params, grad);
  net.set_flat_params(params);

  const std::string path = std::filesystem::temp_directory_path() / "ocpg_ckpt_test.bin";
  {
    CheckpointWriter w(path, "meta test");
    w.write_mlp(net);
    w.write_adam(opt);
  }
  CheckpointReader r(path);
  CHECK(r.metadata() == "meta test");
  const Mlp loaded = r.read_mlp();
  const Adam loaded_opt = r.read_adam();
  std::filesystem::remove(path);

  const Vector a = net.flat_params(), b = loaded.flat_params();
  REQUIRE(a.size() == b.size());
  for (long i = 0; i < a.size(); ++i) CHECK(a(i) == b(i));
  CHECK(loaded.output_scale()(0) == 2.0);
  CHECK(loaded_opt.step_count() == opt.step_count());
  for (long i = 0; i < grad.size(); ++i) {
    CHECK(loaded_opt.first_moment()(i) == opt.first_moment()(i));
    CHECK(loaded_opt.second_moment()(i) == opt.second_moment()(i));
  }
}
