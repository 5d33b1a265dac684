#pragma once

#include <string>
#include <vector>

#include "ocpg/linalg.hpp"
#include "ocpg/rng.hpp"

namespace ocpg {

enum class Activation { kIdentity, kRelu, kTanh };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::kIdentity;
};

// Dense feed-forward network. The final activation output is additionally
// multiplied elementwise by output_scale (used to map a tanh head onto the
// environment's action range; defaults to all-ones).
class Mlp {
 public:
  Mlp() = default;

  // dims = {in, h1, ..., out}; activations has one entry per layer.
  Mlp(const std::vector<int>& dims, const std::vector<Activation>& activations);

  static Mlp make(int input_dim, const std::vector<int>& hidden, int output_dim,
                  Activation hidden_activation, Activation output_activation);

  int input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }
  int output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  const Vector& output_scale() const { return output_scale_; }
  void set_output_scale(const Vector& scale);

  // Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) for weights and biases, drawn
  // row-major layer by layer so the sequence is reproducible.
  void init_uniform(Rng& rng);

  Vector forward(const Vector& input) const;
  // Columns are samples.
  Matrix forward_batch(const Matrix& inputs) const;

  // Flat parameter vector: per layer, weights row-major then bias.
  long param_count() const;
  Vector flat_params() const;
  void set_flat_params(const Vector& params);

 private:
  std::vector<Layer> layers_;
  Vector output_scale_;
};

struct BackwardResult {
  Vector param_grad;  // same layout as flat_params(); empty if not requested
  Matrix input_grad;  // input_dim x N; empty if not requested
};

// Reverse-mode vector products, summed over batch columns:
//   param_grad = d/dparams sum_i upstream_i . net(x_i)
//   input_grad.col(i) = d/dx_i upstream_i . net(x_i)
BackwardResult backward_batch(const Mlp& net, const Matrix& inputs, const Matrix& upstream,
                              bool want_params = true, bool want_input = false);

// Gradient of (upstream * scalar output) w.r.t. parameters.
Vector grad_scalar(const Mlp& net, const Vector& input, double upstream);

// Product of the (transposed) policy Jacobian with an output-space vector v.
Vector jacobian_transpose_vector(const Mlp& net, const Vector& input, const Vector& v);

// Gradient of (upstream . output) w.r.t. the input vector.
Vector input_gradient(const Mlp& net, const Vector& input, const Vector& upstream);

}  // namespace ocpg
