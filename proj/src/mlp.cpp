#include "ocpg/mlp.hpp"

#include <cmath>

namespace ocpg {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
  }
  throw ContractError("unknown activation tag");
}

Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation name: " + name);
}

namespace {

Matrix apply_activation(Activation act, const Matrix& z) {
  switch (act) {
    case Activation::kIdentity: return z;
    case Activation::kRelu: return z.cwiseMax(0.0);
    case Activation::kTanh: return z.array().tanh().matrix();
  }
  throw ContractError("unknown activation tag");
}

// Derivative expressed through the activation output h = act(z).
Matrix activation_derivative(Activation act, const Matrix& h) {
  switch (act) {
    case Activation::kIdentity: return Matrix::Ones(h.rows(), h.cols());
    case Activation::kRelu:
      return (h.array() > 0.0).cast<double>().matrix();
    case Activation::kTanh: return (1.0 - h.array().square()).matrix();
  }
  throw ContractError("unknown activation tag");
}

}  // namespace

Mlp::Mlp(const std::vector<int>& dims, const std::vector<Activation>& activations) {
  if (dims.size() < 2 || activations.size() != dims.size() - 1) {
    throw ConfigError("mlp: need dims {in,...,out} and one activation per layer");
  }
  for (int d : dims) {
    if (d <= 0) throw ConfigError("mlp: all layer dimensions must be positive");
  }
  layers_.resize(dims.size() - 1);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].weight = Matrix::Zero(dims[i + 1], dims[i]);
    layers_[i].bias = Vector::Zero(dims[i + 1]);
    layers_[i].activation = activations[i];
  }
  output_scale_ = Vector::Ones(dims.back());
}

Mlp Mlp::make(int input_dim, const std::vector<int>& hidden, int output_dim,
              Activation hidden_activation, Activation output_activation) {
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output_dim);
  std::vector<Activation> acts(hidden.size(), hidden_activation);
  acts.push_back(output_activation);
  return Mlp(dims, acts);
}

void Mlp::set_output_scale(const Vector& scale) {
  if (scale.size() != output_dim()) {
    throw ConfigError("mlp: output_scale length must match output dimension");
  }
  output_scale_ = scale;
}

void Mlp::init_uniform(Rng& rng) {
  for (auto& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    for (long r = 0; r < layer.weight.rows(); ++r) {
      for (long c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = rng.uniform(-bound, bound);
      }
    }
    for (long r = 0; r < layer.bias.size(); ++r) {
      layer.bias(r) = rng.uniform(-bound, bound);
    }
  }
}

Vector Mlp::forward(const Vector& input) const {
  return forward_batch(input);
}

Matrix Mlp::forward_batch(const Matrix& inputs) const {
  if (layers_.empty()) throw ContractError("mlp: forward on empty network");
  if (inputs.rows() != input_dim()) {
    throw ConfigError("mlp: input dimension " + std::to_string(inputs.rows()) +
                      " does not match first-layer input " + std::to_string(input_dim()));
  }
  Matrix h = inputs;
  for (const auto& layer : layers_) {
    Matrix z = layer.weight * h;
    z.colwise() += layer.bias;
    h = apply_activation(layer.activation, z);
  }
  h.array().colwise() *= output_scale_.array();
  require_finite(h, "mlp forward output");
  return h;
}

long Mlp::param_count() const {
  long n = 0;
  for (const auto& layer : layers_) {
    n += layer.weight.size() + layer.bias.size();
  }
  return n;
}

Vector Mlp::flat_params() const {
  Vector out(param_count());
  long pos = 0;
  for (const auto& layer : layers_) {
    for (long r = 0; r < layer.weight.rows(); ++r) {
      for (long c = 0; c < layer.weight.cols(); ++c) {
        out(pos++) = layer.weight(r, c);
      }
    }
    out.segment(pos, layer.bias.size()) = layer.bias;
    pos += layer.bias.size();
  }
  return out;
}

void Mlp::set_flat_params(const Vector& params) {
  if (params.size() != param_count()) {
    throw ConfigError("mlp: flat parameter length mismatch");
  }
  long pos = 0;
  for (auto& layer : layers_) {
    for (long r = 0; r < layer.weight.rows(); ++r) {
      for (long c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = params(pos++);
      }
    }
    layer.bias = params.segment(pos, layer.bias.size());
    pos += layer.bias.size();
  }
}

BackwardResult backward_batch(const Mlp& net, const Matrix& inputs, const Matrix& upstream,
                              bool want_params, bool want_input) {
  const auto& layers = net.layers();
  if (layers.empty()) throw ContractError("mlp: backward on empty network");
  if (inputs.rows() != net.input_dim()) {
    throw ConfigError("mlp: backward input dimension mismatch");
  }
  if (upstream.rows() != net.output_dim() || upstream.cols() != inputs.cols()) {
    throw ContractError("mlp: upstream must be output_dim x batch");
  }

  // Forward pass, keeping each layer's activation output.
  const std::size_t n_layers = layers.size();
  std::vector<Matrix> acts(n_layers);
  {
    const Matrix* h = &inputs;
    for (std::size_t i = 0; i < n_layers; ++i) {
      Matrix z = layers[i].weight * (*h);
      z.colwise() += layers[i].bias;
      acts[i] = apply_activation(layers[i].activation, z);
      h = &acts[i];
    }
  }

  BackwardResult result;
  if (want_params) result.param_grad = Vector::Zero(net.param_count());

  // Layout offsets into the flat parameter vector.
  std::vector<long> offsets(n_layers);
  {
    long pos = 0;
    for (std::size_t i = 0; i < n_layers; ++i) {
      offsets[i] = pos;
      pos += layers[i].weight.size() + layers[i].bias.size();
    }
  }

  Matrix delta = upstream;
  delta.array().colwise() *= net.output_scale().array();
  for (std::size_t ii = n_layers; ii-- > 0;) {
    delta = delta.cwiseProduct(activation_derivative(layers[ii].activation, acts[ii]));
    const Matrix& below = (ii == 0) ? inputs : acts[ii - 1];
    if (want_params) {
      const Matrix dw = delta * below.transpose();
      const Vector db = delta.rowwise().sum();
      long pos = offsets[ii];
      for (long r = 0; r < dw.rows(); ++r) {
        for (long c = 0; c < dw.cols(); ++c) {
          result.param_grad(pos++) = dw(r, c);
        }
      }
      result.param_grad.segment(pos, db.size()) = db;
    }
    if (ii > 0 || want_input) {
      delta = layers[ii].weight.transpose() * delta;
    }
  }
  if (want_input) result.input_grad = std::move(delta);
  return result;
}

Vector grad_scalar(const Mlp& net, const Vector& input, double upstream) {
  if (net.output_dim() != 1) {
    throw ContractError("grad_scalar: network output must be scalar");
  }
  Matrix up(1, 1);
  up(0, 0) = upstream;
  return backward_batch(net, input, up, true, false).param_grad;
}

Vector jacobian_transpose_vector(const Mlp& net, const Vector& input, const Vector& v) {
  if (v.size() != net.output_dim()) {
    throw ContractError("jacobian_transpose_vector: v must match output dimension");
  }
  return backward_batch(net, input, v, true, false).param_grad;
}

Vector input_gradient(const Mlp& net, const Vector& input, const Vector& upstream) {
  if (upstream.size() != net.output_dim()) {
    throw ContractError("input_gradient: upstream must match output dimension");
  }
  return backward_batch(net, input, upstream, false, true).input_grad.col(0);
}

}  // namespace ocpg
