#include "ocpg/checkpoint.hpp"

#include <cstring>

namespace ocpg {

namespace {
constexpr char kMagic[8] = {'O', 'C', 'P', 'G', 'C', 'K', 'P', 'T'};
}

CheckpointWriter::CheckpointWriter(const std::string& path, const std::string& metadata)
    : out_(path, std::ios::binary) {
  if (!out_) throw ConfigError("checkpoint: cannot open for writing: " + path);
  out_.write(kMagic, sizeof(kMagic));
  write_u32(kFormatVersion);
  write_string(metadata);
}

void CheckpointWriter::write_u32(std::uint32_t v) {
  out_.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void CheckpointWriter::write_i64(std::int64_t v) {
  out_.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void CheckpointWriter::write_f64(double v) {
  out_.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void CheckpointWriter::write_string(const std::string& s) {
  write_i64(static_cast<std::int64_t>(s.size()));
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void CheckpointWriter::write_vector(const Vector& v) {
  write_i64(v.size());
  out_.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void CheckpointWriter::write_mlp(const Mlp& net) {
  const auto& layers = net.layers();
  write_i64(static_cast<std::int64_t>(layers.size()));
  for (const auto& layer : layers) {
    write_i64(layer.weight.rows());
    write_i64(layer.weight.cols());
    write_string(activation_name(layer.activation));
  }
  write_vector(net.output_scale());
  write_vector(net.flat_params());
}

void CheckpointWriter::write_adam(const Adam& opt) {
  write_f64(opt.learning_rate());
  write_i64(opt.step_count());
  write_vector(opt.first_moment());
  write_vector(opt.second_moment());
}

CheckpointReader::CheckpointReader(const std::string& path) : in_(path, std::ios::binary) {
  if (!in_) throw ConfigError("checkpoint: cannot open for reading: " + path);
  char magic[8];
  in_.read(magic, sizeof(magic));
  if (!in_ || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError("checkpoint: bad magic in " + path);
  }
  const std::uint32_t version = read_u32();
  if (version != CheckpointWriter::kFormatVersion) {
    throw ConfigError("checkpoint: unsupported format version " + std::to_string(version));
  }
  metadata_ = read_string();
}

std::uint32_t CheckpointReader::read_u32() {
  std::uint32_t v = 0;
  in_.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in_) throw ConfigError("checkpoint: truncated stream");
  return v;
}

std::int64_t CheckpointReader::read_i64() {
  std::int64_t v = 0;
  in_.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in_) throw ConfigError("checkpoint: truncated stream");
  return v;
}

double CheckpointReader::read_f64() {
  double v = 0;
  in_.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in_) throw ConfigError("checkpoint: truncated stream");
  return v;
}

std::string CheckpointReader::read_string() {
  const std::int64_t n = read_i64();
  if (n < 0) throw ConfigError("checkpoint: negative string length");
  std::string s(static_cast<std::size_t>(n), '\0');
  in_.read(s.data(), n);
  if (!in_) throw ConfigError("checkpoint: truncated stream");
  return s;
}

Vector CheckpointReader::read_vector() {
  const std::int64_t n = read_i64();
  if (n < 0) throw ConfigError("checkpoint: negative vector length");
  Vector v(n);
  in_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in_) throw ConfigError("checkpoint: truncated stream");
  return v;
}

Mlp CheckpointReader::read_mlp() {
  const std::int64_t n_layers = read_i64();
  if (n_layers <= 0) throw ConfigError("checkpoint: invalid layer count");
  std::vector<int> dims;
  std::vector<Activation> acts;
  for (std::int64_t i = 0; i < n_layers; ++i) {
    const std::int64_t rows = read_i64();
    const std::int64_t cols = read_i64();
    const Activation act = activation_from_name(read_string());
    if (i == 0) dims.push_back(static_cast<int>(cols));
    if (!dims.empty() && dims.back() != static_cast<int>(cols)) {
      throw ConfigError("checkpoint: inconsistent layer dimensions");
    }
    dims.push_back(static_cast<int>(rows));
    acts.push_back(act);
  }
  Mlp net(dims, acts);
  net.set_output_scale(read_vector());
  net.set_flat_params(read_vector());
  return net;
}

Adam CheckpointReader::read_adam() {
  const double lr = read_f64();
  const std::int64_t steps = read_i64();
  Vector m = read_vector();
  Vector v = read_vector();
  Adam opt(m.size(), lr);
  opt.restore(lr, steps, std::move(m), std::move(v));
  return opt;
}

}  // namespace ocpg
