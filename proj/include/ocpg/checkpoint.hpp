#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "ocpg/mlp.hpp"
#include "ocpg/optim.hpp"

namespace ocpg {

// Binary checkpoint streams. Layout: magic "OCPGCKPT", u32 format version,
// length-prefixed metadata string, then caller-defined sections. Raw IEEE-754
// doubles give bit-exact round trips.
class CheckpointWriter {
 public:
  CheckpointWriter(const std::string& path, const std::string& metadata);

  void write_u32(std::uint32_t v);
  void write_i64(std::int64_t v);
  void write_f64(double v);
  void write_string(const std::string& s);
  void write_vector(const Vector& v);
  void write_mlp(const Mlp& net);
  void write_adam(const Adam& opt);

  bool good() const { return out_.good(); }

  static constexpr std::uint32_t kFormatVersion = 1;

 private:
  std::ofstream out_;
};

class CheckpointReader {
 public:
  explicit CheckpointReader(const std::string& path);

  std::uint32_t read_u32();
  std::int64_t read_i64();
  double read_f64();
  std::string read_string();
  Vector read_vector();
  Mlp read_mlp();
  Adam read_adam();

  const std::string& metadata() const { return metadata_; }

 private:
  std::ifstream in_;
  std::string metadata_;
};

}  // namespace ocpg
