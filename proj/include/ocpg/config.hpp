#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocpg/agent.hpp"

namespace ocpg {

inline constexpr const char* kVersionString = "0.1.0";

enum class WrapperKind { kNone, kNoisy, kSparse, kDelayed };

std::string wrapper_name(WrapperKind kind);
WrapperKind wrapper_from_name(const std::string& name);

// Effective run configuration. Serializes to a flat key-value file with
// section headers; re-running from the serialized form reproduces a run
// bit-for-bit.
struct RunConfig {
  std::string command = "train";
  std::string environment = "lqr-scalar";
  std::string algorithm = "ocpg";  // ocpg | td3-baseline
  long total_steps = 50000;
  std::vector<std::uint64_t> seeds = {0};
  std::string out_dir = "runs/out";
  int jobs = 1;
  WrapperKind wrapper = WrapperKind::kNone;
  double noisy_scale = 0.1;
  double sparse_keep_prob = 0.5;
  int delay_steps = 10;
  int checkpoint_every = 0;  // in evaluations; 0 = final checkpoint only
  AgentConfig agent = default_agent_config(GradientMode::kCpg);

  GradientMode gradient_mode() const;
  void validate() const;

  std::string serialize() const;       // canonical text form
  std::string config_hash() const;     // 16-hex-digit FNV-1a of serialize()
  void save(const std::string& path) const;

  static RunConfig load(const std::string& path);
  // Applies a "key=value" override using the same keys as the file format.
  void set_field(const std::string& key, const std::string& value);
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::string format_seed_list(const std::vector<std::uint64_t>& seeds);

// Header comment stamped into every output file.
std::string run_metadata_line(const RunConfig& config, std::uint64_t seed,
                              const std::string& kind);

}  // namespace ocpg
