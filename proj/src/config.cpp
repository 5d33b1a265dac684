#include "ocpg/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ocpg/csv.hpp"

namespace ocpg {

std::string wrapper_name(WrapperKind kind) {
  switch (kind) {
    case WrapperKind::kNone: return "none";
    case WrapperKind::kNoisy: return "noisy";
    case WrapperKind::kSparse: return "sparse";
    case WrapperKind::kDelayed: return "delayed";
  }
  throw ContractError("unknown wrapper kind");
}

WrapperKind wrapper_from_name(const std::string& name) {
  if (name == "none") return WrapperKind::kNone;
  if (name == "noisy") return WrapperKind::kNoisy;
  if (name == "sparse") return WrapperKind::kSparse;
  if (name == "delayed") return WrapperKind::kDelayed;
  throw ConfigError("unknown wrapper: " + name);
}

GradientMode RunConfig::gradient_mode() const {
  if (algorithm == "ocpg") return GradientMode::kCpg;
  if (algorithm == "td3-baseline") return GradientMode::kDpg;
  throw ConfigError("unknown algorithm: " + algorithm + " (expected ocpg or td3-baseline)");
}

void RunConfig::validate() const {
  gradient_mode();
  agent.validate();
  if (total_steps < 1) throw ConfigError("config: total_steps must be >= 1");
  if (seeds.empty()) throw ConfigError("config: at least one seed is required");
  if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
  if (out_dir.empty()) throw ConfigError("config: out_dir must be set");
  if (noisy_scale < 0.0) throw ConfigError("config: noisy_scale must be >= 0");
  if (!(sparse_keep_prob > 0.0 && sparse_keep_prob <= 1.0)) {
    throw ConfigError("config: sparse_keep_prob must be in (0,1]");
  }
  if (delay_steps < 0) throw ConfigError("config: delay_steps must be >= 0");
  if (checkpoint_every < 0) throw ConfigError("config: checkpoint_every must be >= 0");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::istringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const auto dots = token.find("..");
    if (dots != std::string::npos) {
      const std::uint64_t lo = std::stoull(token.substr(0, dots));
      const std::uint64_t hi = std::stoull(token.substr(dots + 2));
      if (hi < lo) throw ConfigError("config: bad seed range " + token);
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(std::stoull(token));
    }
  }
  if (seeds.empty()) throw ConfigError("config: empty seed list");
  return seeds;
}

std::string format_seed_list(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(seeds[i]);
  }
  return out;
}

std::string RunConfig::serialize() const {
  std::ostringstream out;
  out << "# ocpg-config v1\n";
  out << "[run]\n";
  out << "command = " << command << '\n';
  out << "env = " << environment << '\n';
  out << "algorithm = " << algorithm << '\n';
  out << "total_steps = " << total_steps << '\n';
  out << "seeds = " << format_seed_list(seeds) << '\n';
  out << "out_dir = " << out_dir << '\n';
  out << "jobs = " << jobs << '\n';
  out << "wrapper = " << wrapper_name(wrapper) << '\n';
  out << "noisy_scale = " << format_double(noisy_scale) << '\n';
  out << "sparse_keep_prob = " << format_double(sparse_keep_prob) << '\n';
  out << "delay_steps = " << delay_steps << '\n';
  out << "checkpoint_every = " << checkpoint_every << '\n';
  out << "\n[agent]\n";
  out << "smoothing_mu = " << format_double(agent.smoothing_mu) << '\n';
  out << "discount = " << format_double(agent.discount) << '\n';
  out << "tau = " << format_double(agent.tau) << '\n';
  out << "batch_size = " << agent.batch_size << '\n';
  out << "actor_lr = " << format_double(agent.actor_lr) << '\n';
  out << "critic_lr = " << format_double(agent.critic_lr) << '\n';
  out << "policy_delay = " << agent.policy_delay << '\n';
  out << "target_noise_std = " << format_double(agent.target_noise_std) << '\n';
  out << "target_noise_clip = " << format_double(agent.target_noise_clip) << '\n';
  out << "exploration_steps = " << agent.exploration_steps << '\n';
  out << "hidden_units = " << agent.hidden_units << '\n';
  out << "replay_capacity = " << agent.replay_capacity << '\n';
  return out.str();
}

std::string RunConfig::config_hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(serialize())));
  return buf;
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write " + path);
  out << serialize();
}

void RunConfig::set_field(const std::string& key, const std::string& value) {
  try {
    if (key == "command") command = value;
    else if (key == "env") environment = value;
    else if (key == "algorithm") algorithm = value;
    else if (key == "total_steps") total_steps = std::stol(value);
    else if (key == "seeds") seeds = parse_seed_list(value);
    else if (key == "out_dir") out_dir = value;
    else if (key == "jobs") jobs = std::stoi(value);
    else if (key == "wrapper") wrapper = wrapper_from_name(value);
    else if (key == "noisy_scale") noisy_scale = std::stod(value);
    else if (key == "sparse_keep_prob") sparse_keep_prob = std::stod(value);
    else if (key == "delay_steps") delay_steps = std::stoi(value);
    else if (key == "checkpoint_every") checkpoint_every = std::stoi(value);
    else if (key == "smoothing_mu") agent.smoothing_mu = std::stod(value);
    else if (key == "discount") agent.discount = std::stod(value);
    else if (key == "tau") agent.tau = std::stod(value);
    else if (key == "batch_size") agent.batch_size = std::stoi(value);
    else if (key == "actor_lr") agent.actor_lr = std::stod(value);
    else if (key == "critic_lr") agent.critic_lr = std::stod(value);
    else if (key == "policy_delay") agent.policy_delay = std::stoi(value);
    else if (key == "target_noise_std") agent.target_noise_std = std::stod(value);
    else if (key == "target_noise_clip") agent.target_noise_clip = std::stod(value);
    else if (key == "exploration_steps") agent.exploration_steps = std::stol(value);
    else if (key == "hidden_units") agent.hidden_units = std::stoi(value);
    else if (key == "replay_capacity") agent.replay_capacity = std::stoull(value);
    else throw ConfigError("config: unknown key: " + key);
  } catch (const std::invalid_argument&) {
    throw ConfigError("config: bad value for " + key + ": " + value);
  } catch (const std::out_of_range&) {
    throw ConfigError("config: value out of range for " + key + ": " + value);
  }
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  RunConfig cfg;
  bool actor_lr_given = false;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // trim
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    line = line.substr(first, last - first + 1);
    if (line.empty() || line[0] == '#' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: bad line: " + line);
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    cfg.set_field(key, strip(line.substr(eq + 1)));
    if (key == "actor_lr") actor_lr_given = true;
  }
  // A file that switches the algorithm without pinning actor_lr gets the
  // mode's own default rate.
  cfg.agent.gradient_mode = cfg.gradient_mode();
  if (!actor_lr_given) {
    cfg.agent.actor_lr = default_agent_config(cfg.agent.gradient_mode).actor_lr;
  }
  return cfg;
}

std::string run_metadata_line(const RunConfig& config, std::uint64_t seed,
                              const std::string& kind) {
  std::ostringstream out;
  out << "# " << kind << " v1 algorithm=" << config.algorithm << " env=" << config.environment
      << " seed=" << seed << " config=" << config.config_hash() << " version=" << kVersionString;
  return out.str();
}

}  // namespace ocpg
