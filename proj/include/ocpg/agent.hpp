#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "ocpg/env.hpp"
#include "ocpg/mlp.hpp"
#include "ocpg/optim.hpp"
#include "ocpg/replay.hpp"
#include "ocpg/rng.hpp"
#include "ocpg/stats.hpp"
#include "ocpg/zeroth_order.hpp"

namespace ocpg {

enum class GradientMode { kCpg, kDpg };

std::string gradient_mode_name(GradientMode mode);
GradientMode gradient_mode_from_name(const std::string& name);

struct AgentConfig {
  double smoothing_mu = 0.1;       // shared exploration / smoothing scale
  double discount = 0.99;
  double tau = 0.005;
  int batch_size = 256;
  double actor_lr = 5e-5;          // 3e-4 for the dpg baseline
  double critic_lr = 3e-4;
  int policy_delay = 2;
  double target_noise_std = 0.2;
  double target_noise_clip = 0.5;
  long exploration_steps = 25000;
  GradientMode gradient_mode = GradientMode::kCpg;
  int hidden_units = 256;
  std::size_t replay_capacity = 1'000'000;

  void validate() const;
};

// Table-2 defaults for the given gradient mode (they differ only in actor_lr).
AgentConfig default_agent_config(GradientMode mode);

struct AgentState {
  Mlp actor, actor_target;
  Mlp critic1, critic2, critic1_target, critic2_target;
  Adam actor_opt, critic1_opt, critic2_opt;
  long step = 0;
};

// Networks drawn from init_rng (actor, then critic 1, then critic 2); targets
// start as exact copies.
AgentState make_agent(const EnvSpec& spec, const AgentConfig& config, Rng& init_rng);

Vector uniform_action(const Vector& action_bound, Rng& rng);

// pi(s) + mu * u, clipped to the action box for execution.
Vector act_explore(const Vector& state, const Mlp& actor, double mu, const Vector& action_bound,
                   Rng& rng);

// TD targets with clipped target-policy smoothing and the min over both
// target critics; terminal transitions bootstrap with discount zero.
Vector critic_target(const Batch& batch, const Mlp& actor_target, const Mlp& critic1_target,
                     const Mlp& critic2_target, const AgentConfig& config,
                     const Vector& action_bound, Rng& rng);

// One Adam step on one critic's mean-squared TD loss; returns the loss.
double critic_update(const Batch& batch, const Vector& targets, Mlp& critic, Adam& opt);

// One ascent step on the actor along the batch zeroth-order estimate.
CpgEstimate actor_update_cpg(const Matrix& states, Mlp& actor, const Mlp& critic1, double mu,
                             Adam& opt, Rng& rng);

// First-order baseline: chain the actor Jacobian to the critic's exact
// action-gradient; returns the (pre-negation) gradient estimate.
Vector actor_update_dpg(const Matrix& states, Mlp& actor, const Mlp& critic1, Adam& opt);

void polyak_update(Mlp& target, const Mlp& online, double tau);

struct TrainSetup {
  // Called with the run's env sub-seed; wrappers included.
  std::function<std::unique_ptr<Environment>(std::uint64_t)> make_train_env;
  // Noise-free environment used by the evaluation hook.
  std::function<std::unique_ptr<Environment>(std::uint64_t)> make_eval_env;
};

struct TrainOptions {
  long total_steps = 0;
  std::uint64_t seed = 0;
  long eval_interval = 1000;
  int eval_episodes = 10;
  int checkpoint_every_evals = 0;  // 0 disables periodic checkpoints
  std::string checkpoint_dir;
  std::string run_metadata;
  // Called after each environment step (post-update); return false to stop.
  std::function<bool(const AgentState&, const ReplayBuffer&, long)> step_hook;
};

struct TrainResult {
  AgentState agent;
  EvalSeries curve;
};

// Full training loop: explore, store, sample, update, evaluate every
// eval_interval steps. All randomness flows from named sub-streams of the
// run seed, so toggling the gradient mode leaves every other stream intact.
TrainResult train(const TrainSetup& setup, const AgentConfig& config, const TrainOptions& options);

// First step index at which the actor is updated (exploration phase excluded).
long first_actor_update_step(const AgentConfig& config);

void save_agent_checkpoint(const std::string& path, const AgentState& agent,
                           const std::string& metadata, const ReplayBuffer* buffer = nullptr);

struct AgentCheckpoint {
  AgentState agent;
  std::string metadata;
  std::optional<ReplayBuffer> buffer;
};

AgentCheckpoint load_agent_checkpoint(const std::string& path);

}  // namespace ocpg
