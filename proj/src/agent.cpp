#include "ocpg/agent.hpp"

#include <cmath>
#include <sstream>

namespace ocpg {

std::string gradient_mode_name(GradientMode mode) {
  return mode == GradientMode::kCpg ? "cpg" : "dpg";
}

GradientMode gradient_mode_from_name(const std::string& name) {
  if (name == "cpg") return GradientMode::kCpg;
  if (name == "dpg") return GradientMode::kDpg;
  throw ConfigError("unknown gradient mode: " + name);
}

void AgentConfig::validate() const {
  if (!(smoothing_mu > 0.0)) throw ConfigError("agent: smoothing_mu must be positive");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("agent: discount must be in (0,1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("agent: tau must be in (0,1]");
  if (batch_size < 1) throw ConfigError("agent: batch_size must be >= 1");
  if (policy_delay < 1) throw ConfigError("agent: policy_delay must be >= 1");
  if (!(target_noise_clip > 0.0)) throw ConfigError("agent: target_noise_clip must be positive");
  if (target_noise_std < 0.0) throw ConfigError("agent: target_noise_std must be >= 0");
  if (exploration_steps < 0) throw ConfigError("agent: exploration_steps must be >= 0");
  if (hidden_units < 1) throw ConfigError("agent: hidden_units must be >= 1");
  if (actor_lr <= 0.0 || critic_lr <= 0.0) throw ConfigError("agent: learning rates must be positive");
}

AgentConfig default_agent_config(GradientMode mode) {
  AgentConfig cfg;
  cfg.gradient_mode = mode;
  cfg.actor_lr = (mode == GradientMode::kCpg) ? 5e-5 : 3e-4;
  return cfg;
}

AgentState make_agent(const EnvSpec& spec, const AgentConfig& config, Rng& init_rng) {
  config.validate();
  const std::vector<int> hidden{config.hidden_units, config.hidden_units};
  AgentState agent;
  agent.actor =
      Mlp::make(spec.state_dim, hidden, spec.action_dim, Activation::kRelu, Activation::kTanh);
  agent.actor.set_output_scale(spec.action_bound);
  agent.actor.init_uniform(init_rng);

  const int critic_in = spec.state_dim + spec.action_dim;
  agent.critic1 = Mlp::make(critic_in, hidden, 1, Activation::kRelu, Activation::kIdentity);
  agent.critic1.init_uniform(init_rng);
  agent.critic2 = Mlp::make(critic_in, hidden, 1, Activation::kRelu, Activation::kIdentity);
  agent.critic2.init_uniform(init_rng);

  agent.actor_target = agent.actor;
  agent.critic1_target = agent.critic1;
  agent.critic2_target = agent.critic2;

  agent.actor_opt = Adam(agent.actor.param_count(), config.actor_lr);
  agent.critic1_opt = Adam(agent.critic1.param_count(), config.critic_lr);
  agent.critic2_opt = Adam(agent.critic2.param_count(), config.critic_lr);
  return agent;
}

Vector uniform_action(const Vector& action_bound, Rng& rng) {
  Vector a(action_bound.size());
  for (long i = 0; i < a.size(); ++i) a(i) = rng.uniform(-action_bound(i), action_bound(i));
  return a;
}

Vector act_explore(const Vector& state, const Mlp& actor, double mu, const Vector& action_bound,
                   Rng& rng) {
  Vector a = actor.forward(state);
  for (long i = 0; i < a.size(); ++i) a(i) += mu * rng.normal();
  return a.cwiseMax(-action_bound).cwiseMin(action_bound);
}

Vector critic_target(const Batch& batch, const Mlp& actor_target, const Mlp& critic1_target,
                     const Mlp& critic2_target, const AgentConfig& config,
                     const Vector& action_bound, Rng& rng) {
  if (batch.size() == 0) throw ContractError("critic_target: empty batch");
  const long n = batch.size();
  Matrix next_actions = actor_target.forward_batch(batch.next_states);
  const double clip = config.target_noise_clip;
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < next_actions.rows(); ++j) {
      const double noise =
          std::clamp(config.target_noise_std * rng.normal(), -clip, clip);
      next_actions(j, i) =
          std::clamp(next_actions(j, i) + noise, -action_bound(j), action_bound(j));
    }
  }
  Matrix joint(batch.next_states.rows() + next_actions.rows(), n);
  joint.topRows(batch.next_states.rows()) = batch.next_states;
  joint.bottomRows(next_actions.rows()) = next_actions;
  const Matrix q1 = critic1_target.forward_batch(joint);
  const Matrix q2 = critic2_target.forward_batch(joint);

  Vector y(n);
  for (long i = 0; i < n; ++i) {
    const double bootstrap = batch.terminal[static_cast<std::size_t>(i)]
                                 ? 0.0
                                 : config.discount * std::min(q1(0, i), q2(0, i));
    y(i) = batch.rewards(i) + bootstrap;
  }
  require_finite(y, "critic targets");
  return y;
}

double critic_update(const Batch& batch, const Vector& targets, Mlp& critic, Adam& opt) {
  const long n = batch.size();
  if (targets.size() != n) throw ContractError("critic_update: target length mismatch");
  Matrix joint(batch.states.rows() + batch.actions.rows(), n);
  joint.topRows(batch.states.rows()) = batch.states;
  joint.bottomRows(batch.actions.rows()) = batch.actions;
  const Matrix q = critic.forward_batch(joint);

  double loss = 0.0;
  Matrix upstream(1, n);
  for (long i = 0; i < n; ++i) {
    const double err = q(0, i) - targets(i);
    loss += err * err;
    upstream(0, i) = 2.0 * err / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  if (!std::isfinite(loss)) throw DivergenceError("critic_update: non-finite TD loss");

  const Vector grad = backward_batch(critic, joint, upstream, true, false).param_grad;
  Vector params = critic.flat_params();
  opt.step(params, grad);
  critic.set_flat_params(params);
  return loss;
}

CpgEstimate actor_update_cpg(const Matrix& states, Mlp& actor, const Mlp& critic1, double mu,
                             Adam& opt, Rng& rng) {
  CpgEstimate est = cpg_batch_gradient(actor, batch_critic(critic1), states, mu, rng);
  Vector params = actor.flat_params();
  const Vector descent = -est.gradient;
  opt.step(params, descent);
  actor.set_flat_params(params);
  return est;
}

Vector actor_update_dpg(const Matrix& states, Mlp& actor, const Mlp& critic1, Adam& opt) {
  const long n = states.cols();
  const Matrix actions = actor.forward_batch(states);
  Matrix joint(states.rows() + actions.rows(), n);
  joint.topRows(states.rows()) = states;
  joint.bottomRows(actions.rows()) = actions;
  const Matrix ones = Matrix::Ones(1, n);
  const Matrix input_grads = backward_batch(critic1, joint, ones, false, true).input_grad;
  const Matrix action_grads = input_grads.bottomRows(actions.rows());

  const Vector grad =
      backward_batch(actor, states, action_grads, true, false).param_grad / static_cast<double>(n);
  require_finite(grad, "dpg gradient");
  Vector params = actor.flat_params();
  const Vector descent = -grad;
  opt.step(params, descent);
  actor.set_flat_params(params);
  return grad;
}

void polyak_update(Mlp& target, const Mlp& online, double tau) {
  if (target.param_count() != online.param_count()) {
    throw ContractError("polyak_update: parameter shape mismatch");
  }
  target.set_flat_params(tau * online.flat_params() + (1.0 - tau) * target.flat_params());
}

long first_actor_update_step(const AgentConfig& config) {
  long t = config.exploration_steps + 1;
  while (t % config.policy_delay != 0) ++t;
  return t;
}

TrainResult train(const TrainSetup& setup, const AgentConfig& config, const TrainOptions& options) {
  config.validate();
  if (options.total_steps < 1) throw ConfigError("train: total_steps must be >= 1");
  if (!setup.make_train_env || !setup.make_eval_env) {
    throw ConfigError("train: environment factories are required");
  }

  Rng init_rng(options.seed, "init");
  Rng explore_rng(options.seed, "explore");
  Rng replay_rng(options.seed, "replay-sampling");
  Rng target_noise_rng(options.seed, "target-noise");
  Rng perturb_rng(options.seed, "perturbations");
  const std::uint64_t env_seed = Rng(options.seed, "env").raw();

  auto env = setup.make_train_env(env_seed);
  const EnvSpec& spec = env->spec();
  if (config.batch_size < 1) throw ConfigError("train: invalid batch size");

  AgentState agent = make_agent(spec, config, init_rng);
  ReplayBuffer buffer(config.replay_capacity, spec.state_dim, spec.action_dim);
  TrainResult result;
  int evals_since_checkpoint = 0;

  Vector state = env->reset();
  for (long t = 1; t <= options.total_steps; ++t) {
    const Vector action =
        (t <= config.exploration_steps)
            ? uniform_action(spec.action_bound, explore_rng)
            : act_explore(state, agent.actor, config.smoothing_mu, spec.action_bound,
                          explore_rng);
    auto step = env->step(action);
    buffer.push({state, action, step.reward, step.next_state, step.terminal});
    state = step.terminal ? env->reset() : step.next_state;

    if (t > config.exploration_steps) {
      try {
        const Batch batch = buffer.sample(static_cast<std::size_t>(config.batch_size), replay_rng);
        const Vector y = critic_target(batch, agent.actor_target, agent.critic1_target,
                                       agent.critic2_target, config, spec.action_bound,
                                       target_noise_rng);
        critic_update(batch, y, agent.critic1, agent.critic1_opt);
        critic_update(batch, y, agent.critic2, agent.critic2_opt);
        if (t % config.policy_delay == 0) {
          if (config.gradient_mode == GradientMode::kCpg) {
            actor_update_cpg(batch.states, agent.actor, agent.critic1, config.smoothing_mu,
                             agent.actor_opt, perturb_rng);
          } else {
            actor_update_dpg(batch.states, agent.actor, agent.critic1, agent.actor_opt);
          }
          polyak_update(agent.actor_target, agent.actor, config.tau);
          polyak_update(agent.critic1_target, agent.critic1, config.tau);
          polyak_update(agent.critic2_target, agent.critic2, config.tau);
        }
      } catch (const DivergenceError& e) {
        std::ostringstream msg;
        msg << "training diverged at step " << t << ": " << e.what()
            << " (actor |params|=" << agent.actor.flat_params().norm()
            << ", critic1 |params|=" << agent.critic1.flat_params().norm() << ")";
        throw DivergenceError(msg.str());
      }
    }
    agent.step = t;

    if (options.eval_interval > 0 && t % options.eval_interval == 0) {
      auto eval_env = setup.make_eval_env(options.seed + kEvalSeedOffset);
      const Mlp& actor = agent.actor;
      const double reward = evaluate_policy(
          [&actor](const Vector& s) { return actor.forward(s); }, *eval_env,
          options.eval_episodes, options.seed + kEvalSeedOffset);
      result.curve.push_back({t, reward});
      if (options.checkpoint_every_evals > 0 &&
          ++evals_since_checkpoint >= options.checkpoint_every_evals) {
        evals_since_checkpoint = 0;
        save_agent_checkpoint(options.checkpoint_dir + "/checkpoint_" + std::to_string(t) + ".ckpt",
                              agent, options.run_metadata);
      }
    }

    if (options.step_hook && !options.step_hook(agent, buffer, t)) break;
  }

  result.agent = std::move(agent);
  return result;
}

void save_agent_checkpoint(const std::string& path, const AgentState& agent,
                           const std::string& metadata, const ReplayBuffer* buffer) {
  CheckpointWriter w(path, metadata);
  w.write_i64(agent.step);
  w.write_mlp(agent.actor);
  w.write_mlp(agent.actor_target);
  w.write_mlp(agent.critic1);
  w.write_mlp(agent.critic2);
  w.write_mlp(agent.critic1_target);
  w.write_mlp(agent.critic2_target);
  w.write_adam(agent.actor_opt);
  w.write_adam(agent.critic1_opt);
  w.write_adam(agent.critic2_opt);
  w.write_u32(buffer != nullptr ? 1 : 0);
  if (buffer != nullptr) buffer->dump(w);
  if (!w.good()) throw ConfigError("checkpoint: write failed: " + path);
}

AgentCheckpoint load_agent_checkpoint(const std::string& path) {
  CheckpointReader r(path);
  AgentCheckpoint out;
  out.metadata = r.metadata();
  out.agent.step = r.read_i64();
  out.agent.actor = r.read_mlp();
  out.agent.actor_target = r.read_mlp();
  out.agent.critic1 = r.read_mlp();
  out.agent.critic2 = r.read_mlp();
  out.agent.critic1_target = r.read_mlp();
  out.agent.critic2_target = r.read_mlp();
  out.agent.actor_opt = r.read_adam();
  out.agent.critic1_opt = r.read_adam();
  out.agent.critic2_opt = r.read_adam();
  if (r.read_u32() != 0) out.buffer = ReplayBuffer::restore(r);
  return out;
}

}  // namespace ocpg
