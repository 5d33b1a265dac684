#pragma once

#include <memory>
#include <string>

#include "ocpg/linalg.hpp"
#include "ocpg/rng.hpp"

namespace ocpg {

struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
  bool terminal = false;  // drives discount 0 in TD targets
};

struct EnvSpec {
  int state_dim = 0;
  int action_dim = 0;
  Vector action_bound;  // per-dimension, strictly positive
  int max_episode_steps = 0;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual void seed(std::uint64_t seed) = 0;
  virtual Vector reset() = 0;

  struct Step {
    Vector next_state;
    double reward = 0.0;
    bool terminal = false;
  };
  virtual Step step(const Vector& action) = 0;

  // Running range of rewards emitted by this environment.
  bool has_reward_range() const { return reward_count_ > 0; }
  double reward_min() const { return reward_min_; }
  double reward_max() const { return reward_max_; }

 protected:
  void track_reward(double r) {
    if (reward_count_ == 0) {
      reward_min_ = reward_max_ = r;
    } else {
      if (r < reward_min_) reward_min_ = r;
      if (r > reward_max_) reward_max_ = r;
    }
    ++reward_count_;
  }

 private:
  double reward_min_ = 0.0;
  double reward_max_ = 0.0;
  long reward_count_ = 0;
};

// Linear dynamics s' = A s + B a (+ optional Gaussian process noise), reward
// -s'Qc s - a'Rc a, fixed horizon, initial states uniform in a centered box.
struct LqrParams {
  Matrix dynamics;      // A, q x q
  Matrix input_matrix;  // B, q x p
  Matrix state_cost;    // Qc, symmetric PSD
  Matrix action_cost;   // Rc, symmetric PD
  double discount = 0.99;
  double noise_std = 0.0;
  int horizon = 100;
  double init_halfwidth = 1.0;
  Vector action_bound;  // defaults to ones if empty

  void validate() const;
  int state_dim() const { return static_cast<int>(dynamics.rows()); }
  int action_dim() const { return static_cast<int>(input_matrix.cols()); }
};

LqrParams lqr_scalar_params();
LqrParams lqr_2d_params();

std::unique_ptr<Environment> make_lqr_env(const LqrParams& params, std::uint64_t seed);

// Pendulum swing-up: state (cos th, sin th, th_dot), bounded torque, reward
// -(angle^2 + 0.1 th_dot^2 + 0.001 torque^2), 200-step horizon.
std::unique_ptr<Environment> make_pendulum_env(std::uint64_t seed, double dt = 0.05);

// 2-D double integrator toward the origin, 100-step horizon.
std::unique_ptr<Environment> make_point_mass_env(std::uint64_t seed);

// Known ids: lqr-scalar, lqr-2d, pendulum, point-mass.
std::unique_ptr<Environment> make_env(const std::string& name, std::uint64_t seed);

// Reward wrappers. Dynamics pass through untouched; only emitted rewards
// change. Wrapper randomness is drawn from its own stream.
std::unique_ptr<Environment> noisy_rewards(std::unique_ptr<Environment> base, double scale,
                                           std::uint64_t seed);
std::unique_ptr<Environment> sparse_rewards(std::unique_ptr<Environment> base, double keep_prob,
                                            std::uint64_t seed);
std::unique_ptr<Environment> delayed_rewards(std::unique_ptr<Environment> base, int delay);

}  // namespace ocpg
