#include "ocpg/env.hpp"

#include <cmath>
#include <deque>

namespace ocpg {

namespace {

void require_symmetric_psd(const Matrix& m, bool strictly_positive, const std::string& name) {
  if (m.rows() != m.cols()) throw ConfigError(name + " must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError(name + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const double min_eig = es.eigenvalues().minCoeff();
  if (strictly_positive ? (min_eig <= 0.0) : (min_eig < -1e-12)) {
    throw ConfigError(name + (strictly_positive ? " must be positive definite"
                                                : " must be positive semi-definite"));
  }
}

}  // namespace

void LqrParams::validate() const {
  const int q = state_dim();
  const int p = action_dim();
  if (dynamics.rows() != q || dynamics.cols() != q) throw ConfigError("lqr: A must be q x q");
  if (input_matrix.rows() != q) throw ConfigError("lqr: B row count must match state dimension");
  if (state_cost.rows() != q) throw ConfigError("lqr: Qc must match state dimension");
  if (action_cost.rows() != p) throw ConfigError("lqr: Rc must match action dimension");
  require_symmetric_psd(state_cost, false, "lqr state cost Qc");
  require_symmetric_psd(action_cost, true, "lqr action cost Rc");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("lqr: discount must be in (0,1)");
  if (noise_std < 0.0) throw ConfigError("lqr: noise_std must be non-negative");
  if (horizon < 1) throw ConfigError("lqr: horizon must be >= 1");
  if (action_bound.size() != 0 && (action_bound.size() != p || action_bound.minCoeff() <= 0.0)) {
    throw ConfigError("lqr: action_bound must be positive and match action dimension");
  }
}

LqrParams lqr_scalar_params() {
  LqrParams p;
  p.dynamics = Matrix::Constant(1, 1, 0.9);
  p.input_matrix = Matrix::Constant(1, 1, 1.0);
  p.state_cost = Matrix::Constant(1, 1, 1.0);
  p.action_cost = Matrix::Constant(1, 1, 0.1);
  p.init_halfwidth = 1.0;
  return p;
}

LqrParams lqr_2d_params() {
  LqrParams p;
  p.dynamics = Matrix{{0.95, 0.05}, {0.0, 0.9}};
  p.input_matrix = Matrix::Identity(2, 2);
  p.state_cost = Matrix::Identity(2, 2);
  p.action_cost = 0.1 * Matrix::Identity(2, 2);
  p.init_halfwidth = 0.5;
  return p;
}

namespace {

class LqrEnv final : public Environment {
 public:
  LqrEnv(LqrParams params, std::uint64_t seed) : params_(std::move(params)), rng_(seed) {
    params_.validate();
    spec_.state_dim = params_.state_dim();
    spec_.action_dim = params_.action_dim();
    spec_.action_bound = params_.action_bound.size() > 0
                             ? params_.action_bound
                             : Vector::Ones(spec_.action_dim);
    spec_.max_episode_steps = params_.horizon;
  }

  const EnvSpec& spec() const override { return spec_; }
  void seed(std::uint64_t s) override { rng_ = Rng(s); }

  Vector reset() override {
    state_.resize(spec_.state_dim);
    for (int i = 0; i < spec_.state_dim; ++i) {
      state_(i) = rng_.uniform(-params_.init_halfwidth, params_.init_halfwidth);
    }
    steps_ = 0;
    return state_;
  }

  Step step(const Vector& action) override {
    if (action.size() != spec_.action_dim) throw ConfigError("lqr: action dimension mismatch");
    const double reward = -(state_.dot(params_.state_cost * state_)) -
                          (action.dot(params_.action_cost * action));
    Vector next = params_.dynamics * state_ + params_.input_matrix * action;
    if (params_.noise_std > 0.0) {
      for (int i = 0; i < spec_.state_dim; ++i) next(i) += params_.noise_std * rng_.normal();
    }
    state_ = next;
    ++steps_;
    track_reward(reward);
    return {state_, reward, steps_ >= params_.horizon};
  }

 private:
  LqrParams params_;
  EnvSpec spec_;
  Rng rng_;
  Vector state_;
  int steps_ = 0;
};

class PendulumEnv final : public Environment {
 public:
  PendulumEnv(std::uint64_t seed, double dt) : rng_(seed), dt_(dt) {
    spec_.state_dim = 3;
    spec_.action_dim = 1;
    spec_.action_bound = Vector::Constant(1, kMaxTorque);
    spec_.max_episode_steps = 200;
  }

  const EnvSpec& spec() const override { return spec_; }
  void seed(std::uint64_t s) override { rng_ = Rng(s); }

  Vector reset() override {
    theta_ = rng_.uniform(-kPi, kPi);
    theta_dot_ = rng_.uniform(-1.0, 1.0);
    steps_ = 0;
    return observation();
  }

  Step step(const Vector& action) override {
    if (action.size() != 1) throw ConfigError("pendulum: action must be scalar");
    const double torque = std::clamp(action(0), -kMaxTorque, kMaxTorque);
    const double angle = normalize_angle(theta_);
    const double reward =
        -(angle * angle + 0.1 * theta_dot_ * theta_dot_ + 0.001 * torque * torque);
    // Semi-implicit Euler: new velocity first, then position.
    theta_dot_ += (3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
                   3.0 / (kMass * kLength * kLength) * torque) *
                  dt_;
    theta_dot_ = std::clamp(theta_dot_, -kMaxSpeed, kMaxSpeed);
    theta_ += theta_dot_ * dt_;
    ++steps_;
    track_reward(reward);
    return {observation(), reward, steps_ >= spec_.max_episode_steps};
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kMaxSpeed = 8.0;

  static double normalize_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
  }

  Vector observation() const {
    Vector obs(3);
    obs << std::cos(theta_), std::sin(theta_), theta_dot_;
    return obs;
  }

  EnvSpec spec_;
  Rng rng_;
  double dt_;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
  int steps_ = 0;
};

class PointMassEnv final : public Environment {
 public:
  explicit PointMassEnv(std::uint64_t seed) : rng_(seed) {
    spec_.state_dim = 4;  // (x, y, vx, vy)
    spec_.action_dim = 2;
    spec_.action_bound = Vector::Ones(2);
    spec_.max_episode_steps = 100;
  }

  const EnvSpec& spec() const override { return spec_; }
  void seed(std::uint64_t s) override { rng_ = Rng(s); }

  Vector reset() override {
    state_.resize(4);
    state_(0) = rng_.uniform(-1.0, 1.0);
    state_(1) = rng_.uniform(-1.0, 1.0);
    state_(2) = rng_.uniform(-0.1, 0.1);
    state_(3) = rng_.uniform(-0.1, 0.1);
    steps_ = 0;
    return state_;
  }

  Step step(const Vector& action) override {
    if (action.size() != 2) throw ConfigError("point-mass: action must be 2-D");
    Vector accel = action.cwiseMax(-1.0).cwiseMin(1.0);
    const double pos_sq = state_.head(2).squaredNorm();
    const double vel_sq = state_.tail(2).squaredNorm();
    const double reward = -(pos_sq + 0.1 * vel_sq + 0.001 * accel.squaredNorm());
    state_.tail(2) += kDt * accel;
    state_.head(2) += kDt * state_.tail(2);
    ++steps_;
    track_reward(reward);
    return {state_, reward, steps_ >= spec_.max_episode_steps};
  }

 private:
  static constexpr double kDt = 0.1;

  EnvSpec spec_;
  Rng rng_;
  Vector state_;
  int steps_ = 0;
};

// Base for wrappers that only transform rewards.
class RewardWrapper : public Environment {
 public:
  explicit RewardWrapper(std::unique_ptr<Environment> base) : base_(std::move(base)) {}

  const EnvSpec& spec() const override { return base_->spec(); }
  void seed(std::uint64_t s) override { base_->seed(s); }
  Vector reset() override { return base_->reset(); }

  Step step(const Vector& action) override {
    Step s = base_->step(action);
    s.reward = transform(s.reward, s.terminal);
    track_reward(s.reward);
    return s;
  }

 protected:
  virtual double transform(double true_reward, bool terminal) = 0;
  Environment& base() { return *base_; }

 private:
  std::unique_ptr<Environment> base_;
};

class NoisyRewards final : public RewardWrapper {
 public:
  NoisyRewards(std::unique_ptr<Environment> base, double scale, std::uint64_t seed)
      : RewardWrapper(std::move(base)), scale_(scale), rng_(seed) {
    if (scale < 0.0) throw ConfigError("noisy_rewards: scale must be non-negative");
  }

 protected:
  double transform(double true_reward, bool) override {
    // The reward range is read from the true rewards observed so far; the
    // very first step has a degenerate range and stays noise-free.
    const double range =
        base().has_reward_range() ? base().reward_max() - base().reward_min() : 0.0;
    return true_reward + scale_ * range * rng_.normal();
  }

 private:
  double scale_;
  Rng rng_;
};

class SparseRewards final : public RewardWrapper {
 public:
  SparseRewards(std::unique_ptr<Environment> base, double keep_prob, std::uint64_t seed)
      : RewardWrapper(std::move(base)), keep_prob_(keep_prob), rng_(seed) {
    if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
      throw ConfigError("sparse_rewards: keep_prob must be in (0, 1]");
    }
  }

 protected:
  double transform(double true_reward, bool) override {
    return rng_.uniform01() < keep_prob_ ? true_reward : 0.0;
  }

 private:
  double keep_prob_;
  Rng rng_;
};

class DelayedRewards final : public RewardWrapper {
 public:
  DelayedRewards(std::unique_ptr<Environment> base, int delay)
      : RewardWrapper(std::move(base)), delay_(delay) {
    if (delay < 0) throw ConfigError("delayed_rewards: delay must be >= 0");
  }

  Vector reset() override {
    queue_.clear();
    return RewardWrapper::reset();
  }

 protected:
  double transform(double true_reward, bool terminal) override {
    if (delay_ == 0) return true_reward;
    queue_.push_back(true_reward);
    double emitted = 0.0;
    if (queue_.size() > static_cast<std::size_t>(delay_)) {
      emitted = queue_.front();
      queue_.pop_front();
    }
    if (terminal) {
      // Flush the residual queue so the episodic return is preserved.
      for (double r : queue_) emitted += r;
      queue_.clear();
    }
    return emitted;
  }

 private:
  int delay_;
  std::deque<double> queue_;
};

}  // namespace

std::unique_ptr<Environment> make_lqr_env(const LqrParams& params, std::uint64_t seed) {
  return std::make_unique<LqrEnv>(params, seed);
}

std::unique_ptr<Environment> make_pendulum_env(std::uint64_t seed, double dt) {
  return std::make_unique<PendulumEnv>(seed, dt);
}

std::unique_ptr<Environment> make_point_mass_env(std::uint64_t seed) {
  return std::make_unique<PointMassEnv>(seed);
}

std::unique_ptr<Environment> make_env(const std::string& name, std::uint64_t seed) {
  if (name == "lqr-scalar") return make_lqr_env(lqr_scalar_params(), seed);
  if (name == "lqr-2d") return make_lqr_env(lqr_2d_params(), seed);
  if (name == "pendulum") return make_pendulum_env(seed);
  if (name == "point-mass") return make_point_mass_env(seed);
  throw ConfigError("unknown environment: " + name);
}

std::unique_ptr<Environment> noisy_rewards(std::unique_ptr<Environment> base, double scale,
                                           std::uint64_t seed) {
  return std::make_unique<NoisyRewards>(std::move(base), scale, seed);
}

std::unique_ptr<Environment> sparse_rewards(std::unique_ptr<Environment> base, double keep_prob,
                                            std::uint64_t seed) {
  return std::make_unique<SparseRewards>(std::move(base), keep_prob, seed);
}

std::unique_ptr<Environment> delayed_rewards(std::unique_ptr<Environment> base, int delay) {
  return std::make_unique<DelayedRewards>(std::move(base), delay);
}

}  // namespace ocpg
