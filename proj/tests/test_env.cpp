#include <doctest.h>

#include <cmath>

#include "ocpg/env.hpp"
#include "ocpg/oracle.hpp"

using namespace ocpg;

TEST_CASE("lqr: scalar step follows the closed-form dynamics and reward") {
  auto env = make_lqr_env(lqr_scalar_params(), 1);
  env->reset();
  // place a known state by stepping from a reset we control: use a dedicated
  // env where init box collapses to a point
  LqrParams params = lqr_scalar_params();
  params.init_halfwidth = 0.0;
  auto pinned = make_lqr_env(params, 1);
  Vector s = pinned->reset();
  CHECK(s(0) == 0.0);

  // from s = 1: drive there first with a = ... easier to verify algebra on a
  // fresh env via the public step contract: s' = 0.9 s + a, r = -s^2 - 0.1 a^2
  auto env2 = make_lqr_env(lqr_scalar_params(), 7);
  Vector state = env2->reset();
  Vector action(1);
  action << 0.0;
  const auto step = env2->step(action);
  CHECK(step.reward == doctest::Approx(-state(0) * state(0)));
  CHECK(step.next_state(0) == doctest::Approx(0.9 * state(0)));
}

TEST_CASE("lqr: deadbeat action zeroes the next state") {
  auto env = make_lqr_env(lqr_scalar_params(), 3);
  Vector s = env->reset();
  Vector action(1);
  action << -0.9 * s(0);
  const auto step = env->step(action);
  CHECK(std::abs(step.next_state(0)) < 1e-15);
}

TEST_CASE("lqr: indefinite cost matrices are rejected") {
  LqrParams params = lqr_scalar_params();
  params.action_cost = Matrix::Constant(1, 1, -0.1);
  CHECK_THROWS_AS(make_lqr_env(params, 0), ConfigError);
  LqrParams asym = lqr_2d_params();
  asym.state_cost(0, 1) = 0.3;  // symmetry broken
  CHECK_THROWS_AS(make_lqr_env(asym, 0), ConfigError);
}

TEST_CASE("lqr: episodes terminate exactly at the horizon") {
  LqrParams params = lqr_scalar_params();
  params.horizon = 5;
  auto env = make_lqr_env(params, 11);
  env->reset();
  Vector a = Vector::Zero(1);
  for (int i = 0; i < 4; ++i) CHECK_FALSE(env->step(a).terminal);
  CHECK(env->step(a).terminal);
  env->reset();
  for (int i = 0; i < 4; ++i) CHECK_FALSE(env->step(a).terminal);
  CHECK(env->step(a).terminal);
}

TEST_CASE("pendulum: upright at rest with zero torque costs nothing") {
  // theta = 0 is reachable only through reset randomness; verify via the
  // reward formula instead: reward depends on (angle, speed, torque) of the
  // pre-step state, so feed a state through one step from a seed and check
  // the formula against the observation.
  auto env = make_pendulum_env(5);
  const Vector obs = env->reset();
  const double theta = std::atan2(obs(1), obs(0));
  const double speed = obs(2);
  Vector torque(1);
  torque << 0.4;
  const auto step = env->step(torque);
  const double expected = -(theta * theta + 0.1 * speed * speed + 0.001 * 0.4 * 0.4);
  CHECK(step.reward == doctest::Approx(expected));
}

TEST_CASE("pendulum: energy is conserved under zero torque at small dt") {
  auto env = make_pendulum_env(21, 1e-3);
  const Vector obs = env->reset();
  auto energy = [](const Vector& o) {
    // rod about the pivot: m g = 10, l = m = 1, inertia m l^2 / 3
    const double speed = o(2);
    return speed * speed / 6.0 + 5.0 * o(0);
  };
  const double e0 = energy(obs);
  const auto step = env->step(Vector::Zero(1));
  CHECK(std::abs(energy(step.next_state) - e0) < 1e-3);
}

TEST_CASE("pendulum: torque saturates at the action bound") {
  auto env = make_pendulum_env(31);
  env->reset();
  Vector huge(1);
  huge << 50.0;
  Vector small(1);
  small << 2.0;
  auto env2 = make_pendulum_env(31);
  env2->reset();
  const auto a = env->step(huge);
  const auto b = env2->step(small);
  CHECK(a.next_state(2) == b.next_state(2));  // same clipped torque
}

TEST_CASE("point-mass: the origin at rest under zero action is a fixed point") {
  auto env = make_point_mass_env(3);
  env->reset();
  // steer the public interface: there is no state setter, so verify the
  // reward/dynamics algebra at whatever reset state we get
  auto env2 = make_point_mass_env(3);
  const Vector s = env2->reset();
  const auto step = env2->step(Vector::Zero(2));
  const double expected_reward =
      -(s.head(2).squaredNorm() + 0.1 * s.tail(2).squaredNorm());
  CHECK(step.reward == doctest::Approx(expected_reward));
  // velocity unchanged under zero action; position advances by v dt
  CHECK(step.next_state(2) == doctest::Approx(s(2)));
  CHECK(step.next_state(3) == doctest::Approx(s(3)));
  CHECK(step.next_state(0) == doctest::Approx(s(0) + 0.1 * s(2)));
}

TEST_CASE("wrappers: dynamics pass through unchanged under a shared seed") {
  for (int kind = 0; kind < 3; ++kind) {
    auto plain = make_lqr_env(lqr_scalar_params(), 77);
    std::unique_ptr<Environment> wrapped = make_lqr_env(lqr_scalar_params(), 77);
    if (kind == 0) wrapped = noisy_rewards(std::move(wrapped), 0.1, 5);
    if (kind == 1) wrapped = sparse_rewards(std::move(wrapped), 0.5, 5);
    if (kind == 2) wrapped = delayed_rewards(std::move(wrapped), 10);

    Vector sp = plain->reset();
    Vector sw = wrapped->reset();
    CHECK((sp - sw).cwiseAbs().maxCoeff() == 0.0);
    Rng actions(9);
    for (int t = 0; t < 250; ++t) {
      Vector a(1);
      a << actions.uniform(-1.0, 1.0);
      const auto stepped_plain = plain->step(a);
      const auto stepped_wrapped = wrapped->step(a);
      CHECK((stepped_plain.next_state - stepped_wrapped.next_state).cwiseAbs().maxCoeff() == 0.0);
      CHECK(stepped_plain.terminal == stepped_wrapped.terminal);
      if (stepped_plain.terminal) {
        plain->reset();
        wrapped->reset();
      }
    }
  }
}

TEST_CASE("noisy_rewards: degenerate range means no noise on the first step") {
  auto env = noisy_rewards(make_lqr_env(lqr_scalar_params(), 13), 0.1, 99);
  auto plain = make_lqr_env(lqr_scalar_params(), 13);
  env->reset();
  plain->reset();
  Vector a(1);
  a << 0.3;
  CHECK(env->step(a).reward == plain->step(a).reward);
}

TEST_CASE("noisy_rewards: empirical noise std matches 0.1 of the true range") {
  // Environment with a pinned reward range so the scale is exact.
  class CyclingRewardEnv final : public Environment {
   public:
    CyclingRewardEnv() {
      spec_.state_dim = 1;
      spec_.action_dim = 1;
      spec_.action_bound = Vector::Ones(1);
      spec_.max_episode_steps = 1 << 30;
    }
    const EnvSpec& spec() const override { return spec_; }
    void seed(std::uint64_t) override {}
    Vector reset() override { return Vector::Zero(1); }
    Step step(const Vector&) override {
      ++t_;
      double r = 0.5;
      if (t_ == 1) r = 0.0;
      if (t_ == 2) r = 2.0;
      track_reward(r);
      return {Vector::Zero(1), r, false};
    }

   private:
    EnvSpec spec_;
    long t_ = 0;
  };

  auto env = noisy_rewards(std::make_unique<CyclingRewardEnv>(), 0.1, 4242);
  env->reset();
  Vector a = Vector::Zero(1);
  env->step(a);  // r = 0, range forms
  env->step(a);  // r = 2, range now exactly [0, 2]
  const long n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    const double noise = env->step(a).reward - 0.5;
    sum += noise;
    sum_sq += noise * noise;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum_sq / n - mean * mean);
  CHECK(sd == doctest::Approx(0.1 * 2.0).epsilon(0.02));
}

TEST_CASE("sparse_rewards: keep probability one is the identity wrapper") {
  auto wrapped = sparse_rewards(make_lqr_env(lqr_scalar_params(), 55), 1.0, 7);
  auto plain = make_lqr_env(lqr_scalar_params(), 55);
  wrapped->reset();
  plain->reset();
  Vector a(1);
  a << -0.2;
  for (int i = 0; i < 50; ++i) {
    CHECK(wrapped->step(a).reward == plain->step(a).reward);
  }
}

TEST_CASE("sparse_rewards: emitted rewards are the true reward or exactly zero") {
  auto plain = make_lqr_env(lqr_scalar_params(), 66);
  auto wrapped = sparse_rewards(make_lqr_env(lqr_scalar_params(), 66), 0.5, 8);
  plain->reset();
  wrapped->reset();
  long kept = 0;
  const long n = 100000;
  Rng actions(10);
  for (long i = 0; i < n; ++i) {
    Vector a(1);
    a << actions.uniform(-1.0, 1.0);
    const double truth = plain->step(a).reward;
    const double emitted = wrapped->step(a).reward;
    if (emitted != 0.0) {
      CHECK(emitted == truth);
      ++kept;
    }
  }
  // keep fraction within 1% of one half (true rewards are almost surely nonzero)
  CHECK(std::abs(static_cast<double>(kept) / n - 0.5) < 0.01);
}

TEST_CASE("delayed_rewards: zero delay is the identity wrapper") {
  auto wrapped = delayed_rewards(make_lqr_env(lqr_scalar_params(), 88), 0);
  auto plain = make_lqr_env(lqr_scalar_params(), 88);
  wrapped->reset();
  plain->reset();
  Vector a(1);
  a << 0.1;
  for (int i = 0; i < 20; ++i) CHECK(wrapped->step(a).reward == plain->step(a).reward);
}

TEST_CASE("delayed_rewards: stream shifts by the delay and flushes at the end") {
  LqrParams params = lqr_scalar_params();
  params.horizon = 20;
  auto plain = make_lqr_env(params, 123);
  auto wrapped = delayed_rewards(make_lqr_env(params, 123), 3);
  plain->reset();
  wrapped->reset();
  Vector a(1);
  std::vector<double> truth, emitted;
  Rng actions(11);
  for (int i = 0; i < 20; ++i) {
    a(0) = actions.uniform(-1.0, 1.0);
    truth.push_back(plain->step(a).reward);
    emitted.push_back(wrapped->step(a).reward);
  }
  for (int i = 0; i < 3; ++i) CHECK(emitted[static_cast<std::size_t>(i)] == 0.0);
  for (int i = 3; i < 19; ++i) {
    CHECK(emitted[static_cast<std::size_t>(i)] == truth[static_cast<std::size_t>(i - 3)]);
  }
  double sum_truth = 0.0, sum_emitted = 0.0;
  for (double r : truth) sum_truth += r;
  for (double r : emitted) sum_emitted += r;
  CHECK(sum_emitted == doctest::Approx(sum_truth).epsilon(1e-12));
}

TEST_CASE("reward-range tracking is monotone") {
  auto env = make_lqr_env(lqr_scalar_params(), 17);
  env->reset();
  Rng actions(12);
  double last_min = 1e300, last_max = -1e300;
  for (int i = 0; i < 300; ++i) {
    Vector a(1);
    a << actions.uniform(-1.0, 1.0);
    const auto s = env->step(a);
    if (s.terminal) env->reset();
    CHECK(env->reward_min() <= last_min);
    CHECK(env->reward_max() >= last_max);
    last_min = env->reward_min();
    last_max = env->reward_max();
  }
}

TEST_CASE("seeded environments reproduce trajectories exactly") {
  for (const char* name : {"lqr-scalar", "lqr-2d", "pendulum", "point-mass"}) {
    auto a = make_env(name, 31415);
    auto b = make_env(name, 31415);
    Vector sa = a->reset(), sb = b->reset();
    CHECK((sa - sb).cwiseAbs().maxCoeff() == 0.0);
    Rng actions(13);
    for (int i = 0; i < 50; ++i) {
      Vector act(a->spec().action_dim);
      for (long j = 0; j < act.size(); ++j) act(j) = actions.uniform(-1.0, 1.0);
      const auto ra = a->step(act);
      const auto rb = b->step(act);
      CHECK(ra.reward == rb.reward);
      CHECK((ra.next_state - rb.next_state).cwiseAbs().maxCoeff() == 0.0);
      if (ra.terminal) {
        a->reset();
        b->reset();
      }
    }
  }
}

TEST_CASE("lqr: optimal gain from value iteration beats nearby gains in return") {
  // Riccati solution sanity on the environment itself: simulate the optimal
  // gain and small perturbations of it; the optimal gain collects at least as
  // much discounted return from the same starts.
  const LqrParams params = lqr_scalar_params();
  const RiccatiSolution opt = solve_optimal(params);
  auto rollout = [&params](double gain, std::uint64_t seed) {
    auto env = make_lqr_env(params, seed);
    double total = 0.0;
    for (int ep = 0; ep < 20; ++ep) {
      Vector s = env->reset();
      double discount = 1.0;
      for (;;) {
        Vector a(1);
        a << std::clamp(gain * s(0), -1.0, 1.0);
        const auto step = env->step(a);
        total += discount * step.reward;
        discount *= params.discount;
        if (step.terminal) break;
        s = step.next_state;
      }
      discount = 1.0;
    }
    return total;
  };
  const double k_opt = opt.gain(0, 0);
  const double best = rollout(k_opt, 999);
  CHECK(best >= rollout(k_opt + 0.15, 999));
  CHECK(best >= rollout(k_opt - 0.15, 999));
}
