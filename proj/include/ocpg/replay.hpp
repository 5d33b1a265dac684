#pragma once

#include <cstdint>
#include <vector>

#include "ocpg/checkpoint.hpp"
#include "ocpg/env.hpp"
#include "ocpg/rng.hpp"

namespace ocpg {

// Column-major minibatch; sampled transitions are copies, never views.
struct Batch {
  Matrix states;       // q x n
  Matrix actions;      // p x n
  Vector rewards;      // n
  Matrix next_states;  // q x n
  std::vector<std::uint8_t> terminal;

  long size() const { return rewards.size(); }
};

// Fixed-capacity ring buffer with uniform with-replacement sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
      : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
    if (capacity == 0) throw ConfigError("replay: capacity must be positive");
    states_.resize(state_dim, static_cast<long>(capacity));
    actions_.resize(action_dim, static_cast<long>(capacity));
    rewards_.resize(static_cast<long>(capacity));
    next_states_.resize(state_dim, static_cast<long>(capacity));
    terminal_.resize(capacity, 0);
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

  void push(const Transition& t) {
    if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ ||
        t.action.size() != action_dim_) {
      throw ConfigError("replay: transition dimensions do not match buffer spec");
    }
    const long i = static_cast<long>(cursor_);
    states_.col(i) = t.state;
    actions_.col(i) = t.action;
    rewards_(i) = t.reward;
    next_states_.col(i) = t.next_state;
    terminal_[cursor_] = t.terminal ? 1 : 0;
    cursor_ = (cursor_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
  }

  Batch sample(std::size_t n, Rng& rng) const {
    if (size_ == 0) throw UsageError("replay: cannot sample from an empty buffer");
    if (n == 0) throw UsageError("replay: sample size must be >= 1");
    Batch b;
    b.states.resize(state_dim_, static_cast<long>(n));
    b.actions.resize(action_dim_, static_cast<long>(n));
    b.rewards.resize(static_cast<long>(n));
    b.next_states.resize(state_dim_, static_cast<long>(n));
    b.terminal.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const long i = static_cast<long>(rng.below(size_));
      b.states.col(static_cast<long>(k)) = states_.col(i);
      b.actions.col(static_cast<long>(k)) = actions_.col(i);
      b.rewards(static_cast<long>(k)) = rewards_(i);
      b.next_states.col(static_cast<long>(k)) = next_states_.col(i);
      b.terminal[k] = terminal_[static_cast<std::size_t>(i)];
    }
    return b;
  }

  // Oldest-first logical indexing (index 0 is the oldest stored transition).
  Transition at(std::size_t logical) const {
    if (logical >= size_) throw UsageError("replay: index out of range");
    const std::size_t start = (size_ == capacity_) ? cursor_ : 0;
    const long i = static_cast<long>((start + logical) % capacity_);
    Transition t;
    t.state = states_.col(i);
    t.action = actions_.col(i);
    t.reward = rewards_(i);
    t.next_state = next_states_.col(i);
    t.terminal = terminal_[static_cast<std::size_t>(i)] != 0;
    return t;
  }

  void dump(CheckpointWriter& w) const {
    w.write_i64(static_cast<std::int64_t>(capacity_));
    w.write_i64(state_dim_);
    w.write_i64(action_dim_);
    w.write_i64(static_cast<std::int64_t>(size_));
    for (std::size_t k = 0; k < size_; ++k) {
      const Transition t = at(k);
      w.write_vector(t.state);
      w.write_vector(t.action);
      w.write_f64(t.reward);
      w.write_vector(t.next_state);
      w.write_u32(t.terminal ? 1 : 0);
    }
  }

  static ReplayBuffer restore(CheckpointReader& r) {
    const auto capacity = static_cast<std::size_t>(r.read_i64());
    const int state_dim = static_cast<int>(r.read_i64());
    const int action_dim = static_cast<int>(r.read_i64());
    const auto count = static_cast<std::size_t>(r.read_i64());
    ReplayBuffer buf(capacity, state_dim, action_dim);
    for (std::size_t k = 0; k < count; ++k) {
      Transition t;
      t.state = r.read_vector();
      t.action = r.read_vector();
      t.reward = r.read_f64();
      t.next_state = r.read_vector();
      t.terminal = r.read_u32() != 0;
      buf.push(t);
    }
    return buf;
  }

 private:
  std::size_t capacity_;
  int state_dim_;
  int action_dim_;
  Matrix states_;
  Matrix actions_;
  Vector rewards_;
  Matrix next_states_;
  std::vector<std::uint8_t> terminal_;
  std::size_t cursor_ = 0;
  std::size_t size_ = 0;
};

}  // namespace ocpg
