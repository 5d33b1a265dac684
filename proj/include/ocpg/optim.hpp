#pragma once

#include "ocpg/linalg.hpp"

namespace ocpg {

// Adam in descent form; callers negate the gradient for ascent.
class Adam {
 public:
  Adam() = default;
  Adam(long param_count, double learning_rate)
      : lr_(learning_rate),
        first_moment_(Vector::Zero(param_count)),
        second_moment_(Vector::Zero(param_count)) {}

  void step(Vector& params, const Vector& grad);

  double learning_rate() const { return lr_; }
  long step_count() const { return step_count_; }
  const Vector& first_moment() const { return first_moment_; }
  const Vector& second_moment() const { return second_moment_; }

  // Checkpoint restore.
  void restore(double lr, long step_count, Vector m, Vector v);

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

 private:
  double lr_ = 3e-4;
  Vector first_moment_;
  Vector second_moment_;
  long step_count_ = 0;
};

}  // namespace ocpg
