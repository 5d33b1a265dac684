#include "ocpg/optim.hpp"

#include <cmath>

namespace ocpg {

void Adam::step(Vector& params, const Vector& grad) {
  if (params.size() != first_moment_.size() || grad.size() != first_moment_.size()) {
    throw ContractError("adam: parameter/gradient length mismatch");
  }
  if (!grad.allFinite()) {
    throw DivergenceError("adam: non-finite gradient entries at update " +
                          std::to_string(step_count_ + 1));
  }
  ++step_count_;
  first_moment_ = kBeta1 * first_moment_ + (1.0 - kBeta1) * grad;
  second_moment_ = kBeta2 * second_moment_.array() + (1.0 - kBeta2) * grad.array().square();
  const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_count_));
  const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_count_));
  const Vector m_hat = first_moment_ / bias1;
  const Vector v_hat = second_moment_ / bias2;
  params.array() -= lr_ * m_hat.array() / (v_hat.array().sqrt() + kEps);
}

void Adam::restore(double lr, long step_count, Vector m, Vector v) {
  if (m.size() != v.size()) throw ConfigError("adam restore: moment length mismatch");
  lr_ = lr;
  step_count_ = step_count;
  first_moment_ = std::move(m);
  second_moment_ = std::move(v);
}

}  // namespace ocpg
