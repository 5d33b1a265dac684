#pragma once

#include <Eigen/Dense>
#include <string>

#include "ocpg/errors.hpp"

namespace ocpg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const std::string& what) {
  if (!m.allFinite()) {
    throw DivergenceError("non-finite values in " + what);
  }
}

inline void require_finite(double x, const std::string& what) {
  if (!std::isfinite(x)) {
    throw DivergenceError("non-finite value in " + what);
  }
}

}  // namespace ocpg
