#pragma once

#include <Eigen/Core>

namespace loadcouple {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point in the nonnegative load orthant, one component per cell.
using LoadVector = Eigen::VectorXd;

/// Max-norm; zero for empty vectors.
inline double max_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace loadcouple
