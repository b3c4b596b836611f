#include "loadcouple/linfeas.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <stdexcept>

namespace loadcouple {

namespace {
constexpr double kPivotTolerance = 1e-12;
constexpr double kNegativeTolerance = 1e-12;
}  // namespace

const char* to_string(LinearStatus status) {
  switch (status) {
    case LinearStatus::feasible: return "feasible";
    case LinearStatus::infeasible_negative: return "infeasible_negative";
    case LinearStatus::singular: return "singular";
  }
  return "unknown";
}

SpectralRadius spectral_radius(const Matrix& h, double tol, int max_iter) {
  SpectralRadius out;
  const Eigen::Index n = h.rows();
  if (n == 0) {
    out.converged = true;
    return out;
  }
  Vector x = Vector::Constant(n, 1.0 / static_cast<double>(n));
  double hi = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector y = x + h * x;
    const Vector ratio = y.cwiseQuotient(x);
    const double lo = ratio.minCoeff();
    hi = ratio.maxCoeff();
    out.iterations = it;
    if (hi - lo <= tol * std::max(1.0, hi)) {
      out.value = std::max(0.0, 0.5 * (lo + hi) - 1.0);
      out.converged = true;
      return out;
    }
    x = y / y.sum();
  }
  // Reducible matrices can keep the bracket open; the upper end still
  // tends to the Perron root.
  out.value = std::max(0.0, hi - 1.0);
  return out;
}

LinearSolveOutcome solve_linear(const LinearizedSystem& sys) {
  const Eigen::Index n = sys.slope.rows();
  if (sys.slope.cols() != n || sys.anchor.size() != n || sys.offset.size() != n) {
    throw std::invalid_argument("linearized system dimensions do not match");
  }
  LinearSolveOutcome out;
  out.spectral_radius = spectral_radius(sys.slope).value;
  out.fully_coupled = sys.fully_coupled();

  const Matrix system_matrix = Matrix::Identity(n, n) - sys.slope;
  const Vector rhs = sys.offset - sys.slope * sys.anchor;
  const Eigen::PartialPivLU<Matrix> lu(system_matrix);
  const double scale = system_matrix.cwiseAbs().maxCoeff();
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > kPivotTolerance * scale)) {
    out.status = LinearStatus::singular;
    return out;
  }
  LoadVector x = lu.solve(rhs);
  if (!x.allFinite()) {
    out.status = LinearStatus::singular;
    return out;
  }
  if ((x.array() < -kNegativeTolerance).any()) {
    out.status = LinearStatus::infeasible_negative;
    return out;
  }
  out.status = LinearStatus::feasible;
  out.solution = x.cwiseMax(0.0);
  return out;
}

FeasibilityVerdict feasibility_check(const CouplingCoefficients& coeffs) {
  FeasibilityVerdict v;
  v.system = asymptotic_linearization(coeffs);
  v.outcome = solve_linear(v.system);
  v.feasible = v.outcome.feasible();
  return v;
}

FeasibilityVerdict feasibility_check(const NetworkInstance& instance) {
  return feasibility_check(coefficients(instance));
}

LoadVector lower_bound(const CouplingCoefficients& coeffs) {
  auto v = feasibility_check(coeffs);
  if (!v.feasible) throw std::domain_error("lower bound requested for an infeasible instance");
  return *v.outcome.solution;
}

LoadVector lower_bound(const NetworkInstance& instance) { return lower_bound(coefficients(instance)); }

std::optional<LoadVector> upper_bound(const CouplingCoefficients& coeffs, const LoadVector& anchor) {
  auto out = solve_linear(tangent_linearization(coeffs, anchor));
  return out.solution;
}

std::optional<LoadVector> upper_bound(const NetworkInstance& instance, const LoadVector& anchor) {
  return upper_bound(coefficients(instance), anchor);
}

}  // namespace loadcouple
