#pragma once

#include <optional>

#include "loadcouple/coupling.hpp"

namespace loadcouple {

enum class LinearStatus { feasible, infeasible_negative, singular };

const char* to_string(LinearStatus status);

struct LinearSolveOutcome {
  LinearStatus status = LinearStatus::singular;
  std::optional<LoadVector> solution;  // present iff feasible
  double spectral_radius = 0.0;        // of the slope matrix
  bool fully_coupled = true;           // all off-diagonal slopes > 0

  bool feasible() const { return status == LinearStatus::feasible; }
};

struct SpectralRadius {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Perron root of a nonnegative matrix by power iteration on I + H, which is
/// primitive whenever H is irreducible. Stops when the Collatz-Wielandt
/// bracket min/max (Mx)_i / x_i closes to `tol`.
SpectralRadius spectral_radius(const Matrix& nonnegative, double tol = 1e-10, int max_iter = 10000);

/// Solves (I - H) rho = f(anchor) - H anchor. Pivots below 1e-12 of the
/// matrix scale report `singular`; any component below -1e-12 reports
/// `infeasible_negative`.
LinearSolveOutcome solve_linear(const LinearizedSystem& system);

struct FeasibilityVerdict {
  bool feasible = false;
  LinearizedSystem system;  // the asymptotic linearization
  LinearSolveOutcome outcome;
};

/// The nonlinear system has a nonnegative fixed point exactly when the
/// asymptotic linear system does.
FeasibilityVerdict feasibility_check(const CouplingCoefficients& coeffs);
FeasibilityVerdict feasibility_check(const NetworkInstance& instance);

/// Solution of the asymptotic system; a componentwise lower bound on the
/// fixed point. Throws std::domain_error when the instance is infeasible.
LoadVector lower_bound(const CouplingCoefficients& coeffs);
LoadVector lower_bound(const NetworkInstance& instance);

/// Solution of the tangent system at `anchor`, an upper bound on the fixed
/// point. Empty when the tangent system has no nonnegative solution.
std::optional<LoadVector> upper_bound(const CouplingCoefficients& coeffs, const LoadVector& anchor);
std::optional<LoadVector> upper_bound(const NetworkInstance& instance, const LoadVector& anchor);

}  // namespace loadcouple
