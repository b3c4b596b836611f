#pragma once

#include <optional>
#include <vector>

#include "loadcouple/linfeas.hpp"

namespace loadcouple {

enum class SolveMethod { fixed_point, newton };

enum class SolveStatus {
  converged,          // residual within tolerance
  interval_reached,   // certified interval narrower than the requested width
  infeasible,         // asymptotic linear system has no nonnegative solution
  max_iter_exceeded,
  diverged,           // iterate left the representable load range (unchecked solves only)
};

const char* to_string(SolveMethod method);
const char* to_string(SolveStatus status);

struct SolverConfig {
  SolveMethod method = SolveMethod::fixed_point;
  // Relative to 1 + |rho|_inf. Plain iteration divides its residual by the
  // observed 1 - contraction first, so the bound applies to the error.
  double tol_residual = 1e-10;
  int max_iter = 10000;
  int bound_refresh_every = 5;
  /// Starting point; projected onto rho >= lower bound. Defaults to the
  /// asymptotic lower bound.
  std::optional<LoadVector> initial_point;
  /// When false the asymptotic feasibility test is skipped and iteration
  /// starts from f(0). Used to probe nonlinear solvability directly.
  bool check_feasibility = true;
};

inline SolverConfig newton_config() {
  SolverConfig config;
  config.method = SolveMethod::newton;
  return config;
}

struct TraceRecord {
  int iteration = 0;
  double residual = 0.0;
  double interval_width = -1.0;  // |upper - iterate|_inf, -1 when not refreshed
};

struct SolveReport {
  SolveStatus status = SolveStatus::infeasible;
  std::optional<LoadVector> fixed_point;  // set when converged or interval_reached
  LoadVector iterate;                     // final iterate, also on failure
  std::optional<LoadVector> lower;        // certified lower bound
  std::optional<LoadVector> upper;        // tangent bound at the final iterate
  double residual = 0.0;                  // |rho - f(rho)|_inf at termination
  int iterations = 0;
  std::vector<TraceRecord> trace;
  LinearSolveOutcome feasibility;         // outcome of the asymptotic system

  bool converged() const { return status == SolveStatus::converged; }
};

/// Unique fixed point of rho = f(rho).
SolveReport solve(const CouplingCoefficients& coeffs, const SolverConfig& config = {});
SolveReport solve(const NetworkInstance& instance, const SolverConfig& config = {});

/// Ascends from the lower bound and stops as soon as the tangent upper bound
/// at the current iterate is within `max_interval_width` of it. `lower`
/// then holds that iterate, so [lower, upper] encloses the fixed point.
SolveReport solve_with_interval_stop(const CouplingCoefficients& coeffs, double max_interval_width,
                                     SolverConfig config = {});
SolveReport solve_with_interval_stop(const NetworkInstance& instance, double max_interval_width,
                                     SolverConfig config = {});

}  // namespace loadcouple
