#include "loadcouple/solver.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace loadcouple {

namespace {

constexpr int kMaxHalvings = 30;
constexpr double kDivergenceLoad = 1e12;

struct Interval {
  std::optional<LoadVector> upper;
  double width = -1.0;
};

Interval refresh_upper(const CouplingCoefficients& coeffs, const LoadVector& rho) {
  Interval out;
  out.upper = upper_bound(coeffs, rho);
  if (out.upper) out.width = max_norm(*out.upper - rho);
  return out;
}

// Accepts a damped step only if it beats `best`, the lowest residual seen so
// far; otherwise falls back to a plain iteration. Without the running best a
// fallback that raises the residual can be undone by the next Newton step.
LoadVector newton_step(const CouplingCoefficients& coeffs, const LoadVector& rho, const LoadVector& f_rho,
                       double best, const LoadVector& floor) {
  const auto n = rho.size();
  const Matrix system_matrix = Matrix::Identity(n, n) - jacobian(coeffs, rho);
  const Vector step = system_matrix.partialPivLu().solve(f_rho - rho);
  if (step.allFinite()) {
    double damping = 1.0;
    for (int k = 0; k <= kMaxHalvings; ++k, damping *= 0.5) {
      const LoadVector candidate = (rho + damping * step).cwiseMax(floor);
      const double r = max_norm(candidate - load_function(coeffs, candidate));
      if (std::isfinite(r) && r < best) return candidate;
    }
  }
  return f_rho.cwiseMax(floor);
}

SolveReport run(const CouplingCoefficients& coeffs, const SolverConfig& config,
                std::optional<double> max_interval_width) {
  if (!(config.tol_residual > 0.0)) throw std::invalid_argument("tol_residual must be positive");
  if (config.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (config.bound_refresh_every < 1) throw std::invalid_argument("bound_refresh_every must be at least 1");

  const int n = coeffs.num_cells;
  SolveReport report;
  LoadVector floor = LoadVector::Zero(n);
  if (config.check_feasibility) {
    auto verdict = feasibility_check(coeffs);
    report.feasibility = verdict.outcome;
    if (!verdict.feasible) {
      report.status = SolveStatus::infeasible;
      return report;
    }
    floor = *verdict.outcome.solution;
    report.lower = floor;
  }

  LoadVector rho;
  if (config.initial_point) {
    if (config.initial_point->size() != n) throw std::invalid_argument("initial point size mismatch");
    rho = config.initial_point->cwiseMax(floor);
  } else if (config.check_feasibility) {
    rho = floor;
  } else {
    rho = load_function(coeffs, floor);
  }

  double best_residual = std::numeric_limits<double>::infinity();
  double residual_1 = 0.0, residual_2 = 0.0;  // one and two iterations back
  for (int t = 0;; ++t) {
    const LoadVector f_rho = load_function(coeffs, rho);
    const double residual = max_norm(rho - f_rho);
    best_residual = std::min(best_residual, residual);
    // Plain iteration with contraction q leaves an error of about
    // residual / (1 - q), so the residual test is tightened by 1 - q. q comes
    // from the two-step residual ratio, which stays meaningful when the error
    // alternates between cells. Half the tolerance is kept back for the error
    // in that estimate. Newton needs no such margin.
    double stop_factor = 1.0;
    if (config.method == SolveMethod::fixed_point) {
      stop_factor = t >= 2 && residual_2 > 0.0
                        ? 0.5 * std::clamp(1.0 - std::sqrt(residual / residual_2), 1e-6, 1.0)
                        : 1e-6;
    }
    residual_2 = residual_1;
    residual_1 = residual;
    report.iterations = t;
    report.residual = residual;
    report.iterate = rho;

    Interval interval;
    const bool refresh = max_interval_width.has_value() || t % config.bound_refresh_every == 0;
    if (refresh) interval = refresh_upper(coeffs, rho);
    report.trace.push_back({t, residual, interval.width});

    if (!rho.allFinite() || !std::isfinite(residual) || max_norm(rho) > kDivergenceLoad) {
      report.status = SolveStatus::diverged;
      return report;
    }
    if (residual <= stop_factor * config.tol_residual * (1.0 + max_norm(rho))) {
      report.status = SolveStatus::converged;
      report.fixed_point = rho;
      report.upper = refresh ? interval.upper : refresh_upper(coeffs, rho).upper;
      return report;
    }
    if (max_interval_width && interval.upper && interval.width <= *max_interval_width) {
      report.status = SolveStatus::interval_reached;
      report.fixed_point = rho;
      report.lower = rho;
      report.upper = interval.upper;
      return report;
    }
    if (t == config.max_iter) {
      report.status = SolveStatus::max_iter_exceeded;
      report.upper = refresh ? interval.upper : refresh_upper(coeffs, rho).upper;
      return report;
    }

    switch (config.method) {
      case SolveMethod::fixed_point: rho = f_rho.cwiseMax(floor); break;
      case SolveMethod::newton: rho = newton_step(coeffs, rho, f_rho, best_residual, floor); break;
    }
  }
}

}  // namespace

const char* to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::fixed_point: return "fixed_point";
    case SolveMethod::newton: return "newton";
  }
  return "unknown";
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::interval_reached: return "interval_reached";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::max_iter_exceeded: return "max_iter_exceeded";
    case SolveStatus::diverged: return "diverged";
  }
  return "unknown";
}

SolveReport solve(const CouplingCoefficients& coeffs, const SolverConfig& config) {
  return run(coeffs, config, std::nullopt);
}

SolveReport solve(const NetworkInstance& instance, const SolverConfig& config) {
  return solve(coefficients(instance), config);
}

SolveReport solve_with_interval_stop(const CouplingCoefficients& coeffs, double max_interval_width,
                                     SolverConfig config) {
  if (!(max_interval_width > 0.0)) throw std::invalid_argument("max_interval_width must be positive");
  config.method = SolveMethod::fixed_point;
  config.initial_point.reset();
  config.check_feasibility = true;
  return run(coeffs, config, max_interval_width);
}

SolveReport solve_with_interval_stop(const NetworkInstance& instance, double max_interval_width,
                                     SolverConfig config) {
  return solve_with_interval_stop(coefficients(instance), max_interval_width, std::move(config));
}

}  // namespace loadcouple
