#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loadcouple/solver.hpp"

namespace loadcouple {

struct SweepRow {
  double scale = 0.0;
  bool feasible = false;
  double spectral_radius = 0.0;  // of the asymptotic slope matrix
  SolveStatus status = SolveStatus::infeasible;
  std::optional<LoadVector> rho_star;
  std::optional<LoadVector> rho_lower;
  int iterations = 0;
};

struct SweepOptions {
  SolverConfig solver = newton_config();
};

/// Solves the instance at every demand scale. Points are independent and are
/// evaluated in parallel from cold starts; row order follows `scales`.
/// Throws std::invalid_argument unless `scales` is positive and strictly
/// increasing.
std::vector<SweepRow> demand_sweep(const NetworkInstance& instance, std::span<const double> scales,
                                   const SweepOptions& options = {});

/// Serial reference: walks the scales in order and warm-starts each solve
/// from the previous fixed point.
std::vector<SweepRow> demand_sweep_serial(const NetworkInstance& instance, std::span<const double> scales,
                                          const SweepOptions& options = {});

struct BoundaryResult {
  double scale = 0.0;             // midpoint of the final bracket
  double last_feasible = 0.0;
  double first_infeasible = 0.0;
  double spectral_radius = 0.0;   // asymptotic slope radius at `scale`
  int steps = 0;
};

/// Bisection on the asymptotic feasibility verdict until the bracket is
/// narrower than `tol` relative to its upper end. Throws
/// std::invalid_argument unless the instance is feasible at `lo` and
/// infeasible at `hi`.
BoundaryResult feasibility_boundary(const NetworkInstance& instance, double lo, double hi, double tol);

/// Brackets and bisects the boundary starting from scale 1. Returns +inf
/// when no finite scale makes the instance infeasible.
double boundary_scale(const CouplingCoefficients& coeffs, double tol = 1e-9);

enum class Dominance { equal, a_dominates, b_dominates, incomparable };
const char* to_string(Dominance d);

struct ConfigSummary {
  bool feasible = false;  // at the base scale
  std::optional<LoadVector> rho_star;
  std::optional<LoadVector> rho_lower;
  std::optional<LoadVector> rho_upper;
  double boundary_scale = 0.0;
  std::vector<double> max_load_on_grid;
};

struct ComparisonReport {
  ConfigSummary a;
  ConfigSummary b;
  std::vector<double> common_scales;  // feasible for both
  Dominance verdict = Dominance::incomparable;
  Dominance base_verdict = Dominance::incomparable;  // at scale 1
};

/// A configuration dominates when its boundary scale is strictly higher and
/// its max cell load is strictly lower at every common feasible grid scale.
ComparisonReport compare_configs(const NetworkInstance& a, const NetworkInstance& b, int grid_points = 9);

struct BoundQualityRow {
  int cell = 0;
  double rho_star = 0.0;
  double rho_lower = 0.0;
  std::optional<double> rho_upper;
  double lower_gap_pct = 0.0;
  std::optional<double> upper_gap_pct;
};

/// Relative gaps of the asymptotic (lower) and tangent (upper, anchored at
/// the lower bound) estimates against the fixed point, in percent. Throws
/// std::domain_error for infeasible instances.
std::vector<BoundQualityRow> bound_quality(const NetworkInstance& instance);

}  // namespace loadcouple
