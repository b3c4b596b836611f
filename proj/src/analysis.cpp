#include "loadcouple/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace loadcouple {

namespace {

void check_scales(std::span<const double> scales) {
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (!(scales[k] > 0.0)) throw std::invalid_argument("sweep scales must be positive");
    if (k > 0 && !(scales[k] > scales[k - 1])) throw std::invalid_argument("sweep scales must be strictly increasing");
  }
}

SweepRow sweep_point(const CouplingCoefficients& base, double scale, SolverConfig config) {
  const CouplingCoefficients coeffs = scale_demand(base, scale);
  const SolveReport report = solve(coeffs, config);
  SweepRow row;
  row.scale = scale;
  row.feasible = report.status != SolveStatus::infeasible;
  row.spectral_radius = report.feasibility.spectral_radius;
  row.status = report.status;
  row.rho_star = report.fixed_point;
  row.rho_lower = report.lower;
  row.iterations = report.iterations;
  return row;
}

bool feasible_at(const CouplingCoefficients& base, double scale) {
  return feasibility_check(scale_demand(base, scale)).feasible;
}

double gap_pct(double estimate, double exact) {
  const double diff = std::abs(estimate - exact);
  if (diff == 0.0) return 0.0;
  return diff / exact * 100.0;
}

ConfigSummary summarize(const CouplingCoefficients& coeffs) {
  ConfigSummary s;
  const SolveReport report = solve(coeffs, newton_config());
  s.feasible = report.converged();
  s.rho_star = report.fixed_point;
  s.rho_lower = report.lower;
  s.rho_upper = report.upper;
  s.boundary_scale = boundary_scale(coeffs);
  return s;
}

}  // namespace

std::vector<SweepRow> demand_sweep(const NetworkInstance& instance, std::span<const double> scales,
                                   const SweepOptions& options) {
  check_scales(scales);
  const CouplingCoefficients base = coefficients(instance);
  std::vector<SweepRow> rows(scales.size());
  const auto count = static_cast<long>(scales.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) {
    rows[static_cast<std::size_t>(k)] = sweep_point(base, scales[static_cast<std::size_t>(k)], options.solver);
  }
  return rows;
}

std::vector<SweepRow> demand_sweep_serial(const NetworkInstance& instance, std::span<const double> scales,
                                          const SweepOptions& options) {
  check_scales(scales);
  const CouplingCoefficients base = coefficients(instance);
  std::vector<SweepRow> rows;
  rows.reserve(scales.size());
  SolverConfig config = options.solver;
  for (double s : scales) {
    rows.push_back(sweep_point(base, s, config));
    // The fixed point grows with demand, so the previous one is a valid
    // start from below for the next scale.
    if (rows.back().rho_star) config.initial_point = rows.back().rho_star;
  }
  return rows;
}

BoundaryResult feasibility_boundary(const NetworkInstance& instance, double lo, double hi, double tol) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("boundary search needs 0 < lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("boundary tolerance must be positive");
  const CouplingCoefficients base = coefficients(instance);
  if (!feasible_at(base, lo)) throw std::invalid_argument("instance is infeasible at the lower scale");
  if (feasible_at(base, hi)) throw std::invalid_argument("instance is feasible at the upper scale");

  BoundaryResult out;
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(base, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++out.steps;
  }
  out.last_feasible = lo;
  out.first_infeasible = hi;
  out.scale = 0.5 * (lo + hi);
  out.spectral_radius = spectral_radius(asymptotic_linearization(scale_demand(base, out.scale)).slope).value;
  return out;
}

double boundary_scale(const CouplingCoefficients& coeffs, double tol) {
  double lo = 1.0, hi = 1.0;
  if (feasible_at(coeffs, 1.0)) {
    for (int k = 0;; ++k) {
      if (k == 200) return std::numeric_limits<double>::infinity();
      hi *= 2.0;
      if (!feasible_at(coeffs, hi)) break;
      lo = hi;
    }
  } else {
    for (int k = 0;; ++k) {
      if (k == 200) return 0.0;
      lo *= 0.5;
      if (feasible_at(coeffs, lo)) break;
      hi = lo;
    }
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (feasible_at(coeffs, mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

const char* to_string(Dominance d) {
  switch (d) {
    case Dominance::equal: return "equal";
    case Dominance::a_dominates: return "a_dominates";
    case Dominance::b_dominates: return "b_dominates";
    case Dominance::incomparable: return "incomparable";
  }
  return "unknown";
}

ComparisonReport compare_configs(const NetworkInstance& a, const NetworkInstance& b, int grid_points) {
  if (a.num_cells() != b.num_cells()) throw std::invalid_argument("configurations must have the same cell count");
  if (grid_points < 1) throw std::invalid_argument("grid_points must be positive");
  const CouplingCoefficients ca = coefficients(a);
  const CouplingCoefficients cb = coefficients(b);
  ComparisonReport report;
  report.a = summarize(ca);
  report.b = summarize(cb);

  const double common = std::min(report.a.boundary_scale, report.b.boundary_scale);
  if (std::isfinite(common) && common > 0.0) {
    for (int k = 1; k <= grid_points; ++k) report.common_scales.push_back(common * k / (grid_points + 1));
  } else if (common > 0.0) {
    for (int k = 1; k <= grid_points; ++k) report.common_scales.push_back(static_cast<double>(k));
  }
  bool a_lower = true, b_lower = true, same = true;
  for (double s : report.common_scales) {
    const auto ra = solve(scale_demand(ca, s), newton_config());
    const auto rb = solve(scale_demand(cb, s), newton_config());
    const double ma = ra.fixed_point ? ra.fixed_point->maxCoeff() : std::numeric_limits<double>::infinity();
    const double mb = rb.fixed_point ? rb.fixed_point->maxCoeff() : std::numeric_limits<double>::infinity();
    report.a.max_load_on_grid.push_back(ma);
    report.b.max_load_on_grid.push_back(mb);
    a_lower = a_lower && ma < mb;
    b_lower = b_lower && mb < ma;
    same = same && ma == mb;
  }

  const double ba = report.a.boundary_scale, bb = report.b.boundary_scale;
  if (ba == bb && same) {
    report.verdict = Dominance::equal;
  } else if (ba > bb && a_lower) {
    report.verdict = Dominance::a_dominates;
  } else if (bb > ba && b_lower) {
    report.verdict = Dominance::b_dominates;
  } else {
    report.verdict = Dominance::incomparable;
  }

  if (report.a.feasible != report.b.feasible) {
    report.base_verdict = report.a.feasible ? Dominance::a_dominates : Dominance::b_dominates;
  } else if (!report.a.feasible) {
    report.base_verdict = Dominance::incomparable;
  } else {
    const double ma = report.a.rho_star->maxCoeff(), mb = report.b.rho_star->maxCoeff();
    report.base_verdict = ma < mb ? Dominance::a_dominates : mb < ma ? Dominance::b_dominates : Dominance::equal;
  }
  return report;
}

std::vector<BoundQualityRow> bound_quality(const NetworkInstance& instance) {
  const CouplingCoefficients coeffs = coefficients(instance);
  const SolveReport report = solve(coeffs, newton_config());
  if (!report.converged()) {
    throw std::domain_error(std::string("bound quality needs a solved instance, got ") + to_string(report.status));
  }
  const LoadVector& exact = *report.fixed_point;
  const LoadVector& lower = *report.lower;
  const auto upper = upper_bound(coeffs, lower);
  std::vector<BoundQualityRow> rows;
  for (int i = 0; i < coeffs.num_cells; ++i) {
    BoundQualityRow r;
    r.cell = i;
    r.rho_star = exact(i);
    r.rho_lower = lower(i);
    r.lower_gap_pct = gap_pct(lower(i), exact(i));
    if (upper) {
      r.rho_upper = (*upper)(i);
      r.upper_gap_pct = gap_pct((*upper)(i), exact(i));
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace loadcouple
