// Acceptance suite: one line per criterion, non-zero exit if any fails.
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "corpus.hpp"
#include "loadcouple/analysis.hpp"
#include "loadcouple/linfeas.hpp"
#include "loadcouple/scenario.hpp"
#include "loadcouple/solver.hpp"
#include "oracle.hpp"

using namespace loadcouple;
using namespace loadcouple::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const std::vector<NetworkInstance>& corpus() {
  static const auto c = random_corpus(2718, 200);
  return c;
}

Vector uniform_vector(std::mt19937_64& rng, const Vector& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v(hi.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng) * hi(i);
  return v;
}

Vector fixed_point_of(const CouplingCoefficients& c) {
  const auto r = solve(c, newton_config());
  if (!r.converged()) throw std::runtime_error("corpus instance did not converge");
  return *r.fixed_point;
}

void fixed_point_correctness(Verdict& v) {
  const auto t0 = Clock::now();
  double worst_residual = 0.0, worst_gap = 0.0;
  int failures = 0;
  for (const auto& inst : corpus()) {
    const auto c = coefficients(inst);
    const auto fp = solve(c);
    const auto nt = solve(c, newton_config());
    if (!fp.converged() || !nt.converged()) {
      ++failures;
      continue;
    }
    for (const auto* r : {&fp, &nt}) {
      const Vector& rho = *r->fixed_point;
      worst_residual = std::max(worst_residual, max_norm(rho - load_function(c, rho)) / (1.0 + max_norm(rho)));
    }
    worst_gap = std::max(worst_gap, max_norm(*fp.fixed_point - *nt.fixed_point));
  }
  const double elapsed = seconds_since(t0);
  v.pass = failures == 0 && worst_residual <= 1e-10 && worst_gap <= 1e-8 && elapsed < 60.0;
  v.detail << "200 instances, " << failures << " unconverged, max scaled residual " << worst_residual
           << ", max method gap " << worst_gap << ", " << elapsed << " s";
}

void uniqueness(Verdict& v) {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 20; ++k) {
    const auto c = coefficients(corpus()[static_cast<std::size_t>(k)]);
    const Vector star = fixed_point_of(c);
    std::vector<Vector> ends;
    for (int s = 0; s < 10; ++s) {
      // starts below, around and far above the fixed point, used as given
      Vector start = s == 0 ? Vector::Zero(c.num_cells) : uniform_vector(rng, (0.5 * s) * star.array() + 0.1);
      SolverConfig config = s % 2 ? newton_config() : SolverConfig{};
      config.check_feasibility = false;
      config.initial_point = start;
      config.tol_residual = 1e-13;
      config.max_iter = 100000;
      const auto r = solve(c, config);
      if (!r.converged()) {
        ++failures;
        continue;
      }
      ends.push_back(*r.fixed_point);
    }
    for (std::size_t a = 0; a < ends.size(); ++a)
      for (std::size_t b = a + 1; b < ends.size(); ++b) worst = std::max(worst, max_norm(ends[a] - ends[b]));
  }
  v.pass = failures == 0 && worst <= 1e-8;
  v.detail << "200 solves, " << failures << " unconverged, max pairwise gap " << worst;
}

void feasibility_equivalence(Verdict& v) {
  const double grid[] = {0.5, 0.7, 0.8, 0.9, 0.95, 0.98, 1.02, 1.05, 1.1, 1.5, 2.0};
  int points = 0, mismatches = 0, newton_misses = 0;
  for (const auto& inst : corpus()) {
    const auto c = coefficients(inst);
    // boundary from a dense eigen-decomposition, independent of the library
    const double boundary = 1.0 / eigen_spectral_radius(oracle_asymptotic_slope(inst));
    for (double m : grid) {
      const auto scaled = scale_demand(c, m * boundary);
      const bool linear = feasibility_check(scaled).feasible;
      SolverConfig config;
      config.check_feasibility = false;
      config.max_iter = 10 * SolverConfig{}.max_iter;
      const auto r = solve(scaled, config);
      const bool nonlinear = r.converged() && (r.fixed_point->array() >= 0.0).all();
      mismatches += linear != nonlinear;
      if (linear) {
        SolverConfig nc = newton_config();
        nc.check_feasibility = false;
        nc.max_iter = config.max_iter;
        newton_misses += !solve(scaled, nc).converged();
      }
      ++points;
    }
  }
  v.pass = mismatches == 0 && newton_misses == 0;
  v.detail << points << " grid points, " << mismatches << " verdict mismatches, " << newton_misses
           << " feasible points Newton failed on";
}

void sandwich(Verdict& v) {
  double worst = std::numeric_limits<double>::infinity();
  int count = 0;
  for (const auto& inst : corpus()) {
    const auto c = coefficients(inst);
    if (!feasibility_check(c).feasible) continue;
    const Vector star = fixed_point_of(c);
    const Vector lo = lower_bound(c);
    const auto up = upper_bound(c, lo);
    if (!up) {
      worst = -std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::min({worst, (star - lo).minCoeff(), (*up - star).minCoeff()});
    ++count;
  }
  v.pass = count == 200 && worst >= -1e-9;
  v.detail << count << " feasible instances, min slack " << worst;
}

void derivatives(Verdict& v) {
  std::mt19937_64 rng(5);
  double worst_j = 0.0, worst_h = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto& inst = corpus()[static_cast<std::size_t>(k)];
    const auto c = coefficients(inst);
    const int n = c.num_cells;
    const Vector rho = uniform_vector(rng, Vector::Constant(n, 2.0));
    const Matrix j = jacobian(c, rho);
    const Matrix fd = finite_difference_jacobian(inst, rho, 1e-6L);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < n; ++a) {
        if (a == i) continue;
        worst_j = std::max(worst_j, rel(j(i, a), fd(i, a)));
        for (int b = a; b < n; ++b) {
          if (b == i) continue;
          const double fd2 = static_cast<double>(finite_difference_hessian(inst, i, a, b, rho, 1e-4L));
          worst_h = std::max(worst_h, rel(hessian_entry(c, i, a, b, rho), fd2));
        }
      }
    }
  }
  v.pass = worst_j <= 1e-5 && worst_h <= 1e-4;
  v.detail << "50 pairs, max jacobian rel error " << worst_j << ", max hessian rel error " << worst_h;
}

void concavity(Verdict& v) {
  // strict definiteness needs at least n - 1 demanded pixels per cell
  CorpusOptions opt;
  opt.min_pixels_per_cell = 11;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  double worst_eig = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const auto c = coefficients(random_instance(rng, opt));
    const Vector rho = uniform_vector(rng, Vector::Constant(c.num_cells, u(rng)));
    for (int i = 0; i < c.num_cells; ++i) {
      const Matrix h = cell_hessian(c, i, rho);
      if (h.size() == 0) continue;
      // relative to the hessian scale so tiny cells are judged alike
      const double scale = h.cwiseAbs().maxCoeff();
      Eigen::SelfAdjointEigenSolver<Matrix> es(h / scale);
      worst_eig = std::max(worst_eig, es.eigenvalues().maxCoeff());
    }
  }
  int violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto& inst = corpus()[static_cast<std::size_t>(k % 200)];
    const int n = inst.num_cells();
    const Vector hi = Vector::Constant(n, u(rng));
    const Vector x = uniform_vector(rng, hi), y = uniform_vector(rng, hi);
    const auto fx = oracle_load(inst, to_long(x)), fy = oracle_load(inst, to_long(y));
    const auto fm = oracle_load(inst, to_long(0.5 * (x + y)));
    for (int i = 0; i < n; ++i) {
      const long double avg = 0.5L * (fx[i] + fy[i]);
      if (fm[i] < avg - 1e-15L * avg) ++violations;
    }
  }
  v.pass = worst_eig < 0.0 && violations == 0;
  v.detail << "max normalised hessian eigenvalue " << worst_eig << " over 100 points, " << violations
           << " midpoint violations in 1000 triples";
}

void asymptotic_slope(Verdict& v) {
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto& inst = corpus()[static_cast<std::size_t>(k)];
    const Matrix h0 = oracle_asymptotic_slope(inst);
    const Matrix j = jacobian(coefficients(inst), Vector::Constant(inst.num_cells(), 1e6));
    for (int i = 0; i < h0.rows(); ++i)
      for (int a = 0; a < h0.cols(); ++a)
        if (i != a) worst = std::max(worst, rel(j(i, a), h0(i, a)));
  }
  v.pass = worst <= 1e-4;
  v.detail << "20 instances, max rel deviation " << worst;
}

void under_over(Verdict& v) {
  std::mt19937_64 rng(8);
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20; ++k) {
    const auto c = coefficients(corpus()[static_cast<std::size_t>(k)]);
    const auto h0 = asymptotic_linearization(c);
    const auto hbar = tangent_linearization(c, lower_bound(c));
    const Vector star = fixed_point_of(c);
    for (int s = 0; s < 50; ++s) {
      const Vector rho = uniform_vector(rng, 3.0 * star.array() + 1.0);
      const Vector f = load_function(c, rho);
      const double below = (f - evaluate(h0, rho)).minCoeff();
      const double above = (evaluate(hbar, rho) - f).minCoeff();
      worst = std::min({worst, below, above});
      violations += below < -1e-12 || above < -1e-12;
    }
  }
  v.pass = violations == 0;
  v.detail << "1000 samples, " << violations << " violations, min margin " << worst;
}

void two_cell_closed_form(Verdict& v) {
  std::mt19937_64 rng(9);
  CorpusOptions opt;
  opt.min_cells = opt.max_cells = 2;
  double worst_solution = 0.0, worst_boundary = 0.0;
  int flip_errors = 0;
  for (int k = 0; k < 100; ++k) {
    const auto inst = random_instance(rng, opt);
    const Matrix h = oracle_asymptotic_slope(inst);
    const Vector f0 = to_double(oracle_load(inst, {0.0L, 0.0L}));
    const double det = 1.0 - h(0, 1) * h(1, 0);
    const double r1 = (f0(0) + f0(1) * h(0, 1)) / det;
    const double r2 = (f0(1) + f0(0) * h(1, 0)) / det;
    const auto c = coefficients(inst);
    const auto out = solve_linear(asymptotic_linearization(c));
    if (!out.feasible()) {
      worst_solution = std::numeric_limits<double>::infinity();
      continue;
    }
    worst_solution = std::max({worst_solution, std::abs((*out.solution)(0) - r1) / std::max(1.0, r1),
                               std::abs((*out.solution)(1) - r2) / std::max(1.0, r2)});
    const double analytic = 1.0 / std::sqrt(h(0, 1) * h(1, 0));
    const auto b = feasibility_boundary(inst, 0.5 * analytic, 2.0 * analytic, 1e-10);
    worst_boundary = std::max(worst_boundary, std::abs(b.scale - analytic));
    flip_errors += !feasibility_check(scale_demand(c, analytic * (1.0 - 1e-6))).feasible;
    flip_errors += feasibility_check(scale_demand(c, analytic * (1.0 + 1e-6))).feasible;
  }
  v.pass = worst_solution <= 1e-12 && worst_boundary <= 1e-6 && flip_errors == 0;
  v.detail << "100 instances, max solution error " << worst_solution << ", max boundary error " << worst_boundary
           << ", " << flip_errors << " verdicts on the wrong side of H12*H21 = 1";
}

// Membership test for {rho : rho <= f(rho)}, cell by cell with early exit.
class SubSolutionSet {
 public:
  explicit SubSolutionSet(const CouplingCoefficients& c) : c_(c) {
    for (const auto& t : c.cells) rows_.emplace_back(t.interference);
  }

  bool contains(const Vector& rho) const {
    for (int i = 0; i < c_.num_cells; ++i) {
      const auto& t = c_.cells[static_cast<std::size_t>(i)];
      const auto& b = rows_[static_cast<std::size_t>(i)];
      double f = 0.0;
      for (Eigen::Index r = 0; r < b.rows(); ++r) {
        const double u = b.row(r).dot(rho) + t.noise(r);
        f += 1.0 / (t.demand_ratio(r) * std::log1p(1.0 / u));
      }
      if (rho(i) > std::numbers::ln2 * f) return false;
    }
    return true;
  }

 private:
  const CouplingCoefficients& c_;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> rows_;
};

void convex_program(Verdict& v) {
  CorpusOptions opt;
  opt.min_cells = 2;
  opt.max_cells = 5;
  opt.min_pixels_per_cell = 5;
  opt.max_pixels_per_cell = 20;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations = 0;
  long draws = 0;
  double closest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20; ++k) {
    const auto c = coefficients(random_instance(rng, opt));
    const SubSolutionSet set(c);
    const Vector star = fixed_point_of(c);
    const double target = star.sum();
    const Vector box = 1.1 * star;
    Vector rho(c.num_cells);
    for (int accepted = 0; accepted < 100000;) {
      for (Eigen::Index i = 0; i < rho.size(); ++i) rho(i) = unit(rng) * box(i);
      ++draws;
      if (!set.contains(rho)) continue;
      ++accepted;
      violations += rho.sum() > target + 1e-9;
      closest = std::min(closest, target - rho.sum());
    }
  }
  v.pass = violations == 0;
  v.detail << "20 instances x 100000 accepted samples (" << draws << " draws), " << violations
           << " above the optimum, closest approach " << closest;
}

void qualitative_scenario(Verdict& v) {
  const auto t0 = Clock::now();
  const auto config1 = generate(ScenarioSpec{});
  const auto config2 = rotate_sector(config1, 0, 180.0);
  const auto c1 = coefficients(config1), c2 = coefficients(config2);
  const double b1 = boundary_scale(c1), b2 = boundary_scale(c2);
  const Vector s1 = fixed_point_of(c1), s2 = fixed_point_of(c2);
  const bool boundary_ok = b1 > b2;
  const bool cells_ok = s2(7) > s1(7) && s2(8) > s1(8);
  bool gaps_ok = true;
  double max_upper = 0.0, min_lower = std::numeric_limits<double>::infinity();
  for (const auto& row : bound_quality(config1)) {
    if (!row.upper_gap_pct) {
      gaps_ok = false;
      continue;
    }
    gaps_ok = gaps_ok && *row.upper_gap_pct < 10.0 && *row.upper_gap_pct < row.lower_gap_pct;
    max_upper = std::max(max_upper, *row.upper_gap_pct);
    min_lower = std::min(min_lower, row.lower_gap_pct);
  }
  const double elapsed = seconds_since(t0);
  v.pass = boundary_ok && cells_ok && gaps_ok && elapsed < 30.0;
  v.detail << "boundary " << b1 << " vs " << b2 << ", cell 8 " << s1(7) << " -> " << s2(7) << ", cell 9 " << s1(8)
           << " -> " << s2(8) << ", tangent gap <= " << max_upper << "%, h0 gap >= " << min_lower << "%, "
           << elapsed << " s";
}

void radial_quasiconcavity(Verdict& v) {
  int violations = 0, checks = 0;
  for (const auto& inst : corpus()) {
    const auto c = coefficients(inst);
    const Vector star = fixed_point_of(c);
    for (int l = 1; l <= 9; ++l) {
      const double lambda = 0.1 * l;
      const Vector f = load_function(c, lambda * star);
      for (int i = 0; i < c.num_cells; ++i) {
        if (c.cells[static_cast<std::size_t>(i)].pixels.empty()) continue;
        ++checks;
        violations += !(f(i) > lambda * star(i));
      }
    }
  }
  v.pass = violations == 0;
  v.detail << checks << " checks, " << violations << " violations";
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Verdict&)>> criteria[] = {
      {"fixed-point correctness", fixed_point_correctness},
      {"uniqueness", uniqueness},
      {"feasibility equivalence", feasibility_equivalence},
      {"bound sandwich", sandwich},
      {"derivative correctness", derivatives},
      {"concavity", concavity},
      {"asymptotic slope", asymptotic_slope},
      {"under/over approximation", under_over},
      {"two-cell closed form", two_cell_closed_form},
      {"convex program optimum", convex_program},
      {"nine-cell configuration study", qualitative_scenario},
      {"radial quasiconcavity", radial_quasiconcavity},
  };
  int failed = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    const auto t0 = Clock::now();
    try {
      check(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    failed += !v.pass;
    std::printf("%s %2d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.str().c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
