#include <doctest.h>

#include <cmath>
#include <random>

#include "corpus.hpp"
#include "loadcouple/analysis.hpp"
#include "loadcouple/scenario.hpp"
#include "oracle.hpp"

using namespace loadcouple;
using namespace loadcouple::testing;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("loads vanish with demand") {
  std::mt19937_64 rng(41);
  const auto inst = random_instance(rng);
  const std::vector<double> scales = {1e-6, 1.0};
  const auto rows = demand_sweep(inst, scales);
  REQUIRE(rows[0].rho_star.has_value());
  REQUIRE(rows[1].rho_star.has_value());
  CHECK(max_norm(*rows[0].rho_star) < 1e-3 * max_norm(*rows[1].rho_star));
}

TEST_CASE("sweep verdicts form a feasible prefix and loads grow") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 5; ++t) {
    const auto inst = random_instance(rng);
    const auto rows = demand_sweep(inst, grid(0.2, 4.0, 20));
    bool infeasible_seen = false;
    std::optional<Vector> prev;
    for (const auto& r : rows) {
      if (infeasible_seen) CHECK_FALSE(r.feasible);
      if (!r.feasible) {
        infeasible_seen = true;
        CHECK(r.spectral_radius >= 1.0);
        CHECK(r.status == SolveStatus::infeasible);
        continue;
      }
      CHECK(r.spectral_radius < 1.0);
      REQUIRE(r.rho_star.has_value());
      if (prev) CHECK((*r.rho_star - *prev).minCoeff() >= 0.0);
      prev = r.rho_star;
    }
    CHECK(infeasible_seen);
  }
}

TEST_CASE("parallel and warm-started sweeps agree") {
  std::mt19937_64 rng(43);
  const auto inst = random_instance(rng);
  const auto scales = grid(0.1, 3.0, 15);
  const auto par = demand_sweep(inst, scales);
  const auto ser = demand_sweep_serial(inst, scales);
  REQUIRE(par.size() == ser.size());
  for (std::size_t k = 0; k < par.size(); ++k) {
    CHECK(par[k].scale == ser[k].scale);
    CHECK(par[k].feasible == ser[k].feasible);
    CHECK(par[k].status == ser[k].status);
    if (par[k].rho_star) CHECK(max_norm(*par[k].rho_star - *ser[k].rho_star) <= 1e-8);
  }
}

TEST_CASE("sweep rejects bad grids") {
  const auto inst = single_cell_unit();
  const std::vector<double> down = {1.0, 0.5}, zero = {0.0, 1.0};
  CHECK_THROWS_AS(demand_sweep(inst, down), std::invalid_argument);
  CHECK_THROWS_AS(demand_sweep_serial(inst, zero), std::invalid_argument);
}

TEST_CASE("boundary of a two-cell instance matches the closed form") {
  SUBCASE("symmetric") {
    const auto b = feasibility_boundary(symmetric_two_cell(0.5), 0.5, 10.0, 1e-9);
    CHECK(std::abs(b.scale - 2.0) <= 2.0 * 1e-9);
    CHECK(b.last_feasible < b.first_infeasible);
    CHECK(b.last_feasible <= 2.0);
    CHECK(b.first_infeasible >= 2.0);
  }
  SUBCASE("random asymmetric") {
    std::mt19937_64 rng(44);
    for (int t = 0; t < 20; ++t) {
      const auto inst = random_instance(rng, {2, 2, 5, 20});
      const Matrix h = oracle_asymptotic_slope(inst);
      const double analytic = 1.0 / std::sqrt(h(0, 1) * h(1, 0));
      const auto b = feasibility_boundary(inst, 0.5 * analytic, 2.0 * analytic, 1e-8);
      CHECK(std::abs(b.scale - analytic) <= 1e-8 * analytic);
      CHECK(boundary_scale(coefficients(inst)) == doctest::Approx(analytic).epsilon(1e-8));
    }
  }
}

TEST_CASE("boundary preconditions") {
  const auto inst = symmetric_two_cell(0.5);
  CHECK_THROWS_AS(feasibility_boundary(inst, 3.0, 10.0, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(feasibility_boundary(inst, 0.5, 1.5, 1e-6), std::invalid_argument);
  CHECK(std::isinf(boundary_scale(coefficients(single_cell_unit()))));
}

TEST_CASE("nine-cell boundary sits at unit spectral radius") {
  const auto inst = generate(ScenarioSpec{});
  const double s = boundary_scale(coefficients(inst), 1e-3);
  const auto b = feasibility_boundary(inst, 0.5 * s, 2.0 * s, 1e-4);
  CHECK(b.spectral_radius >= 1.0 - 1e-3);
  CHECK(b.spectral_radius <= 1.0 + 1e-3);
}

TEST_CASE("comparison") {
  std::mt19937_64 rng(45);
  SUBCASE("an instance equals itself") {
    const auto inst = random_instance(rng);
    const auto r = compare_configs(inst, inst);
    CHECK(r.verdict == Dominance::equal);
    CHECK(r.base_verdict == Dominance::equal);
    CHECK(*r.a.rho_star == *r.b.rho_star);
    CHECK(r.a.boundary_scale == r.b.boundary_scale);
    CHECK(std::string(to_string(r.verdict)) == "equal");
  }
  SUBCASE("feasible beats infeasible") {
    const auto ok = symmetric_two_cell(0.5), bad = symmetric_two_cell(1.5);
    const auto r = compare_configs(ok, bad);
    CHECK(r.a.feasible);
    CHECK_FALSE(r.b.feasible);
    CHECK(r.base_verdict == Dominance::a_dominates);
    CHECK(r.verdict == Dominance::a_dominates);
    CHECK(compare_configs(bad, ok).base_verdict == Dominance::b_dominates);
  }
  SUBCASE("higher demand is dominated") {
    const auto inst = random_instance(rng);
    const auto r = compare_configs(inst, scale_demand(inst, 1.2));
    CHECK(r.verdict == Dominance::a_dominates);
  }
  SUBCASE("cell counts must match") {
    CHECK_THROWS_AS(compare_configs(single_cell_unit(), symmetric_two_cell(0.5)), std::invalid_argument);
  }
}

TEST_CASE("bound quality") {
  SUBCASE("decoupled cell has zero gaps") {
    const auto rows = bound_quality(single_cell_unit());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].lower_gap_pct == 0.0);
    CHECK(rows[0].upper_gap_pct.value() == 0.0);
  }
  SUBCASE("tangent gap is the smaller one on a corpus") {
    for (const auto& inst : random_corpus(46, 30)) {
      for (const auto& r : bound_quality(inst)) {
        CHECK(r.lower_gap_pct > 0.0);
        REQUIRE(r.upper_gap_pct.has_value());
        CHECK(*r.upper_gap_pct >= 0.0);
        CHECK(*r.upper_gap_pct < r.lower_gap_pct);
        CHECK(r.rho_lower <= r.rho_star + 1e-9);
        CHECK(*r.rho_upper >= r.rho_star - 1e-9);
      }
    }
  }
  SUBCASE("infeasible instance is rejected") {
    CHECK_THROWS_AS(bound_quality(symmetric_two_cell(1.2)), std::domain_error);
  }
}
