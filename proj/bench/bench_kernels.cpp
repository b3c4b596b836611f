// Serial reference kernels against the OpenMP ones, and the warm-started
// serial sweep against the parallel cold-start sweep.
#include <benchmark/benchmark.h>

#include <vector>

#include "loadcouple/analysis.hpp"
#include "loadcouple/coupling.hpp"
#include "loadcouple/reference.hpp"
#include "loadcouple/scenario.hpp"

using namespace loadcouple;

namespace {

NetworkInstance network(int sites, int users) {
  ScenarioSpec spec;
  spec.num_sites = sites;
  spec.users_per_cell_area = users;
  spec.inter_site_distance_m = 500.0;
  return generate(spec);
}

const CouplingCoefficients& coeffs_for(int sites, int users) {
  static std::vector<std::pair<std::pair<int, int>, CouplingCoefficients>> cache;
  for (const auto& [key, c] : cache)
    if (key == std::make_pair(sites, users)) return c;
  cache.emplace_back(std::make_pair(sites, users), coefficients(network(sites, users)));
  return cache.back().second;
}

template <LoadVector (*F)(const CouplingCoefficients&, const LoadVector&)>
void load(benchmark::State& state) {
  const auto& c = coeffs_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const LoadVector rho = LoadVector::Constant(c.num_cells, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(F(c, rho));
  state.SetItemsProcessed(state.iterations() * c.total_rows());
}

template <Matrix (*F)(const CouplingCoefficients&, const LoadVector&)>
void jac(benchmark::State& state) {
  const auto& c = coeffs_for(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const LoadVector rho = LoadVector::Constant(c.num_cells, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(F(c, rho));
  state.SetItemsProcessed(state.iterations() * c.total_rows() * c.num_cells);
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({3, 30})->Args({7, 200})->Args({19, 500});
}

void sweep_parallel(benchmark::State& state) {
  const auto inst = network(3, 30);
  std::vector<double> scales;
  for (int k = 1; k <= 24; ++k) scales.push_back(0.125 * k);
  for (auto _ : state) benchmark::DoNotOptimize(demand_sweep(inst, scales));
}

void sweep_serial(benchmark::State& state) {
  const auto inst = network(3, 30);
  std::vector<double> scales;
  for (int k = 1; k <= 24; ++k) scales.push_back(0.125 * k);
  for (auto _ : state) benchmark::DoNotOptimize(demand_sweep_serial(inst, scales));
}

}  // namespace

BENCHMARK(load<reference::load_function>)->Name("load_function/reference")->Apply(sizes);
BENCHMARK(load<loadcouple::load_function>)->Name("load_function/openmp")->Apply(sizes);
BENCHMARK(jac<reference::jacobian>)->Name("jacobian/reference")->Apply(sizes);
BENCHMARK(jac<loadcouple::jacobian>)->Name("jacobian/openmp")->Apply(sizes);
BENCHMARK(sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(sweep_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
