#include "loadcouple/coupling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace loadcouple {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Below this many (pixel, cell) products per evaluation the thread start-up
// costs more than the kernel.
constexpr Eigen::Index kParallelWork = 1 << 14;

bool worth_parallel(const CouplingCoefficients& coeffs) {
  return coeffs.total_rows() * coeffs.num_cells >= kParallelWork;
}

void check_size(const CouplingCoefficients& coeffs, const LoadVector& rho) {
  if (rho.size() != coeffs.num_cells) {
    throw std::invalid_argument("load vector has " + std::to_string(rho.size()) + " entries, expected " +
                                std::to_string(coeffs.num_cells));
  }
}

// u_j = sum_k b_ikj rho_k + c_ij for every row of the cell.
Vector interference_plus_noise(const CellTerms& t, const LoadVector& rho) {
  return t.interference * rho + t.noise;
}

double cell_load(const CellTerms& t, const LoadVector& rho) {
  if (t.pixels.empty()) return 0.0;
  const Vector u = interference_plus_noise(t, rho);
  double sum = 0.0;
  for (Eigen::Index r = 0; r < u.size(); ++r) sum += 1.0 / (t.demand_ratio(r) * std::log1p(1.0 / u(r)));
  return kLn2 * sum;
}

// d f_i / d u_j = ln2 / (a_j ln^2(1 + 1/u_j) (u_j^2 + u_j))
Vector load_sensitivity(const CellTerms& t, const LoadVector& rho) {
  const Vector u = interference_plus_noise(t, rho);
  const Eigen::ArrayXd log_term = u.cwiseInverse().array().log1p();
  const Eigen::ArrayXd w = u.array() * (u.array() + 1.0);
  return (kLn2 / (t.demand_ratio.array() * log_term.square() * w)).matrix();
}

}  // namespace

Eigen::Index CouplingCoefficients::total_rows() const {
  Eigen::Index rows = 0;
  for (const auto& t : cells) rows += static_cast<Eigen::Index>(t.pixels.size());
  return rows;
}

bool LinearizedSystem::fully_coupled() const {
  for (Eigen::Index i = 0; i < slope.rows(); ++i) {
    for (Eigen::Index k = 0; k < slope.cols(); ++k) {
      if (i != k && !(slope(i, k) > 0.0)) return false;
    }
  }
  return true;
}

CouplingCoefficients coefficients(const NetworkInstance& inst) {
  const int n = inst.num_cells();
  CouplingCoefficients out;
  out.num_cells = n;
  out.cells.resize(static_cast<std::size_t>(n));
  out.slot.assign(inst.pixels.size(), {-1, -1});
  const double kb = static_cast<double>(inst.num_resource_units) * inst.rate_scale;

  for (int i = 0; i < n; ++i) {
    CellTerms& t = out.cells[static_cast<std::size_t>(i)];
    for (int j : inst.serving.areas[static_cast<std::size_t>(i)]) {
      if (inst.pixels[static_cast<std::size_t>(j)].demand_bits > 0.0) t.pixels.push_back(j);
    }
    const auto rows = static_cast<Eigen::Index>(t.pixels.size());
    t.demand_ratio.resize(rows);
    t.noise.resize(rows);
    t.interference.setZero(rows, n);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const int j = t.pixels[static_cast<std::size_t>(r)];
      const double own = inst.cells[static_cast<std::size_t>(i)].power_per_ru_w * inst.gains(i, j);
      t.demand_ratio(r) = kb / inst.pixels[static_cast<std::size_t>(j)].demand_bits;
      t.noise(r) = inst.noise_power_w / own;
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        t.interference(r, k) = inst.cells[static_cast<std::size_t>(k)].power_per_ru_w * inst.gains(k, j) / own;
      }
      out.slot[static_cast<std::size_t>(j)] = {i, static_cast<int>(r)};
    }
  }
  return out;
}

CouplingCoefficients scale_demand(const CouplingCoefficients& coeffs, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("demand scale must be positive");
  CouplingCoefficients out = coeffs;
  for (auto& t : out.cells) t.demand_ratio /= scale;
  return out;
}

double sinr(const CouplingCoefficients& coeffs, int cell, int pixel, const LoadVector& rho) {
  check_size(coeffs, rho);
  if (pixel < 0 || pixel >= static_cast<int>(coeffs.slot.size()) ||
      coeffs.slot[static_cast<std::size_t>(pixel)].first != cell) {
    throw std::invalid_argument("pixel " + std::to_string(pixel + 1) + " is not a demanded pixel of cell " +
                                std::to_string(cell + 1));
  }
  const auto& t = coeffs.cells[static_cast<std::size_t>(cell)];
  const int r = coeffs.slot[static_cast<std::size_t>(pixel)].second;
  return 1.0 / (t.interference.row(r).dot(rho) + t.noise(r));
}

LoadVector load_function(const CouplingCoefficients& coeffs, const LoadVector& rho) {
  check_size(coeffs, rho);
  const int n = coeffs.num_cells;
  LoadVector out(n);
  if (!worth_parallel(coeffs)) {
    for (int i = 0; i < n; ++i) out(i) = cell_load(coeffs.cells[static_cast<std::size_t>(i)], rho);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    out(i) = cell_load(coeffs.cells[static_cast<std::size_t>(i)], rho);
  }
  return out;
}

Matrix jacobian(const CouplingCoefficients& coeffs, const LoadVector& rho) {
  check_size(coeffs, rho);
  const int n = coeffs.num_cells;
  Matrix out = Matrix::Zero(n, n);
  auto fill_row = [&](int i) {
    const auto& t = coeffs.cells[static_cast<std::size_t>(i)];
    if (!t.pixels.empty()) out.row(i) = (t.interference.transpose() * load_sensitivity(t, rho)).transpose();
  };
  if (!worth_parallel(coeffs)) {
    for (int i = 0; i < n; ++i) fill_row(i);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) fill_row(i);
  return out;
}

double hessian_entry(const CouplingCoefficients& coeffs, int cell, int k, int h, const LoadVector& rho) {
  check_size(coeffs, rho);
  if (k == cell || h == cell) throw std::invalid_argument("hessian_entry requires k, h != cell");
  const auto& t = coeffs.cells[static_cast<std::size_t>(cell)];
  double sum = 0.0;
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(t.pixels.size()); ++r) {
    const double u = t.interference.row(r).dot(rho) + t.noise(r);
    const double L = std::log1p(1.0 / u);
    const double q = 2.0 - (2.0 * u + 1.0) * L;
    const double denom = L * L * (u * u + u);
    sum += t.interference(r, k) * t.interference(r, h) / t.demand_ratio(r) * L * q / (denom * denom);
  }
  return kLn2 * sum;
}

Matrix cell_hessian(const CouplingCoefficients& coeffs, int cell, const LoadVector& rho) {
  const int n = coeffs.num_cells;
  Matrix out(n - 1, n - 1);
  for (int a = 0, k = 0; k < n; ++k) {
    if (k == cell) continue;
    for (int b = 0, h = 0; h < n; ++h) {
      if (h == cell) continue;
      out(a, b) = (b < a) ? out(b, a) : hessian_entry(coeffs, cell, k, h, rho);
      ++b;
    }
    ++a;
  }
  return out;
}

LinearizedSystem asymptotic_linearization(const CouplingCoefficients& coeffs) {
  const int n = coeffs.num_cells;
  LinearizedSystem sys;
  sys.kind = LinearizationKind::asymptotic;
  sys.anchor = LoadVector::Zero(n);
  sys.slope = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& t = coeffs.cells[static_cast<std::size_t>(i)];
    if (t.pixels.empty()) continue;
    sys.slope.row(i) = kLn2 * (t.interference.transpose() * t.demand_ratio.cwiseInverse()).transpose();
  }
  sys.offset = load_function(coeffs, sys.anchor);
  return sys;
}

LinearizedSystem tangent_linearization(const CouplingCoefficients& coeffs, const LoadVector& anchor) {
  if ((anchor.array() < 0.0).any()) throw std::invalid_argument("tangent anchor must be nonnegative");
  LinearizedSystem sys;
  sys.kind = LinearizationKind::tangent;
  sys.anchor = anchor;
  sys.slope = jacobian(coeffs, anchor);
  sys.offset = load_function(coeffs, anchor);
  return sys;
}

LoadVector evaluate(const LinearizedSystem& system, const LoadVector& rho) {
  if (rho.size() != system.slope.cols()) throw std::invalid_argument("load vector size mismatch");
  return system.slope * (rho - system.anchor) + system.offset;
}

}  // namespace loadcouple
