#include "loadcouple/reference.hpp"

#include <cmath>
#include <numbers>

namespace loadcouple::reference {

LoadVector load_function(const CouplingCoefficients& coeffs, const LoadVector& rho) {
  const int n = coeffs.num_cells;
  LoadVector out = LoadVector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const auto& t = coeffs.cells[static_cast<std::size_t>(i)];
    for (std::size_t r = 0; r < t.pixels.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      double u = t.noise(row);
      for (int k = 0; k < n; ++k) u += t.interference(row, k) * rho(k);
      out(i) += 1.0 / (t.demand_ratio(row) * std::log2(1.0 + 1.0 / u));
    }
  }
  return out;
}

Matrix jacobian(const CouplingCoefficients& coeffs, const LoadVector& rho) {
  const int n = coeffs.num_cells;
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& t = coeffs.cells[static_cast<std::size_t>(i)];
    for (std::size_t r = 0; r < t.pixels.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      double u = t.noise(row);
      for (int k = 0; k < n; ++k) u += t.interference(row, k) * rho(k);
      const double L = std::log(1.0 + 1.0 / u);
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        out(i, k) += std::numbers::ln2 * t.interference(row, k) / t.demand_ratio(row) /
                     (L * L * u * u * (1.0 + 1.0 / u));
      }
    }
  }
  return out;
}

}  // namespace loadcouple::reference
