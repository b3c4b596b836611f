#pragma once

#include <utility>
#include <vector>

#include "loadcouple/netmodel.hpp"
#include "loadcouple/types.hpp"

namespace loadcouple {

/// Coupling terms of one cell, one row per demanded pixel it serves.
///
/// With u_j = sum_k b_ikj rho_k + c_ij the cell load is
///   f_i(rho) = sum_j 1 / (a_j log2(1 + 1/u_j)).
/// `interference` holds b_ikj with column i identically zero, so u = B rho + c
/// ignores the cell's own load.
struct CellTerms {
  std::vector<int> pixels;  // pixel indices, ascending
  Vector demand_ratio;      // a_j = K B / d_j
  Vector noise;             // c_ij = sigma^2 / (P_i g_ij)
  Matrix interference;      // b_ikj = P_k g_kj / (P_i g_ij), rows = pixels, cols = cells
};

struct CouplingCoefficients {
  int num_cells = 0;
  std::vector<CellTerms> cells;
  // pixel -> (cell, row in that cell's terms); (-1, -1) for zero-demand pixels
  std::vector<std::pair<int, int>> slot;

  Eigen::Index total_rows() const;
};

enum class LinearizationKind { asymptotic, tangent };

/// rho = slope (rho - anchor) + offset, with offset = f(anchor).
struct LinearizedSystem {
  Matrix slope;
  LoadVector anchor;
  Vector offset;
  LinearizationKind kind = LinearizationKind::asymptotic;

  int size() const { return static_cast<int>(slope.rows()); }
  /// True when every off-diagonal slope entry is strictly positive.
  bool fully_coupled() const;
};

/// Zero-demand pixels are dropped here; they contribute nothing to any load.
CouplingCoefficients coefficients(const NetworkInstance& instance);

/// Coefficients of the same network with every demand multiplied by
/// `scale` (a_j becomes a_j / scale).
CouplingCoefficients scale_demand(const CouplingCoefficients& coeffs, double scale);

/// SINR of `pixel` served by `cell`. Throws std::invalid_argument if the
/// pixel is not a demanded pixel of that cell.
double sinr(const CouplingCoefficients& coeffs, int cell, int pixel, const LoadVector& rho);

LoadVector load_function(const CouplingCoefficients& coeffs, const LoadVector& rho);

/// d f_i / d rho_k; the diagonal is zero.
Matrix jacobian(const CouplingCoefficients& coeffs, const LoadVector& rho);

/// d^2 f_i / (d rho_k d rho_h) for k, h != i. Strictly negative when cell i
/// serves a demanded pixel.
double hessian_entry(const CouplingCoefficients& coeffs, int cell, int k, int h, const LoadVector& rho);

/// The (n-1) x (n-1) Hessian of f_i over the other cells' loads, in
/// ascending cell order with `cell` removed.
Matrix cell_hessian(const CouplingCoefficients& coeffs, int cell, const LoadVector& rho);

/// Slopes are the large-load limits ln(2) sum_j b_ikj / a_j, anchored at 0.
LinearizedSystem asymptotic_linearization(const CouplingCoefficients& coeffs);

/// First-order expansion of f at `anchor`; lies above f on the orthant.
LinearizedSystem tangent_linearization(const CouplingCoefficients& coeffs, const LoadVector& anchor);

LoadVector evaluate(const LinearizedSystem& system, const LoadVector& rho);

}  // namespace loadcouple
