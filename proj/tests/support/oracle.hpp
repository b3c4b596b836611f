#pragma once

// Independent reference computations for tests. Everything here works from
// the raw instance data (powers, gains, noise, demand) in long double and
// never touches the coupling-coefficient path it is used to check.

#include <vector>

#include "loadcouple/netmodel.hpp"

namespace loadcouple::testing {

using LongVector = std::vector<long double>;

long double oracle_sinr(const NetworkInstance& inst, int cell, int pixel, const LongVector& rho);
LongVector oracle_load(const NetworkInstance& inst, const LongVector& rho);
LongVector to_long(const Vector& v);
Vector to_double(const LongVector& v);

/// ln2 * sum_j d_j P_k g_kj / (K B P_i g_ij)
Matrix oracle_asymptotic_slope(const NetworkInstance& inst);

/// Central difference of the oracle load in direction k.
Matrix finite_difference_jacobian(const NetworkInstance& inst, const Vector& rho, long double step);

/// Central second difference d^2 f_i / d rho_k d rho_h of the oracle load.
long double finite_difference_hessian(const NetworkInstance& inst, int cell, int k, int h, const Vector& rho,
                                      long double step);

/// Plain iteration rho <- f(rho) from zero, in long double.
LongVector long_fixed_point(const NetworkInstance& inst, long iterations);

/// Largest eigenvalue modulus by dense eigen-decomposition.
double eigen_spectral_radius(const Matrix& m);

}  // namespace loadcouple::testing
