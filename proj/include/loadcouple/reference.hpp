#pragma once

#include "loadcouple/coupling.hpp"

// Serial scalar-loop versions of the coupling kernels. They follow the
// formulas term by term and serve as the baseline the parallel kernels are
// tested and benchmarked against.
namespace loadcouple::reference {

LoadVector load_function(const CouplingCoefficients& coeffs, const LoadVector& rho);
Matrix jacobian(const CouplingCoefficients& coeffs, const LoadVector& rho);

}  // namespace loadcouple::reference
