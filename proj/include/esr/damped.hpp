#pragma once

#include <vector>

#include "esr/radial_grid.hpp"

namespace esr {

// A(r) = integral from r_min to r of exp(-k (r - s)) h(s) ds
std::vector<cplx> damped_forward(const RadialGrid& g, const std::vector<cplx>& h, cplx k);
// B(r) = integral from r to r_max of exp(-k (s - r)) h(s) ds
std::vector<cplx> damped_backward(const RadialGrid& g, const std::vector<cplx>& h, cplx k);

// Panels with |k| w at or below this use interpolation of the full integrand.
inline constexpr double kProductLimit = 3.5;

}  // namespace esr
