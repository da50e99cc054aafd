#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace esr {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double euler_gamma = std::numbers::egamma;
inline constexpr cplx I1{0.0, 1.0};

// Precondition violations (bad parameters, out-of-domain input).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failures: quadrature not converged, tails too heavy, near-zero kernels.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace esr
