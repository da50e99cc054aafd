#pragma once

#include <vector>

#include "esr/types.hpp"

namespace esr {

// Bessel order attached to the n-th Fourier mode: mu^2 = n^2 + i n beta.
struct Order {
  double beta = 0.0;
  int n = 1;
  cplx mu{1.0, 0.0};
  cplx zeta{0.0, 0.0};  // mu - 1, computed without cancellation
};

// beta = 0 gives the integer-order Stokes limit; otherwise 1e-3 <= beta < 1.
Order order_of(double beta, int n);

cplx gamma_c(cplx z);
// 1/Gamma(z); entire, no pole check.
cplx rgamma_c(cplx z);

enum class BesselMethod { series, integral, asymptotic };
const char* to_string(BesselMethod m);

struct BesselValue {
  cplx value;
  BesselMethod method = BesselMethod::series;
  double est_abs_error = 0.0;
  // true when value carries the factor exp(-Re z) (I) or exp(+Re z) (K)
  bool scaled = false;
};

// Regime radii.
inline constexpr double kSeriesRadiusI = 12.0;
inline constexpr double kSeriesRadiusK = 2.0;
inline constexpr double kAsymptoticRadius = 20.0;

// Evaluator for one fixed order nu = base + frac. Splitting off the integer part keeps
// sin(nu*pi) and the shifted Gamma values accurate when frac is small.
// Scaled outputs: i_scaled = I_nu(z) e^{-z}, k_scaled = K_nu(z) e^{z}.
class BesselOrder {
 public:
  BesselOrder(int base, cplx frac);
  explicit BesselOrder(cplx nu);

  cplx nu() const { return nu_; }
  int base() const { return base_; }
  cplx frac() const { return frac_; }

  cplx i_scaled(cplx z, BesselMethod* how = nullptr, double* err = nullptr) const;
  cplx k_scaled(cplx z, BesselMethod* how = nullptr, double* err = nullptr) const;

  // Individual regimes, for cross-checks across the switch radii.
  cplx i_series(cplx z, double* err = nullptr) const;
  cplx i_integral(cplx z, double* err = nullptr) const;
  cplx i_asymptotic(cplx z, double* err = nullptr) const;
  cplx k_series(cplx z, double* err = nullptr) const;
  cplx k_integral(cplx z, double* err = nullptr) const;
  cplx k_asymptotic(cplx z, double* err = nullptr) const;

 private:
  cplx rg_shift(int m, cplx f, cplx rg1f) const;
  cplx series_unscaled(int base, cplx frac, cplx rg1f, cplx z, double* err) const;
  cplx k_series_integer(cplx z, double* err) const;

  int base_;
  cplx frac_;
  cplx nu_;
  cplx rg1f_;    // 1/Gamma(1+frac)
  cplx rg1mf_;   // 1/Gamma(1-frac)
  // K works with the order of nonnegative real part (K_{-nu} = K_nu).
  cplx knu_;
  cplx k_pref_;
  cplx k_head_[3];
  std::vector<double> k_v2_;
  std::vector<cplx> k_w_;
  bool poisson_ok_;
  cplx p_pref_;
  cplx p_head_[3];
  std::vector<double> p_cm1_;
  std::vector<cplx> p_w_;
};

BesselValue bessel_i(cplx mu, cplx z);
BesselValue bessel_k(cplx mu, cplx z);

// |z (I K' - I' K) + 1| with recurrence derivatives.
double wronskian_residual(cplx mu, cplx z);

}  // namespace esr
