#pragma once

#include <cmath>
#include <complex>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

// Independent reference implementations used only by the tests.
namespace oracle {

using cplx = std::complex<double>;

// Stirling series for log Gamma after shifting the argument far to the right.
inline cplx gamma(cplx z) {
  cplx prod = 1.0;
  while (std::real(z) < 25.0 || std::abs(z) < 25.0) {
    prod *= z;
    z += 1.0;
    if (std::real(z) > 60.0) break;
  }
  const double c[] = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188, -691.0 / 360360,
                      1.0 / 156};
  cplx s = 0.0, zp = z, z2 = z * z;
  for (double ci : c) {
    s += ci / zp;
    zp *= z2;
  }
  const cplx lg = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * M_PI) + s;
  return std::exp(lg) / prod;
}

// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt, Re z > 0
inline cplx bessel_k(cplx nu, cplx z) {
  auto f = [&](double t) {
    if (t > 50.0) return cplx(0.0);
    return std::exp(-z * std::cosh(t)) * std::cosh(nu * t);
  };
  using boost::math::quadrature::gauss_kronrod;
  const double tmax = std::acosh(std::max(1.0, 60.0 / std::real(z) + 1.0)) + 2.0;
  cplx s = 0.0;
  const int npan = 12;
  for (int p = 0; p < npan; ++p)
    s += gauss_kronrod<double, 61>::integrate(f, tmax * p / npan, tmax * (p + 1) / npan, 8, 1e-15);
  return s;
}

// I_nu(z) = (1/pi) int_0^pi exp(z cos t) cos(nu t) dt - sin(nu pi)/pi int_0^inf exp(-z cosh t - nu t) dt
inline cplx bessel_i(cplx nu, cplx z) {
  using boost::math::quadrature::gauss_kronrod;
  auto f1 = [&](double t) { return std::exp(z * std::cos(t)) * std::cos(nu * t); };
  cplx a = 0.0;
  const int npan = 8;
  for (int p = 0; p < npan; ++p)
    a += gauss_kronrod<double, 61>::integrate(f1, M_PI * p / npan, M_PI * (p + 1) / npan, 8, 1e-15);
  auto f2 = [&](double t) {
    if (t > 50.0) return cplx(0.0);
    return std::exp(-z * std::cosh(t) - nu * t);
  };
  const double tmax = std::acosh(std::max(1.0, 60.0 / std::real(z) + 1.0)) + 2.0;
  cplx b = 0.0;
  for (int p = 0; p < 12; ++p)
    b += gauss_kronrod<double, 61>::integrate(f2, tmax * p / 12, tmax * (p + 1) / 12, 8, 1e-15);
  return a / M_PI - std::sin(nu * M_PI) / M_PI * b;
}

// F = (1/k) [ M_PI / (2 cos(mu M_PI / 2)) - finite part of int_0^k K_mu ], termwise from the series.
inline std::complex<double> kernel_series(std::complex<double> mu, std::complex<double> k) {
  auto fp_int_i = [&](std::complex<double> nu) {
    std::complex<double> s = 0.0;
    double fact = 1.0;
    for (int j = 0; j < 60; ++j) {
      if (j > 0) fact *= double(j);
      const std::complex<double> e = 2.0 * j + nu + 1.0;
      s += 2.0 * std::pow(k / 2.0, e) / (e * fact * gamma(double(j) + nu + 1.0));
    }
    return s;
  };
  const std::complex<double> fp = (M_PI / 2.0) * (fp_int_i(-mu) - fp_int_i(mu)) / std::sin(mu * M_PI);
  return (M_PI / (2.0 * std::cos(mu * M_PI / 2.0)) - fp) / k;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
