#pragma once

#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "esr/types.hpp"

namespace esr {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [-1, 1]; cached, thread-safe.
const Rule& gauss_legendre(int n);

// Appends an n-point Gauss-Legendre rule mapped to [a, b].
void append_gauss(Rule& out, double a, double b, int n);

// Chebyshev-Lobatto nodes on [-1, 1], ascending.
std::vector<double> chebyshev_lobatto(int n);

// Barycentric weights for arbitrary distinct nodes.
std::vector<double> barycentric_weights(const std::vector<double>& x);

// Values of all Lagrange basis polynomials at t.
void lagrange_basis(const std::vector<double>& x, const std::vector<double>& bw, double t,
                    double* out);

// Adaptive 31-point Gauss-Kronrod for real or complex integrands on a finite interval.
template <class F>
auto integrate_gk(F&& f, double a, double b, double tol, double* err = nullptr,
                  unsigned max_depth = 20) {
  using boost::math::quadrature::gauss_kronrod;
  double e = 0.0;
  auto v = gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, tol, &e);
  if (err) *err = e;
  return v;
}

}  // namespace esr
