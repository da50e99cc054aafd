#include "esr/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <boost/math/special_functions/legendre.hpp>

namespace esr {

const Rule& gauss_legendre(int n) {
  static std::mutex mtx;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto& slot = cache[n];
  if (!slot) {
    if (n < 1) throw ValidationError("gauss_legendre: need n >= 1");
    auto zeros = boost::math::legendre_p_zeros<double>(n);
    auto rule = std::make_unique<Rule>();
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
      if (*it != 0.0) rule->x.push_back(-*it);
    }
    for (double z : zeros) rule->x.push_back(z);
    for (double x : rule->x) {
      double p = boost::math::legendre_p_prime(n, x);
      rule->w.push_back(2.0 / ((1.0 - x * x) * p * p));
    }
    slot = std::move(rule);
  }
  return *slot;
}

void append_gauss(Rule& out, double a, double b, int n) {
  const Rule& g = gauss_legendre(n);
  double h = 0.5 * (b - a), c = 0.5 * (b + a);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    out.x.push_back(c + h * g.x[i]);
    out.w.push_back(h * g.w[i]);
  }
}

std::vector<double> chebyshev_lobatto(int n) {
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = -std::cos(pi * j / (n - 1));
  if (n % 2 == 1) x[n / 2] = 0.0;
  return x;
}

std::vector<double> barycentric_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 1.0);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = 0; k < x.size(); ++k)
      if (k != j) w[j] /= (x[j] - x[k]);
  return w;
}

void lagrange_basis(const std::vector<double>& x, const std::vector<double>& bw, double t,
                    double* out) {
  const std::size_t n = x.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (t == x[j]) {
      for (std::size_t k = 0; k < n; ++k) out[k] = (k == j) ? 1.0 : 0.0;
      return;
    }
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = bw[j] / (t - x[j]);
    denom += out[j];
  }
  for (std::size_t j = 0; j < n; ++j) out[j] /= denom;
}

}  // namespace esr
