#include "esr/polar_fourier.hpp"

#include <cmath>

#include "esr/quadrature.hpp"

namespace esr {

ModeField project_mode(const FieldSampler& field, int n, const GridPtr& grid, int n_theta) {
  if (n_theta < 4 * (std::abs(n) + 1)) throw ValidationError("project_mode: n_theta too small");
  const auto& r = grid->nodes();
  std::vector<cplx> vr(r.size()), vt(r.size());
  std::vector<cplx> phase(n_theta);
  for (int j = 0; j < n_theta; ++j) phase[j] = std::exp(-I1 * (double(n) * 2.0 * pi * j / n_theta));
  for (std::size_t k = 0; k < r.size(); ++k) {
    cplx a = 0.0, b = 0.0;
    for (int j = 0; j < n_theta; ++j) {
      const auto v = field(r[k], 2.0 * pi * j / n_theta);
      for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
          throw ValidationError("project_mode: non-finite field sample");
      a += v[0] * phase[j];
      b += v[1] * phase[j];
    }
    vr[k] = a / double(n_theta);
    vt[k] = b / double(n_theta);
  }
  return ModeField(n, RadialProfile(grid, std::move(vr)), RadialProfile(grid, std::move(vt)));
}

RadialProfile mode_div(const ModeField& m) {
  const auto& g = *m.vr.grid;
  const auto& r = g.nodes();
  auto d = g.derivative(m.vr.values);
  for (std::size_t k = 0; k < r.size(); ++k)
    d[k] += (m.vr.values[k] + I1 * double(m.n) * m.vtheta.values[k]) / r[k];
  return RadialProfile(m.vr.grid, std::move(d));
}

RadialProfile mode_rot(const ModeField& m) {
  const auto& g = *m.vr.grid;
  const auto& r = g.nodes();
  auto d = g.derivative(m.vtheta.values);
  for (std::size_t k = 0; k < r.size(); ++k)
    d[k] += (m.vtheta.values[k] - I1 * double(m.n) * m.vr.values[k]) / r[k];
  return RadialProfile(m.vr.grid, std::move(d));
}

namespace {

double energy_with(const ModeField& m, double coeff, double cross) {
  const auto& g = *m.vr.grid;
  const auto& r = g.nodes();
  const auto dr = g.derivative(m.vr.values);
  const auto dt = g.derivative(m.vtheta.values);
  std::vector<double> e(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    const cplx a = m.vr.values[k], b = m.vtheta.values[k];
    const double r2 = r[k] * r[k];
    e[k] = std::norm(dr[k]) + std::norm(dt[k]) + coeff / r2 * (std::norm(a) + std::norm(b)) -
           cross / r2 * std::imag(b * std::conj(a));
  }
  return g.integrate(e);
}

}  // namespace

double grad_energy(const ModeField& m) {
  const double n = m.n;
  return energy_with(m, 1.0 + n * n, 4.0 * n);
}

double grad_energy_lower(const ModeField& m) {
  const double a = std::abs(m.n) - 1.0;
  return energy_with(m, a * a, 0.0);
}

double weighted_energy(const ModeField& m) {
  const auto& g = *m.vr.grid;
  const auto& r = g.nodes();
  std::vector<double> e(r.size());
  for (std::size_t k = 0; k < r.size(); ++k)
    e[k] = (std::norm(m.vr.values[k]) + std::norm(m.vtheta.values[k])) / (r[k] * r[k]);
  return g.integrate(e);
}

double theta_of(double T) {
  if (!(T > std::exp(1.0))) throw ValidationError("theta_of: need T > e");
  double e1 = 0.0, e2 = 0.0;
  // (0, 1] with tau = 1/u (the tail past u = 45 is below 1e-20); [1, T] with tau = e^s
  const double head = integrate_gk([](double u) { return std::exp(-u) / u; }, 1.0, 45.0, 1e-15, &e1);
  const double body = integrate_gk([](double s) { return std::exp(-std::exp(-s)); }, 0.0, std::log(T),
                                   1e-15, &e2);
  if (e1 + e2 > 1e-12 * (head + body)) throw NumericalError("theta_of: quadrature not converged");
  return head + body;
}

ThetaCheck theta_bounds(double T) {
  ThetaCheck c;
  c.T = T;
  c.theta = theta_of(T);
  c.upper = std::log(T);
  c.lower = std::exp(-1.0 / std::exp(1.0)) * c.upper;
  c.holds = c.lower <= c.theta && c.theta <= c.upper;
  return c;
}

bool theta_bounds_check(double T) { return theta_bounds(T).holds; }

}  // namespace esr
