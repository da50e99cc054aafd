#include "esr/biot_savart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "esr/polar_fourier.hpp"

namespace esr {

namespace {

StreamFunction assemble(const GridPtr& g, int m, const std::vector<cplx>& P, const std::vector<cplx>& Q,
                        double tail) {
  const auto& r = g->nodes();
  const cplx d = Q[0];
  std::vector<cplx> psi(r.size()), dpsi(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double rm = std::pow(r[k], -m), rp = std::pow(r[k], m);
    psi[k] = (rm * (P[k] - d) + rp * Q[k]) / (2.0 * m);
    dpsi[k] = 0.5 * (rm / r[k] * (d - P[k]) + rp / r[k] * Q[k]);
  }
  psi[0] = 0.0;
  return {RadialProfile(g, std::move(psi)), RadialProfile(g, std::move(dpsi)), d, tail};
}

}  // namespace

StreamFunction stream_full(const VorticityMode& w) {
  const int m = std::abs(w.n);
  if (m < 1) throw ValidationError("stream: mode n = 0 is not supported");
  w.omega.check_finite("stream");
  const auto& g = w.omega.grid;
  const auto& r = g->nodes();
  std::vector<cplx> inner(r.size()), outer(r.size());
  double peak = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    inner[k] = std::pow(r[k], 1 + m) * w.omega.values[k];
    outer[k] = std::pow(r[k], 1 - m) * w.omega.values[k];
    peak = std::max(peak, std::abs(w.omega.values[k]) * r[k]);
  }
  // decay over the last panel
  double edge = 0.0;
  for (int j = 0; j < g->q(); ++j) {
    const std::size_t k = g->index(g->panels() - 1, j);
    edge = std::max(edge, std::abs(w.omega.values[k]) * r[k]);
  }
  if (m == 1 && edge > kTailDecay * peak) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "stream: vorticity has not decayed before r_max (edge/peak %.1e at r = %.4g)", edge / peak,
                  r.back());
    throw NumericalError(buf);
  }
  const double R = g->r_max();
  const double tail = std::abs(outer.back()) * R;
  return assemble(g, m, g->cumulative(inner), g->cumulative_from_right(outer), tail);
}

StreamFunction stream_full(const ModeField& u) {
  const int m = std::abs(u.n);
  if (m < 1) throw ValidationError("stream: mode n = 0 is not supported");
  const auto& g = u.vr.grid;
  const auto& r = g->nodes();
  const auto omega = mode_rot(u);
  std::vector<cplx> inner(r.size()), flux(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    inner[k] = std::pow(r[k], 1 + m) * omega.values[k];
    flux[k] = std::pow(r[k], -m) * (double(m) * u.vtheta.values[k] - I1 * double(u.n) * u.vr.values[k]);
  }
  auto Q = g->cumulative_from_right(flux);
  for (std::size_t k = 0; k < r.size(); ++k) Q[k] -= std::pow(r[k], 1 - m) * u.vtheta.values[k];
  const double R = g->r_max();
  const double tail = std::abs(flux.back()) * R + std::pow(R, 1 - m) * std::abs(u.vtheta.values.back());
  return assemble(g, m, g->cumulative(inner), Q, tail);
}

RadialProfile stream(const VorticityMode& w) { return stream_full(w).psi; }

ModeField velocity(const StreamFunction& s, int n) {
  const auto& g = s.psi.grid;
  const auto& r = g->nodes();
  std::vector<cplx> vr(r.size()), vt(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    vr[k] = I1 * double(n) / r[k] * s.psi.values[k];
    vt[k] = -s.dpsi.values[k];
  }
  return ModeField(n, RadialProfile(g, std::move(vr)), RadialProfile(g, std::move(vt)));
}

ModeField velocity(const VorticityMode& w) { return velocity(stream_full(w), w.n); }

}  // namespace esr
