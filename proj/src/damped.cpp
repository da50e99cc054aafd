#include "esr/damped.hpp"

#include <algorithm>
#include <cmath>

#include "esr/quadrature.hpp"

namespace esr {

namespace {

bool panel_is_zero(const RadialGrid& g, const std::vector<cplx>& h, int p) {
  for (int j = 0; j < g.q(); ++j)
    if (h[g.index(p, j)] != 0.0) return false;
  return true;
}

// Weights W[a][j] = integral over u in [0, L_a] of exp(-k u) l_j(x_a -/+ u) du,
// with L_a the distance to the panel edge on the chosen side.
void exact_weights(const RadialGrid& g, int p, cplx k, bool forward, std::vector<cplx>& W) {
  const int q = g.q();
  const double a = g.panel_lo(p), b = g.panel_hi(p), half = 0.5 * (b - a);
  const auto& xr = g.ref_nodes();
  const auto& bw = g.ref_bary();
  const double umax = 40.0 / k.real();
  const double du = 2.0 / std::abs(k);
  const Rule& gl = gauss_legendre(10);
  std::vector<double> ell(q);
  W.assign(std::size_t(q) * q, 0.0);
  for (int i = 0; i < q; ++i) {
    const double xa = a + half * (xr[i] + 1.0);
    const double L = std::min(forward ? xa - a : b - xa, umax);
    if (L <= 0.0) continue;
    const int nsub = std::max(1, int(std::ceil(L / du)));
    const double h = L / nsub;
    for (int s = 0; s < nsub; ++s) {
      for (std::size_t m = 0; m < gl.x.size(); ++m) {
        const double u = h * (s + 0.5 * (gl.x[m] + 1.0));
        const double x = forward ? xa - u : xa + u;
        const double t = std::clamp((x - a) / half - 1.0, -1.0, 1.0);
        lagrange_basis(xr, bw, t, ell.data());
        const cplx e = 0.5 * h * gl.w[m] * std::exp(-k * u);
        for (int j = 0; j < q; ++j) W[i * q + j] += e * ell[j];
      }
    }
  }
}

}  // namespace

std::vector<cplx> damped_forward(const RadialGrid& g, const std::vector<cplx>& h, cplx k) {
  const int q = g.q();
  const auto& r = g.nodes();
  std::vector<cplx> out(g.size(), 0.0);
  std::vector<cplx> W;
  cplx carry = 0.0;
  for (int p = 0; p < g.panels(); ++p) {
    const double a = g.panel_lo(p), w = g.panel_hi(p) - a;
    const std::size_t i0 = g.index(p, 0);
    if (panel_is_zero(g, h, p)) {
      for (int i = 1; i < q; ++i) out[g.index(p, i)] = carry * std::exp(-k * (r[g.index(p, i)] - a));
    } else if (std::abs(k) * w <= kProductLimit) {
      for (int i = 1; i < q; ++i) {
        const double xi = r[g.index(p, i)];
        cplx acc = 0.0;
        for (int j = 0; j < q; ++j) {
          const std::size_t kj = g.index(p, j);
          acc += g.ref_cumulative(i, j) * std::exp(-k * (xi - r[kj])) * h[kj];
        }
        out[g.index(p, i)] = carry * std::exp(-k * (xi - a)) + 0.5 * w * acc;
      }
    } else {
      exact_weights(g, p, k, true, W);
      for (int i = 1; i < q; ++i) {
        const double xi = r[g.index(p, i)];
        cplx acc = 0.0;
        for (int j = 0; j < q; ++j) acc += W[i * q + j] * h[g.index(p, j)];
        out[g.index(p, i)] = carry * std::exp(-k * (xi - a)) + acc;
      }
    }
    out[i0] = (p == 0) ? cplx(0.0) : out[i0];
    carry = out[g.index(p, q - 1)];
  }
  return out;
}

std::vector<cplx> damped_backward(const RadialGrid& g, const std::vector<cplx>& h, cplx k) {
  const int q = g.q();
  const auto& r = g.nodes();
  std::vector<cplx> out(g.size(), 0.0);
  std::vector<cplx> W;
  cplx carry = 0.0;
  for (int p = g.panels() - 1; p >= 0; --p) {
    const double b = g.panel_hi(p), w = b - g.panel_lo(p);
    if (panel_is_zero(g, h, p)) {
      for (int i = 0; i < q - 1; ++i) out[g.index(p, i)] = carry * std::exp(-k * (b - r[g.index(p, i)]));
    } else if (std::abs(k) * w <= kProductLimit) {
      for (int i = 0; i < q - 1; ++i) {
        const double xi = r[g.index(p, i)];
        cplx acc = 0.0;
        for (int j = 0; j < q; ++j) {
          const std::size_t kj = g.index(p, j);
          acc += (g.ref_cumulative(q - 1, j) - g.ref_cumulative(i, j)) * std::exp(-k * (r[kj] - xi)) * h[kj];
        }
        out[g.index(p, i)] = carry * std::exp(-k * (b - xi)) + 0.5 * w * acc;
      }
    } else {
      exact_weights(g, p, k, false, W);
      for (int i = 0; i < q - 1; ++i) {
        const double xi = r[g.index(p, i)];
        cplx acc = 0.0;
        for (int j = 0; j < q; ++j) acc += W[i * q + j] * h[g.index(p, j)];
        out[g.index(p, i)] = carry * std::exp(-k * (b - xi)) + acc;
      }
    }
    carry = out[g.index(p, 0)];
  }
  return out;
}

}  // namespace esr
