#include "esr/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "esr/quadrature.hpp"

namespace esr {

RadialGrid::RadialGrid(std::vector<double> breaks, int q) : breaks_(std::move(breaks)), q_(q) {
  if (q_ < 3) throw ValidationError("RadialGrid: need at least 3 nodes per panel");
  if (breaks_.size() < 2) throw ValidationError("RadialGrid: need at least one panel");
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    if (!(breaks_[i] > breaks_[i - 1])) throw ValidationError("RadialGrid: breaks must increase");

  x_ = chebyshev_lobatto(q_);
  bw_ = barycentric_weights(x_);
  d_.assign(std::size_t(q_) * q_, 0.0);
  for (int i = 0; i < q_; ++i) {
    double diag = 0.0;
    for (int j = 0; j < q_; ++j) {
      if (i == j) continue;
      double v = (bw_[j] / bw_[i]) / (x_[i] - x_[j]);
      d_[i * q_ + j] = v;
      diag -= v;
    }
    d_[i * q_ + i] = diag;
  }
  // exact for the degree q-1 Lagrange polynomials
  const Rule& g = gauss_legendre(q_);
  s_.assign(std::size_t(q_) * q_, 0.0);
  std::vector<double> ell(q_);
  for (int i = 0; i < q_; ++i) {
    const double half = 0.5 * (x_[i] + 1.0);
    if (half == 0.0) continue;
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      const double t = -1.0 + half * (g.x[k] + 1.0);
      lagrange_basis(x_, bw_, t, ell.data());
      for (int j = 0; j < q_; ++j) s_[i * q_ + j] += half * g.w[k] * ell[j];
    }
  }

  const int np = panels();
  r_.assign(std::size_t(np) * (q_ - 1) + 1, 0.0);
  w_dr_.assign(r_.size(), 0.0);
  for (int p = 0; p < np; ++p) {
    const double a = breaks_[p], b = breaks_[p + 1], h = 0.5 * (b - a);
    for (int j = 0; j < q_; ++j) {
      const std::size_t k = index(p, j);
      r_[k] = (j == 0) ? a : (j == q_ - 1 ? b : a + h * (x_[j] + 1.0));
      w_dr_[k] += h * s_[(q_ - 1) * q_ + j];
    }
  }
  w_rdr_.resize(r_.size());
  for (std::size_t k = 0; k < r_.size(); ++k) w_rdr_[k] = w_dr_[k] * r_[k];
}

std::shared_ptr<const RadialGrid> RadialGrid::build(const GridOptions& opt) {
  if (!(opt.r_max > 1.0)) throw ValidationError("RadialGrid: r_max must exceed 1");
  if (opt.panels_per_decade < 1) throw ValidationError("RadialGrid: panels_per_decade < 1");
  const double ratio = std::pow(10.0, 1.0 / opt.panels_per_decade);
  std::vector<double> forced;
  for (double b : opt.breakpoints)
    if (b > 1.0 && b < opt.r_max) forced.push_back(b);
  std::sort(forced.begin(), forced.end());

  std::vector<double> br{1.0};
  double r = 1.0;
  while (r < opt.r_max) {
    double w = r * (ratio - 1.0);
    for (const auto& c : opt.caps) {
      if (c.r_lo < r + w && c.r_hi > r && c.w_max > 0.0) w = std::min(w, c.w_max);
    }
    double next = r + w;
    bool pinned = false;
    auto it = std::upper_bound(forced.begin(), forced.end(), r * (1.0 + 1e-12));
    if (it != forced.end() && *it <= next * (1.0 + 1e-12)) {
      next = *it;
      pinned = true;
    }
    if (next >= opt.r_max || (!pinned && opt.r_max - next < 0.25 * w)) next = opt.r_max;
    br.push_back(next);
    r = next;
  }
  return std::make_shared<const RadialGrid>(std::move(br), opt.nodes_per_panel);
}

namespace {

template <class T>
std::vector<T> derivative_impl(const RadialGrid& g, const std::vector<T>& f) {
  const int q = g.q();
  std::vector<T> out(g.size(), T(0));
  std::vector<int> hits(g.size(), 0);
  for (int p = 0; p < g.panels(); ++p) {
    const double scale = 2.0 / (g.panel_hi(p) - g.panel_lo(p));
    for (int i = 0; i < q; ++i) {
      T acc(0);
      for (int j = 0; j < q; ++j) acc += g.ref_diff(i, j) * f[g.index(p, j)];
      out[g.index(p, i)] += scale * acc;
      hits[g.index(p, i)] += 1;
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] /= double(hits[k]);
  return out;
}

}  // namespace

std::vector<cplx> RadialGrid::derivative(const std::vector<cplx>& f) const {
  return derivative_impl(*this, f);
}
std::vector<double> RadialGrid::derivative(const std::vector<double>& f) const {
  return derivative_impl(*this, f);
}

std::vector<cplx> RadialGrid::cumulative(const std::vector<cplx>& f) const {
  std::vector<cplx> out(size(), 0.0);
  cplx base = 0.0;
  for (int p = 0; p < panels(); ++p) {
    const double h = 0.5 * (panel_hi(p) - panel_lo(p));
    for (int i = 1; i < q_; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < q_; ++j) acc += s_[i * q_ + j] * f[index(p, j)];
      out[index(p, i)] = base + h * acc;
    }
    base = out[index(p, q_ - 1)];
  }
  return out;
}

std::vector<cplx> RadialGrid::cumulative_from_right(const std::vector<cplx>& f) const {
  std::vector<cplx> out(size(), 0.0);
  cplx base = 0.0;
  for (int p = panels() - 1; p >= 0; --p) {
    const double h = 0.5 * (panel_hi(p) - panel_lo(p));
    for (int i = 0; i < q_ - 1; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < q_; ++j) acc += (s_[(q_ - 1) * q_ + j] - s_[i * q_ + j]) * f[index(p, j)];
      out[index(p, i)] = base + h * acc;
    }
    base = out[index(p, 0)];
  }
  return out;
}

cplx RadialGrid::integrate(const std::vector<cplx>& f) const {
  cplx s = 0.0;
  for (std::size_t k = 0; k < size(); ++k) s += w_rdr_[k] * f[k];
  return s;
}
cplx RadialGrid::integrate_dr(const std::vector<cplx>& f) const {
  cplx s = 0.0;
  for (std::size_t k = 0; k < size(); ++k) s += w_dr_[k] * f[k];
  return s;
}
double RadialGrid::integrate(const std::vector<double>& f) const {
  double s = 0.0;
  for (std::size_t k = 0; k < size(); ++k) s += w_rdr_[k] * f[k];
  return s;
}

int RadialGrid::panel_of(double r) const {
  if (r <= breaks_.front()) return 0;
  if (r >= breaks_.back()) return panels() - 1;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
  return int(it - breaks_.begin()) - 1;
}

cplx RadialGrid::interpolate(const std::vector<cplx>& f, double r) const {
  if (r < breaks_.front() - 1e-12 || r > breaks_.back() + 1e-12)
    throw ValidationError("RadialGrid::interpolate: r outside the grid");
  const int p = panel_of(r);
  const double a = panel_lo(p), b = panel_hi(p);
  const double t = std::clamp(2.0 * (r - a) / (b - a) - 1.0, -1.0, 1.0);
  std::vector<double> ell(q_);
  lagrange_basis(x_, bw_, t, ell.data());
  cplx s = 0.0;
  for (int j = 0; j < q_; ++j) s += ell[j] * f[index(p, j)];
  return s;
}

RadialProfile::RadialProfile(GridPtr g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size()) throw ValidationError("RadialProfile: size mismatch");
}

RadialProfile::RadialProfile(GridPtr g) : grid(std::move(g)) { values.assign(grid->size(), 0.0); }

double RadialProfile::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double RadialProfile::l2_norm() const {
  double s = 0.0;
  const auto& w = grid->weights();
  for (std::size_t k = 0; k < values.size(); ++k) s += w[k] * std::norm(values[k]);
  return std::sqrt(s);
}

void RadialProfile::check_finite(const char* what) const {
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError(std::string(what) + ": non-finite value in profile");
}

ModeField::ModeField(int n_, RadialProfile r, RadialProfile t) : n(n_), vr(std::move(r)), vtheta(std::move(t)) {
  if (vr.grid != vtheta.grid) throw ValidationError("ModeField: components on different grids");
}

double ModeField::l2_norm() const {
  return std::hypot(vr.l2_norm(), vtheta.l2_norm());
}

std::string profile_csv(const RadialProfile& p) {
  std::ostringstream os;
  os << "r,re,im\n";
  char buf[96];
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.grid->nodes()[k], p.values[k].real(),
                  p.values[k].imag());
    os << buf;
  }
  return os.str();
}

}  // namespace esr
