#include "esr/resolvent.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "esr/damped.hpp"
#include "esr/polar_fourier.hpp"
#include "esr/quadrature.hpp"

namespace esr {

using Vec = std::vector<cplx>;

ResolventQuery make_query(cplx lambda, double beta, int n) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw ValidationError("lambda must be finite");
  if (lambda.imag() == 0.0 && lambda.real() <= 0.0)
    throw ValidationError("lambda must not lie on (-inf, 0]");
  ResolventQuery q;
  q.lambda = lambda;
  q.beta = beta;
  q.n = n;
  q.order = order_of(beta, n);
  q.sqrt_lambda = std::sqrt(lambda);
  if (!(q.sqrt_lambda.real() > 0.0)) throw ValidationError("sqrt(lambda) must have positive real part");
  return q;
}

ResolventQuery make_query_sqrt(cplx sqrt_lambda, double beta, int n) {
  if (!std::isfinite(sqrt_lambda.real()) || !std::isfinite(sqrt_lambda.imag()))
    throw ValidationError("sqrt(lambda) must be finite");
  if (!(sqrt_lambda.real() > 0.0)) throw ValidationError("sqrt(lambda) must have positive real part");
  ResolventQuery q;
  q.sqrt_lambda = sqrt_lambda;
  q.lambda = sqrt_lambda * sqrt_lambda;
  q.beta = beta;
  q.n = n;
  q.order = order_of(beta, n);
  return q;
}

BesselTriple::BesselTriple(const Order& o)
    : mu(1, o.zeta), mu_plus(2, o.zeta), mu_minus(0, o.zeta) {}

KernelValue f_n_kernel(const ResolventQuery& q) {
  BesselTriple b(q.order);
  return f_n_kernel(q, b);
}

KernelValue f_n_kernel(const ResolventQuery& q, const BesselTriple& b) {
  const cplx k = q.sqrt_lambda;
  const int m = std::abs(q.n);
  // s = e^v / |k|, so z = (k / |k|) e^v keeps its phase exact even for tiny |k|
  const double ak = std::abs(k);
  const cplx dir = k / ak;
  const double v0 = std::log(1.0 / ak);
  const double v_end = std::log1p(60.0 / k.real()) - v0;
  const double v_lo = std::min(-v0, v_end);
  const double v1 = std::clamp(0.0, v_lo, v_end);
  KernelValue out;
  if (ak >= 0.1) {
    // boundary-layer form: s = 1 + x / |k|, with e^{-k} taken outside
    const double X = 60.0 * ak / k.real();
    auto layer = [&](double x) {
      const double s = 1.0 + x / ak;
      return b.mu.k_scaled(k * s) * std::exp(-dir * x) * std::pow(s, 1 - m);
    };
    double e = 0.0;
    const cplx w = integrate_gk(layer, 0.0, X, 1e-14, &e, 15);
    out.scaled = w / ak;
    out.value = out.scaled * std::exp(-k);
    out.est_abs_error = e / ak * std::exp(-k.real());
    if (!(e <= 1e-12 * std::abs(w)) || !std::isfinite(std::abs(w)))
      throw NumericalError("F_n quadrature did not reach the requested accuracy");
    return out;
  }
  const double pre = std::pow(ak, m - 2);
  auto integrand = [&](double v) {
    const cplx z = dir * std::exp(v);
    return b.mu.k_scaled(z) * std::exp(-z) * std::exp((2 - m) * v);
  };
  double e1 = 0.0, e2 = 0.0;
  cplx v = 0.0;
  if (v1 > v_lo) v += integrate_gk(integrand, v_lo, v1, 1e-14, &e1, 15);
  v += integrate_gk(integrand, v1, v_end, 1e-14, &e2, 15);
  v *= pre;
  out.value = v;
  out.scaled = v * std::exp(k);
  out.est_abs_error = (e1 + e2) * pre;
  if (!(out.est_abs_error <= 1e-12 * std::abs(v)) || !std::isfinite(std::abs(v)))
    throw NumericalError("F_n quadrature did not reach the requested accuracy");
  return out;
}

GridPtr resolvent_grid(const std::vector<cplx>& ks, const ForceMode& f, const SolveOptions& opt) {
  if (ks.empty()) throw ValidationError("resolvent_grid needs at least one sqrt(lambda)");
  double kr_min = std::numeric_limits<double>::infinity();
  for (const cplx& k : ks) {
    if (!(k.real() > 0.0)) throw ValidationError("sqrt(lambda) must have positive real part");
    kr_min = std::min(kr_min, k.real());
  }
  const bool data = f.kind != ForceKind::boundary && !f.is_zero();
  double R = opt.r_max;
  if (R <= 0.0) {
    R = std::max(50.0, 1.0 + 36.0 / kr_min);
    if (data) R = std::max(R, f.support_hi + 36.0 / kr_min);
  }
  GridOptions go;
  go.r_max = R;
  go.panels_per_decade = opt.panels_per_decade;
  go.nodes_per_panel = opt.nodes_per_panel;
  for (const cplx& k : ks) go.caps.push_back({1.0, std::min(R, 1.0 + 40.0 / k.real()), 3.0 / std::abs(k)});
  if (data) {
    go.caps.push_back({f.support_lo, std::min(R, f.support_hi), 0.5 * f.scale});
    go.caps.insert(go.caps.end(), f.caps.begin(), f.caps.end());
    for (double b : {f.support_lo, f.support_hi})
      if (b > 1.0 && b < R) go.breakpoints.push_back(b);
  }
  return RadialGrid::build(go);
}

namespace {

struct Samples {
  Vec i0, i1, k0, km1;  // scaled values at k r of I_mu, I_{mu+1}, K_mu, K_{mu-1}
};

Samples bessel_samples(const BesselTriple& b, cplx k, const RadialGrid& g) {
  const auto& r = g.nodes();
  Samples s;
  s.i0.resize(r.size());
  s.i1.resize(r.size());
  s.k0.resize(r.size());
  s.km1.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const cplx z = k * r[i];
    s.i0[i] = b.mu.i_scaled(z);
    s.i1[i] = b.mu_plus.i_scaled(z);
    s.k0[i] = b.mu.k_scaled(z);
    s.km1[i] = b.mu_minus.k_scaled(z);
  }
  return s;
}

void check_mode(const ResolventQuery& q, const ForceMode& f, ForceKind kind) {
  if (f.kind != kind)
    throw ValidationError(std::string("expected a ") + to_string(kind) + " force, got " + to_string(f.kind));
  if (f.n != q.n) throw ValidationError("force mode index differs from the query");
  if (std::abs(q.n) != 1) throw ValidationError("the resolvent solve is implemented for |n| = 1");
  if (kind == ForceKind::div && q.lambda == 0.0)
    throw ValidationError("div-form data need a representable lambda");
}

Vec sample(const RadialFn& fn, const RadialGrid& g, double hi) {
  const auto& r = g.nodes();
  Vec v(r.size(), 0.0);
  if (!fn) return v;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] > hi) break;
    v[i] = fn(r[i]);
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
      throw ValidationError("force data is not finite");
  }
  return v;
}

void check_decay(const Vec& a, const Vec& b, const RadialGrid& g) {
  double peak = 0.0, edge = 0.0;
  const std::size_t last0 = g.index(g.panels() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = std::max(std::abs(a[i]), std::abs(b[i]));
    peak = std::max(peak, v);
    if (i >= last0) edge = std::max(edge, v);
  }
  if (edge > 1e-12 * peak) throw ValidationError("force does not decay below 1e-12 before r_max");
}

struct DivParts {
  Vec F1, F2, F3, F4;  // F5 = F2, F6 = F3
  Vec G3;
};

DivParts div_parts(const ResolventQuery& q, const ForceMode& F, const RadialGrid& g) {
  const auto& r = g.nodes();
  const std::size_t N = r.size();
  std::array<Vec, 4> c;
  for (int i = 0; i < 4; ++i) c[i] = sample(F.F[i], g, F.support_hi);
  const cplx in = I1 * double(q.n);
  const cplx mu = q.order.mu;
  DivParts d;
  d.F1.resize(N);
  d.F2.resize(N);
  d.F3.resize(N);
  d.F4.resize(N);
  d.G3.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const cplx a = c[0][i], b = c[1][i], cc = c[2][i], dd = c[3][i];
    const cplx G1 = a, G2 = a + in * b - dd, G3 = cc, G4 = in * dd + b + cc;
    const cplx H1 = mu * G3 + in * G1, H2 = mu * G4 + in * G2;
    const cplx H3 = mu * G3 - in * G1, H4 = mu * G4 - in * G2;
    d.F1[i] = H2 - mu * H1;
    d.F2[i] = G4 - in * G1;
    d.F3[i] = G3;
    d.F4[i] = H4 + mu * H3;
    d.G3[i] = G3;
  }
  return d;
}

Vec phi_body(const ResolventQuery& q, const Samples& s, const Vec& fr, const Vec& ft, const RadialGrid& g) {
  const auto& r = g.nodes();
  const std::size_t N = r.size();
  const cplx k = q.sqrt_lambda, mu = q.order.mu, in = I1 * double(q.n);
  Vec hA(N), hB(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (fr[i] == 0.0 && ft[i] == 0.0) {
      hA[i] = hB[i] = 0.0;
      continue;
    }
    const cplx g1 = mu * ft[i] + in * fr[i], g2 = mu * ft[i] - in * fr[i];
    hA[i] = s.i0[i] * g1 + k * r[i] * s.i1[i] * ft[i];
    hB[i] = s.k0[i] * g2 + k * r[i] * s.km1[i] * ft[i];
  }
  const Vec A = damped_forward(g, hA, k), B = damped_backward(g, hB, k);
  Vec phi(N);
  for (std::size_t i = 0; i < N; ++i) phi[i] = -s.k0[i] * A[i] + s.i0[i] * B[i];
  return phi;
}

Vec phi_div(const ResolventQuery& q, const Samples& s, const DivParts& d, const RadialGrid& g) {
  const auto& r = g.nodes();
  const std::size_t N = r.size();
  const cplx k = q.sqrt_lambda, lam = q.lambda;
  Vec hA(N), hB(N);
  for (std::size_t i = 0; i < N; ++i) {
    hA[i] = s.i0[i] * d.F1[i] / r[i] + k * s.i1[i] * d.F2[i] - lam * r[i] * s.i0[i] * d.F3[i];
    hB[i] = s.k0[i] * d.F4[i] / r[i] + k * s.km1[i] * d.F2[i] + lam * r[i] * s.k0[i] * d.F3[i];
  }
  const Vec A = damped_forward(g, hA, k), B = damped_backward(g, hB, k);
  Vec phi(N);
  for (std::size_t i = 0; i < N; ++i) phi[i] = -s.k0[i] * A[i] + s.i0[i] * B[i] - d.G3[i];
  return phi;
}

cplx c_of(const ResolventQuery& q, const RadialGrid& g, const Vec& phi, double* tail) {
  const int m = std::abs(q.n);
  const auto& r = g.nodes();
  Vec w(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) w[i] = std::pow(r[i], 1 - m) * phi[i];
  const cplx c = g.integrate_dr(w);
  const double t = std::abs(w.back()) / q.sqrt_lambda.real();
  if (tail) *tail = t;
  if (t > 1e-12 * std::abs(c) && t > 0.0)
    throw NumericalError("tail of the c integral exceeds 1e-12 of its value; increase r_max");
  return c;
}

// lambda omega - omega'' - omega'/r + mu^2 omega / r^2 - G, relative to the largest term
double ode_residual(const ResolventQuery& q, const RadialGrid& g, const Vec& w, const Vec& G) {
  const auto& r = g.nodes();
  const Vec d1 = g.derivative(w), d2 = g.derivative(d1);
  const cplx mu2 = q.order.mu * q.order.mu;
  double res = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const cplx t0 = q.lambda * w[i], t1 = d2[i], t2 = d1[i] / r[i], t3 = mu2 * w[i] / (r[i] * r[i]);
    res = std::max(res, std::abs(t0 - t1 - t2 + t3 - G[i]));
    scale = std::max({scale, std::abs(t0), std::abs(t1), std::abs(t2), std::abs(t3), std::abs(G[i])});
  }
  return scale > 0.0 ? res / scale : 0.0;
}

double div_residual(const ModeField& v) {
  const auto& g = *v.vr.grid;
  const auto& r = g.nodes();
  const RadialProfile d = mode_div(v);
  const Vec dr = g.derivative(v.vr.values);
  double scale = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    scale = std::max({scale, std::abs(dr[i]), std::abs(v.vr.values[i]) / r[i],
                      std::abs(v.vtheta.values[i]) / r[i]});
  return scale > 0.0 ? d.sup_norm() / scale : 0.0;
}

double sup_velocity(const ModeField& v) { return std::max(v.vr.sup_norm(), v.vtheta.sup_norm()); }

Vec rot_of(const ModeField& f) { return mode_rot(f).values; }

// K_mu(sqrt(lambda) r) / F_n, with the e^{-sqrt(lambda)} factors cancelled analytically
Vec k_over_f(const ResolventQuery& q, const Samples& s, const RadialGrid& g, const KernelValue& F) {
  const auto& r = g.nodes();
  Vec K(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) K[i] = s.k0[i] * std::exp(-q.sqrt_lambda * (r[i] - 1.0)) / F.scaled;
  return K;
}

GridPtr grid_for(const ResolventQuery& q, const ForceMode& f, const SolveOptions& opt) {
  return opt.grid ? opt.grid : resolvent_grid({q.sqrt_lambda}, f, opt);
}

void assemble(ModeSolution& sol, const ResolventQuery& q, const GridPtr& grid, const Samples& s,
              const KernelValue& F, const Vec& phi, const SolveOptions& opt) {
  const Vec K = k_over_f(q, s, *grid, F);
  const cplx a = -sol.c_const;
  Vec hom(K.size()), w(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) {
    hom[i] = a * K[i];
    w[i] = hom[i] + phi[i];
  }
  sol.omega_hom = RadialProfile(grid, hom);
  sol.omega_part = RadialProfile(grid, phi);
  sol.vorticity = RadialProfile(grid, w);
  sol.vorticity.check_finite("vorticity");
  if (opt.velocity) sol.velocity = velocity(VorticityMode{q.n, sol.vorticity});
}

KernelValue checked_kernel(const ResolventQuery& q, const BesselTriple& b) {
  KernelValue F = f_n_kernel(q, b);
  if (!(std::abs(F.scaled) > kKernelFloor))
    throw NumericalError("|F_n| is below 1e-13; lambda is too close to a zero of F_n");
  return F;
}

}  // namespace

ModeField sample_force(const ForceMode& f, const GridPtr& grid) {
  if (f.kind == ForceKind::div) return mode_divergence(f, grid);
  if (f.kind != ForceKind::body) throw ValidationError("boundary data has no interior force");
  return ModeField(f.n, RadialProfile(grid, sample(f.f_r, *grid, f.support_hi)),
                   RadialProfile(grid, sample(f.f_theta, *grid, f.support_hi)));
}

ModeField mode_divergence(const ForceMode& F, const GridPtr& grid) {
  if (F.kind != ForceKind::div) throw ValidationError("mode_divergence needs a div force");
  const auto& g = *grid;
  const auto& r = g.nodes();
  std::array<Vec, 4> c;
  for (int i = 0; i < 4; ++i) c[i] = sample(F.F[i], g, F.support_hi);
  const Vec da = g.derivative(c[0]), dc = g.derivative(c[2]);
  const cplx in = I1 * double(F.n);
  Vec fr(r.size()), ft(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    fr[i] = da[i] + (c[0][i] + in * c[1][i] - c[3][i]) / r[i];
    ft[i] = dc[i] + (in * c[3][i] + c[1][i] + c[2][i]) / r[i];
  }
  return ModeField(F.n, RadialProfile(grid, fr), RadialProfile(grid, ft));
}

RadialProfile phi_density(const ResolventQuery& q, const ForceMode& f, const GridPtr& grid) {
  BesselTriple b(q.order);
  const Samples s = bessel_samples(b, q.sqrt_lambda, *grid);
  if (f.kind == ForceKind::body) {
    check_mode(q, f, ForceKind::body);
    return RadialProfile(grid, phi_body(q, s, sample(f.f_r, *grid, f.support_hi),
                                        sample(f.f_theta, *grid, f.support_hi), *grid));
  }
  check_mode(q, f, ForceKind::div);
  return RadialProfile(grid, phi_div(q, s, div_parts(q, f, *grid), *grid));
}

cplx c_constant(const ResolventQuery& q, const RadialProfile& phi, double* tail) {
  return c_of(q, *phi.grid, phi.values, tail);
}

ModeSolution solve_body_force(const ResolventQuery& q, const ForceMode& f, const SolveOptions& opt) {
  check_mode(q, f, ForceKind::body);
  const GridPtr grid = grid_for(q, f, opt);
  const BesselTriple b(q.order);
  ModeSolution sol;
  sol.query = q;
  sol.kind = ForceKind::body;
  const KernelValue F = checked_kernel(q, b);
  sol.Fn_value = F.value;
  sol.Fn_error = F.est_abs_error;
  const Vec fr = sample(f.f_r, *grid, f.support_hi), ft = sample(f.f_theta, *grid, f.support_hi);
  check_decay(fr, ft, *grid);
  const Samples s = bessel_samples(b, q.sqrt_lambda, *grid);
  const Vec phi = phi_body(q, s, fr, ft, *grid);
  sol.c_const = c_of(q, *grid, phi, &sol.tail_bound);
  assemble(sol, q, grid, s, F, phi, opt);
  if (opt.residuals) {
    const Vec G = rot_of(ModeField(q.n, RadialProfile(grid, fr), RadialProfile(grid, ft)));
    sol.residuals.ode = ode_residual(q, *grid, sol.vorticity.values, G);
    if (opt.velocity) {
      sol.residuals.div = div_residual(sol.velocity);
      const double sup = sup_velocity(sol.velocity);
      const double tr = std::max(std::abs(sol.velocity.vr.values[0]), std::abs(sol.velocity.vtheta.values[0]));
      sol.residuals.trace = sup > 0.0 ? tr / sup : 0.0;
    }
  }
  return sol;
}

ModeSolution solve_div_force(const ResolventQuery& q, const ForceMode& F, const SolveOptions& opt) {
  check_mode(q, F, ForceKind::div);
  const GridPtr grid = grid_for(q, F, opt);
  const auto& g = *grid;
  // membership check: |x|^{gamma'} F square integrable and decayed at r_max
  {
    const auto& r = g.nodes();
    std::vector<double> w2(r.size(), 0.0);
    double peak = 0.0, edge = 0.0;
    std::array<Vec, 4> c;
    for (int i = 0; i < 4; ++i) c[i] = sample(F.F[i], g, F.support_hi);
    for (std::size_t i = 0; i < r.size(); ++i) {
      double s2 = 0.0;
      for (int j = 0; j < 4; ++j) s2 += std::norm(c[j][i]);
      w2[i] = s2 * std::pow(r[i], 2.0 * F.gamma_prime);
      peak = std::max(peak, std::sqrt(w2[i]));
      if (i + g.q() > r.size()) edge = std::max(edge, std::sqrt(w2[i]));
    }
    const double nrm = g.integrate(w2);
    if (!std::isfinite(nrm) || edge > 1e-12 * peak)
      throw ValidationError("div force is not in the weighted space on this grid");
  }
  const BesselTriple b(q.order);
  ModeSolution sol;
  sol.query = q;
  sol.kind = ForceKind::div;
  const KernelValue Fk = checked_kernel(q, b);
  sol.Fn_value = Fk.value;
  sol.Fn_error = Fk.est_abs_error;
  const Samples s = bessel_samples(b, q.sqrt_lambda, g);
  const Vec phi = phi_div(q, s, div_parts(q, F, g), g);
  sol.c_const = c_of(q, g, phi, &sol.tail_bound);
  assemble(sol, q, grid, s, Fk, phi, opt);
  if (opt.residuals) {
    const Vec G = rot_of(mode_divergence(F, grid));
    sol.residuals.ode = ode_residual(q, g, sol.vorticity.values, G);
    if (opt.velocity) {
      sol.residuals.div = div_residual(sol.velocity);
      const double sup = sup_velocity(sol.velocity);
      const double tr = std::max(std::abs(sol.velocity.vr.values[0]), std::abs(sol.velocity.vtheta.values[0]));
      sol.residuals.trace = sup > 0.0 ? tr / sup : 0.0;
    }
  }
  return sol;
}

ModeSolution solve_boundary(const ResolventQuery& q, const ForceMode& bd, const SolveOptions& opt) {
  check_mode(q, bd, ForceKind::boundary);
  const GridPtr grid = grid_for(q, bd, opt);
  const auto& r = grid->nodes();
  const BesselTriple b(q.order);
  ModeSolution sol;
  sol.query = q;
  sol.kind = ForceKind::boundary;
  const KernelValue F = checked_kernel(q, b);
  sol.Fn_value = F.value;
  sol.Fn_error = F.est_abs_error;
  const cplx in = I1 * double(q.n);
  const cplx T = bd.b_r / in - bd.b_theta;
  sol.c_const = T;
  const Samples s = bessel_samples(b, q.sqrt_lambda, *grid);
  const Vec K = k_over_f(q, s, *grid, F);
  Vec w(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) w[i] = T * K[i];
  sol.omega_hom = RadialProfile(grid, w);
  sol.omega_part = RadialProfile(grid);
  sol.vorticity = sol.omega_hom;
  if (opt.velocity) {
    ModeField v = velocity(VorticityMode{q.n, sol.vorticity});
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double r2 = r[i] * r[i];
      v.vr.values[i] += bd.b_r / r2;
      v.vtheta.values[i] += bd.b_r / in / r2;
    }
    sol.velocity = v;
  }
  if (opt.residuals) {
    sol.residuals.ode = ode_residual(q, *grid, sol.vorticity.values, Vec(K.size(), 0.0));
    if (opt.velocity) {
      sol.residuals.div = div_residual(sol.velocity);
      const double bmax = std::max(std::abs(bd.b_r), std::abs(bd.b_theta));
      const double tr = std::max(std::abs(sol.velocity.vr.values[0] - bd.b_r),
                                 std::abs(sol.velocity.vtheta.values[0] - bd.b_theta));
      sol.residuals.trace = bmax > 0.0 ? tr / bmax : tr;
    }
  }
  return sol;
}

ModeSolution solve(const ResolventQuery& q, const ForceMode& f, const SolveOptions& opt) {
  switch (f.kind) {
    case ForceKind::body: return solve_body_force(q, f, opt);
    case ForceKind::div: return solve_div_force(q, f, opt);
    case ForceKind::boundary: return solve_boundary(q, f, opt);
  }
  throw ValidationError("unknown force kind");
}

RadialProfile solve_vorticity(const ResolventQuery& q, const ForceMode& f, const GridPtr& grid,
                              const BesselTriple* bp) {
  std::unique_ptr<BesselTriple> own;
  if (!bp) {
    own = std::make_unique<BesselTriple>(q.order);
    bp = own.get();
  }
  const KernelValue F = checked_kernel(q, *bp);
  const Samples s = bessel_samples(*bp, q.sqrt_lambda, *grid);
  Vec phi;
  if (f.kind == ForceKind::body) {
    check_mode(q, f, ForceKind::body);
    phi = phi_body(q, s, sample(f.f_r, *grid, f.support_hi), sample(f.f_theta, *grid, f.support_hi), *grid);
  } else {
    check_mode(q, f, ForceKind::div);
    phi = phi_div(q, s, div_parts(q, f, *grid), *grid);
  }
  const cplx c = c_of(q, *grid, phi, nullptr);
  const Vec K = k_over_f(q, s, *grid, F);
  const cplx a = -c;
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += a * K[i];
  return RadialProfile(grid, std::move(phi));
}

// ---------------------------------------------------------------------------------------
// J decompositions, computed with unscaled Bessel values and plain running integrals.

namespace {

struct Unscaled {
  Vec I, I1, K, Km1;
};

Unscaled unscaled(const ResolventQuery& q, const Samples& s, const RadialGrid& g) {
  const auto& r = g.nodes();
  const cplx k = q.sqrt_lambda;
  if (k.real() * g.r_max() > 650.0)
    throw NumericalError("identity check needs unscaled Bessel values; r_max * Re sqrt(lambda) too large");
  Unscaled u;
  const std::size_t N = r.size();
  u.I.resize(N);
  u.I1.resize(N);
  u.K.resize(N);
  u.Km1.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const cplx e = std::exp(k * r[i]);
    u.I[i] = s.i0[i] * e;
    u.I1[i] = s.i1[i] * e;
    u.K[i] = s.k0[i] / e;
    u.Km1[i] = s.km1[i] / e;
  }
  return u;
}

Vec operator*(const Vec& a, const Vec& b) {
  Vec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] * b[i];
  return c;
}
Vec operator*(cplx s, const Vec& a) {
  Vec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = s * a[i];
  return c;
}
Vec operator-(const Vec& a, const Vec& b) {
  Vec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

Vec power(const RadialGrid& g, double p) {
  const auto& r = g.nodes();
  Vec v(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = std::pow(r[i], p);
  return v;
}

struct Window {
  std::vector<std::size_t> idx;
};

Window identity_window(const ResolventQuery& q, const RadialGrid& g) {
  // stay clear of the truncation at r_max and of the coarse panels past the boundary layer cap
  const double kr = q.sqrt_lambda.real();
  const double hi = std::min(g.r_max() - 27.6 / kr, 1.0 + 40.0 / kr);
  Window w;
  const auto& r = g.nodes();
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i] <= hi) w.idx.push_back(i);
  return w;
}

double rel_residual(const Window& w, const Vec& lhs, const Vec& rhs) {
  double m = 0.0;
  for (std::size_t i : w.idx) m = std::max(m, std::abs(lhs[i] - rhs[i]) / (std::abs(lhs[i]) + 1e-30));
  return m;
}

Vec sum_of(std::initializer_list<const Vec*> terms) {
  Vec s(terms.begin()[0]->size(), 0.0);
  for (const Vec* t : terms)
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += (*t)[i];
  return s;
}

}  // namespace

double IdentityReport::max() const { return std::max({inner, outer, cancellation, constant}); }

IdentityReport j1_identity(const ResolventQuery& q, const ForceMode& f, const SolveOptions& opt) {
  check_mode(q, f, ForceKind::body);
  const GridPtr grid = grid_for(q, f, opt);
  const auto& g = *grid;
  const BesselTriple b(q.order);
  const Samples s = bessel_samples(b, q.sqrt_lambda, g);
  const Vec fr = sample(f.f_r, g, f.support_hi), ft = sample(f.f_theta, g, f.support_hi);
  const Vec phi = phi_body(q, s, fr, ft, g);
  const cplx c = c_of(q, g, phi, nullptr);
  const Unscaled u = unscaled(q, s, g);

  const int m = std::abs(q.n);
  const cplx mu = q.order.mu, in = I1 * double(q.n);
  const Vec rm = power(g, -m), rp = power(g, m), tau = power(g, 1.0);
  const Vec s1pm = power(g, 1 + m), s1mm = power(g, 1 - m), spm = power(g, m), smm = power(g, -m);
  auto Cf = [&](const Vec& v) { return g.cumulative(v); };
  auto Cb = [&](const Vec& v) { return g.cumulative_from_right(v); };

  Vec g1(fr.size()), g2(fr.size());
  for (std::size_t i = 0; i < fr.size(); ++i) {
    g1[i] = mu * ft[i] + in * fr[i];
    g2[i] = mu * ft[i] - in * fr[i];
  }
  const Vec Ig1 = u.I * g1, Kg2 = u.K * g2;
  const Vec tI1f = tau * u.I1 * ft, tKm1f = tau * u.Km1 * ft;
  const Vec PK = Cf(s1pm * u.K), PI = Cf(s1pm * u.I);
  const Vec Q2 = Cf(spm * u.Km1), Q4 = Cf(spm * u.I1);
  const Vec C1 = Cf(Ig1), CtI1f = Cf(tI1f), BtKm1f = Cb(tKm1f), BKg2 = Cb(Kg2);

  const Vec J1 = (-1.0) * (rm * (PK * C1 - Cf(Ig1 * PK)));
  const Vec J2 = (-(mu + double(m))) * (rm * (Q2 * CtI1f - Cf(tI1f * Q2)));
  const Vec J3 = rm * Cf(Kg2 * PI);
  const Vec J4 = (mu - double(m)) * (rm * Cf(tKm1f * Q4));
  const Vec J5 = rm * BKg2 * PI;
  const Vec J6 = (mu - double(m)) * (rm * BtKm1f * Q4);
  const Vec J7 = tau * u.Km1 * CtI1f;
  const Vec J8 = tau * u.I1 * BtKm1f;
  const Vec J9 = (-u.I1[0] * BtKm1f[0]) * rm;

  const Vec T = Cb(s1mm * u.K), U = Cf(s1mm * u.I), Bm = Cb(smm * u.Km1), V = Cf(smm * u.I1);
  const Vec J10 = (-1.0) * (rp * C1 * T);
  const Vec J11 = (-1.0) * (rp * Cb(Ig1 * T));
  const Vec J12 = (-(mu - double(m))) * (rp * CtI1f * Bm);
  const Vec J13 = (-(mu - double(m))) * (rp * Cb(tI1f * Bm));
  const Vec J14 = rp * (Cb(Kg2 * U) - U * BKg2);
  const Vec J15 = (mu + double(m)) * (rp * (Cb(tKm1f * V) - V * BtKm1f));
  const Vec J16 = (-1.0) * (tau * u.Km1 * CtI1f);
  const Vec J17 = (-1.0) * (tau * u.I1 * BtKm1f);

  const Vec lhs1 = rm * Cf(s1pm * phi);
  const Vec lhs2 = rp * Cb(s1mm * phi);
  const Window w = identity_window(q, g);
  IdentityReport rep;
  rep.inner = rel_residual(w, lhs1, sum_of({&J1, &J2, &J3, &J4, &J5, &J6, &J7, &J8, &J9}));
  rep.outer = rel_residual(w, lhs2, sum_of({&J10, &J11, &J12, &J13, &J14, &J15, &J16, &J17}));
  for (std::size_t i : w.idx) {
    const cplx d = J9[i] - rm[i] * J17[0];
    rep.cancellation = std::max(rep.cancellation, std::abs(d) / (std::abs(J9[i]) + 1e-30));
  }
  const cplx c_j = J11[0] + J13[0] + J14[0] + J15[0] + J17[0];
  rep.constant = std::abs(c - c_j) / (std::abs(c) + 1e-30);
  return rep;
}

IdentityReport j2_identity(const ResolventQuery& q, const ForceMode& F, const SolveOptions& opt) {
  check_mode(q, F, ForceKind::div);
  const GridPtr grid = grid_for(q, F, opt);
  const auto& g = *grid;
  const BesselTriple b(q.order);
  const Samples s = bessel_samples(b, q.sqrt_lambda, g);
  const DivParts d = div_parts(q, F, g);
  const Vec phi = phi_div(q, s, d, g);
  const cplx c = c_of(q, g, phi, nullptr);
  const Unscaled u = unscaled(q, s, g);

  const int m = std::abs(q.n);
  const cplx k = q.sqrt_lambda, lam = q.lambda;
  const Vec rm = power(g, -m), rp = power(g, m), tau = power(g, 1.0), itau = power(g, -1.0);
  const Vec s1pm = power(g, 1 + m), s1mm = power(g, 1 - m);
  auto Cf = [&](const Vec& v) { return g.cumulative(v); };
  auto Cb = [&](const Vec& v) { return g.cumulative_from_right(v); };

  // integrands of the six weighted data integrals
  const Vec a1 = itau * u.I * d.F1, a2 = u.I1 * d.F2, a3 = tau * u.I * d.F3;
  const Vec b4 = itau * u.K * d.F4, b5 = u.Km1 * d.F2, b6 = tau * u.K * d.F3;
  const Vec PK = Cf(s1pm * u.K), PI = Cf(s1pm * u.I);
  const Vec T = Cb(s1mm * u.K), U = Cf(s1mm * u.I);

  auto inner_A = [&](const Vec& a) { return (-1.0) * (rm * (PK * Cf(a) - Cf(a * PK))); };
  const Vec J1 = inner_A(a1);
  const Vec J2 = k * inner_A(a2);
  const Vec J3 = (-lam) * inner_A(a3);
  const Vec J4 = rm * Cf(b4 * PI);
  const Vec J5 = rm * Cb(b4) * PI;
  const Vec J6 = k * (rm * Cf(b5 * PI));
  const Vec J7 = k * (rm * Cb(b5) * PI);
  const Vec J8 = lam * (rm * Cf(b6 * PI));
  const Vec J9 = lam * (rm * Cb(b6) * PI);
  const Vec J10 = (-1.0) * (rm * Cf(s1pm * d.G3));

  const Vec J11 = (-1.0) * (rp * Cf(a1) * T);
  const Vec J12 = (-1.0) * (rp * Cb(a1 * T));
  const Vec J13 = (-k) * (rp * Cf(a2) * T);
  const Vec J14 = (-k) * (rp * Cb(a2 * T));
  const Vec J15 = lam * (rp * Cf(a3) * T);
  const Vec J16 = lam * (rp * Cb(a3 * T));
  const Vec J17 = rp * (Cb(b4 * U) - U * Cb(b4));
  const Vec J18 = k * (rp * (Cb(b5 * U) - U * Cb(b5)));
  const Vec J19 = lam * (rp * (Cb(b6 * U) - U * Cb(b6)));
  const Vec J20 = (-1.0) * (rp * Cb(s1mm * d.G3));

  const Vec lhs1 = rm * Cf(s1pm * phi);
  const Vec lhs2 = rp * Cb(s1mm * phi);
  const Window w = identity_window(q, g);
  IdentityReport rep;
  rep.inner = rel_residual(w, lhs1, sum_of({&J1, &J2, &J3, &J4, &J5, &J6, &J7, &J8, &J9, &J10}));
  rep.outer =
      rel_residual(w, lhs2, sum_of({&J11, &J12, &J13, &J14, &J15, &J16, &J17, &J18, &J19, &J20}));
  const cplx c_j = J12[0] + J14[0] + J16[0] + J17[0] + J18[0] + J19[0] + J20[0];
  rep.constant = std::abs(c - c_j) / (std::abs(c) + 1e-30);
  return rep;
}

cplx pairing(const RadialProfile& omega, const ModeField& w) {
  if (omega.grid != w.vr.grid) throw ValidationError("pairing needs profiles on one grid");
  const auto& g = *omega.grid;
  Vec p(omega.values.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = omega.values[i] * std::conj(w.vr.values[i]);
  return g.integrate_dr(p);
}

std::string to_json(const ModeSolution& s) {
  using nlohmann::ordered_json;
  auto pair = [](cplx z) { return ordered_json::array({z.real(), z.imag()}); };
  auto list = [&](const RadialProfile& p) {
    ordered_json a = ordered_json::array();
    for (const cplx& z : p.values) a.push_back(pair(z));
    return a;
  };
  ordered_json j;
  j["lambda"] = pair(s.query.lambda);
  j["beta"] = s.query.beta;
  j["n"] = s.query.n;
  j["kind"] = to_string(s.kind);
  j["Fn"] = pair(s.Fn_value);
  j["c"] = pair(s.c_const);
  j["grid"] = s.vorticity.grid ? s.vorticity.grid->nodes() : std::vector<double>{};
  j["vr"] = s.velocity.vr.grid ? list(s.velocity.vr) : ordered_json::array();
  j["vtheta"] = s.velocity.vtheta.grid ? list(s.velocity.vtheta) : ordered_json::array();
  j["omega"] = list(s.vorticity);
  j["residuals"] = {{"ode", s.residuals.ode}, {"div", s.residuals.div}, {"trace", s.residuals.trace}};
  j["tail_bound"] = s.tail_bound;
  return j.dump(1);
}

}  // namespace esr
