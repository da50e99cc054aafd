#include <doctest.h>

#include <random>

#include <boost/math/special_functions/bessel.hpp>

#include "esr/polar_fourier.hpp"
#include "esr/resolvent.hpp"
#include "oracles.hpp"

using namespace esr;

namespace {

double rel_sup(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace

TEST_CASE("query validation") {
  const ResolventQuery q = make_query(cplx(-0.3, 0.4), 0.1, 1);
  CHECK(std::abs(q.sqrt_lambda * q.sqrt_lambda - q.lambda) <= 1e-14 * std::abs(q.lambda));
  CHECK(q.sqrt_lambda.real() > 0.0);
  CHECK_THROWS_AS(make_query(0.0, 0.1, 1), ValidationError);
  CHECK_THROWS_AS(make_query(-2.0, 0.1, 1), ValidationError);
  CHECK_THROWS_AS(make_query(cplx(NAN, 0), 0.1, 1), ValidationError);
  CHECK_THROWS_AS(make_query(1.0, 1.5, 1), ValidationError);
}

TEST_CASE("F_n kernel") {
  const KernelValue f0 = f_n_kernel(make_query(0.01, 0.0, 1));
  CHECK(std::abs(f0.value - 24.27) < 0.01);
  CHECK(oracle::rel(f0.value, boost::math::cyl_bessel_k(0, 0.1) / 0.1) < 1e-12);
  for (double beta : {0.05, 0.2, 0.3})
    for (cplx lam : {cplx(0.01, 0.0), cplx(1e-6, 2e-6), cplx(-0.2, 0.05), cplx(0.3, -0.4)}) {
      const ResolventQuery q = make_query(lam, beta, 1);
      CAPTURE(lam);
      CHECK(oracle::rel(f_n_kernel(q).value, oracle::kernel_series(q.order.mu, q.sqrt_lambda)) < 1e-11);
      const ResolventQuery qc = make_query(std::conj(lam), beta, -1);
      CHECK(oracle::rel(f_n_kernel(qc).value, std::conj(f_n_kernel(q).value)) < 1e-12);
    }
  // large |lambda|: against a direct quadrature of the Bessel oracle
  const ResolventQuery q = make_query(cplx(9.0, 4.0), 0.1, 1);
  auto K = [&](double s) { return oracle::bessel_k(q.order.mu, q.sqrt_lambda * s); };
  cplx ref = 0.0;
  for (int p = 0; p < 30; ++p)
    ref += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(K, 1.0 + p, 2.0 + p, 5, 1e-14);
  CHECK(oracle::rel(f_n_kernel(q).value, ref) < 1e-10);
}

TEST_CASE("zero data gives zero solutions") {
  const ResolventQuery q = make_query(cplx(0.01, 0.01), 0.1, 1);
  const ModeSolution s = solve_body_force(q, zero_force(1));
  CHECK(s.c_const == 0.0);
  CHECK(s.vorticity.sup_norm() == 0.0);
  CHECK(s.velocity.vr.sup_norm() == 0.0);
  const ModeSolution b = solve_boundary(q, boundary_data(1, 0.0, 0.0));
  CHECK(b.vorticity.sup_norm() == 0.0);
  ForceMode zF = div_force(1, {}, 0.75, 2.0, 3.0, 0.5);
  CHECK(solve_div_force(q, zF).vorticity.sup_norm() == 0.0);
  const GridPtr g = resolvent_grid({q.sqrt_lambda}, zero_force(1));
  CHECK(phi_density(q, zero_force(1), g).sup_norm() == 0.0);
  CHECK(j1_identity(q, zero_force(1)).max() == 0.0);
  CHECK(pairing(RadialProfile(g), ModeField(1, RadialProfile(g), RadialProfile(g))) == 0.0);
}

TEST_CASE("body-force solutions") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const double beta = 0.05 + 0.25 * u(rng);
    const double rmax = std::exp(-1.0 / (6.0 * beta));
    const cplx lam = std::polar(rmax * std::pow(1e-6, u(rng)), (2 * u(rng) - 1) * 0.75 * pi);
    const int n = trial % 2 ? 1 : -1;
    const ForceMode f = scaled(gaussian_force(n, 2.0 + 4.0 * u(rng), 0.3 + 0.7 * u(rng)), cplx(u(rng), u(rng)));
    const ResolventQuery q = make_query(lam, beta, n);
    CAPTURE(lam);
    CAPTURE(beta);
    const ModeSolution s = solve_body_force(q, f);
    CHECK(s.residuals.ode <= 1e-5);
    CHECK(s.residuals.trace <= 1e-8);
    CHECK(s.residuals.div <= 1e-7);
    CHECK(rel_sup(mode_rot(s.velocity).values, s.vorticity.values) <= 1e-6);
    const IdentityReport j = j1_identity(q, f);
    CHECK(j.inner <= 1e-7);
    CHECK(j.outer <= 1e-7);
    CHECK(j.cancellation <= 1e-9);
    CHECK(j.constant <= 1e-8);
    // c from the density alone
    const RadialProfile phi = phi_density(q, f, s.vorticity.grid);
    CHECK(oracle::rel(c_constant(q, phi), s.c_const) < 1e-12);
    // exponential decay past the boundary layer
    const auto& r = s.vorticity.grid->nodes();
    const double kr = q.sqrt_lambda.real();
    const double peak = s.vorticity.sup_norm();
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] > 10.0 + 10.0 / kr) CHECK(std::abs(s.vorticity.values[i]) <= 1e-2 * peak * std::exp(-kr * (r[i] - 10.0) / 2));
  }
}

TEST_CASE("div-form forces") {
  const std::array<cplx, 4> coeff{cplx(1, 0.5), cplx(-0.3, 0.2), cplx(0.7, -1), cplx(0.2, 0.4)};
  for (double beta : {0.1, 0.25})
    for (cplx lam : {cplx(0.005, 0.005), cplx(-1e-4, 3e-5)}) {
      const ResolventQuery q = make_query(lam, beta, 1);
      const ForceMode F = bump_matrix_force(1, 3.0, 1.5, coeff);
      const ModeSolution sd = solve_div_force(q, F);
      CHECK(sd.residuals.ode <= 1e-5);
      CHECK(sd.residuals.trace <= 1e-8);
      const IdentityReport j = j2_identity(q, F);
      CHECK(j.inner <= 1e-7);
      CHECK(j.outer <= 1e-7);
      CHECK(j.constant <= 1e-8);
      // same problem through the body-force path with div F taken on the grid
      SolveOptions o;
      o.grid = sd.vorticity.grid;
      ForceMode fb = from_mode_field(mode_divergence(F, o.grid));
      const ModeSolution sb = solve_body_force(q, fb, o);
      CHECK(rel_sup(sb.vorticity.values, sd.vorticity.values) <= 1e-5);
      CHECK(rel_sup(sb.velocity.vtheta.values, sd.velocity.vtheta.values) <= 1e-5);
    }
  // polar divergence formula against a Cartesian field: F = x (x) e_1 phi(|x|) style check
  const GridPtr g = resolvent_grid({cplx(0.1, 0.05)}, bump_matrix_force(1, 3.0, 1.5, coeff));
  const ForceMode F = bump_matrix_force(1, 3.0, 1.5, {cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0)});
  // F = phi(r) Id e^{i theta}: div F = grad(phi e^{i theta}) = (phi', i phi / r)
  const ModeField d = mode_divergence(F, g);
  const auto& r = g->nodes();
  double err = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = (r[i] - 3.0) / 1.5;
    if (std::abs(x) >= 1.0) continue;
    const double ph = std::exp(-1.0 / (1 - x * x)), dph = -2 * x / std::pow(1 - x * x, 2) * ph / 1.5;
    err = std::max({err, std::abs(d.vr.values[i] - dph), std::abs(d.vtheta.values[i] - I1 * ph / r[i])});
    peak = std::max(peak, std::abs(dph));
  }
  // limited by differentiating the bump near its support edge
  CHECK(err < 3e-5 * peak);
  CHECK_THROWS_AS(div_force(1, {}, 0.4, 2.0, 3.0, 0.5), ValidationError);
}

TEST_CASE("boundary data") {
  const ResolventQuery q = make_query(cplx(0.01, 0.003), 0.15, 1);
  const ModeSolution s = solve_boundary(q, boundary_data(1, 0.0, -1.0));
  CHECK(s.c_const == cplx(1.0));
  CHECK(std::abs(s.velocity.vr.values[0]) <= 1e-10);
  CHECK(std::abs(s.velocity.vtheta.values[0] + 1.0) <= 1e-10);
  CHECK(s.residuals.ode <= 1e-5);
  CHECK(s.residuals.div <= 1e-7);
  const ModeSolution s2 = solve_boundary(q, boundary_data(1, cplx(0.4, -0.2), cplx(1.0, 0.3)));
  CHECK(s2.residuals.trace <= 1e-10);
  CHECK(s2.residuals.div <= 1e-7);
}

TEST_CASE("superposition of the three data types") {
  const ResolventQuery q = make_query(cplx(0.003, 0.004), 0.2, 1);
  const ForceMode f = gaussian_force(1, 4.0, 0.6);
  const ForceMode F = bump_matrix_force(1, 3.0, 1.2, {cplx(0.5), cplx(0, 0.3), cplx(-0.2), cplx(0.1, 0.1)});
  const ForceMode b = boundary_data(1, cplx(0.2, 0.1), cplx(-0.3, 0.0));
  SolveOptions o;
  o.grid = resolvent_grid({q.sqrt_lambda}, sum(f, from_mode_field(mode_divergence(F, resolvent_grid({q.sqrt_lambda}, F)))));
  const ModeSolution wf = solve_body_force(q, f, o), wF = solve_div_force(q, F, o), wb = solve_boundary(q, b, o);
  // one body solve with f + div F, plus the boundary part
  ForceMode total = sum(f, from_mode_field(mode_divergence(F, o.grid)));
  const ModeSolution wt = solve_body_force(q, total, o);
  std::vector<cplx> lhs(o.grid->size()), rhs(o.grid->size());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    lhs[i] = wf.velocity.vtheta.values[i] + wF.velocity.vtheta.values[i] + wb.velocity.vtheta.values[i];
    rhs[i] = wt.velocity.vtheta.values[i] + wb.velocity.vtheta.values[i];
  }
  CHECK(rel_sup(lhs, rhs) <= 1e-6);
  CHECK(std::abs(lhs[0] - b.b_theta) <= 1e-8);
}

TEST_CASE("pairing is conjugate-linear in the velocity") {
  const ResolventQuery q = make_query(cplx(0.01, 0.01), 0.1, 1);
  const ModeSolution s = solve_body_force(q, gaussian_force(1, 3.0, 0.5));
  const cplx a(0.3, 2.0);
  ModeField w2 = s.velocity;
  for (auto& v : w2.vr.values) v *= a;
  CHECK(oracle::rel(pairing(s.omega_hom, w2), std::conj(a) * pairing(s.omega_hom, s.velocity)) < 1e-14);
}

TEST_CASE("ModeSolution JSON") {
  const ResolventQuery q = make_query(cplx(0.01, 0.01), 0.1, 1);
  const std::string js = to_json(solve_body_force(q, gaussian_force(1, 3.0, 0.5)));
  for (const char* key : {"\"lambda\"", "\"beta\"", "\"Fn\"", "\"c\"", "\"grid\"", "\"vr\"", "\"vtheta\"", "\"omega\"",
                          "\"residuals\"", "\"ode\"", "\"div\"", "\"trace\""})
    CHECK(js.find(key) != std::string::npos);
}

TEST_CASE("force presets") {
  CHECK_THROWS_AS(parse_force("gaussian:center=3,width=-1", 1), ValidationError);
  CHECK_THROWS_AS(parse_force("nope", 1), ValidationError);
  CHECK_THROWS_AS(parse_force("ring:radius=3,foo=1", 1), ValidationError);
  const ForceMode g = parse_force("gaussian:center=3,width=0.5", 1);
  // divergence-free by construction
  const GridPtr grid = resolvent_grid({cplx(0.3, 0.1)}, g);
  CHECK(mode_div(sample_force(g, grid)).sup_norm() <= 1e-8 * sample_force(g, grid).vr.sup_norm());
  // gaussian mode against direct theta projection
  FieldSampler planar = [](double r, double t) {
    const double x = r * std::cos(t) - 3.0, y = r * std::sin(t);
    const double phi = std::exp(-(x * x + y * y) / 0.5) * wall_cutoff(r);
    return std::array<cplx, 2>{phi, 0.0};
  };
  const ModeField pm = project_mode(planar, 1, grid, 256);
  const RadialFn phi1 = [&](double r) { return g.f_r(r) * r / I1; };
  double err = 0.0;
  for (std::size_t i = 0; i < grid->size(); i += 5)
    err = std::max(err, std::abs(pm.vr.values[i] - phi1(grid->nodes()[i])));
  CHECK(err < 1e-12);
  CHECK(parse_force("compact-bump", 1).support_lo == doctest::Approx(1.5));
  CHECK(parse_force("powerlaw:q=1.33,rfar=200", 1).support_hi > 1000.0);
}
