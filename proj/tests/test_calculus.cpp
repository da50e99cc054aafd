#include <doctest.h>

#include <map>
#include <random>

#include <boost/math/special_functions/expint.hpp>

#include "esr/biot_savart.hpp"
#include "esr/polar_fourier.hpp"

using namespace esr;

namespace {

GridPtr grid_to(double rmax, double cap = 0.5) {
  GridOptions o;
  o.r_max = rmax;
  o.caps.push_back({1.0, 12.0, cap});
  return RadialGrid::build(o);
}

// sum of complex Gaussian bumps in r
struct Bumps {
  std::vector<double> c, w;
  std::vector<cplx> a;
  cplx operator()(double r) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += a[i] * std::exp(-0.5 * std::pow((r - c[i]) / w[i], 2));
    return s;
  }
  cplx d(double r) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double x = (r - c[i]) / w[i];
      s += -a[i] * x / w[i] * std::exp(-0.5 * x * x);
    }
    return s;
  }
};

Bumps random_bumps(std::mt19937_64& rng, int count = 3) {
  std::uniform_real_distribution<double> uc(2.0, 7.0), uw(0.4, 1.2), ua(-1.0, 1.0);
  Bumps b;
  for (int i = 0; i < count; ++i) {
    b.c.push_back(uc(rng));
    b.w.push_back(uw(rng));
    b.a.push_back({ua(rng), ua(rng)});
  }
  return b;
}

RadialProfile sample(const GridPtr& g, const std::function<cplx(double)>& f) {
  std::vector<cplx> v;
  for (double r : g->nodes()) v.push_back(f(r));
  return RadialProfile(g, v);
}

double rel_sup(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

}  // namespace

TEST_CASE("radial grid quadrature and calculus") {
  const GridPtr g = grid_to(50.0);
  const auto& r = g->nodes();
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
  for (double w : g->weights()) CHECK(w > 0.0);
  std::vector<double> one(r.size(), 1.0);
  CHECK(std::abs(g->integrate(one) - (50.0 * 50.0 - 1.0) / 2.0) <= 1e-12 * 1249.5);
  const RadialProfile f = sample(g, [](double s) { return std::exp(-s) * cplx(std::cos(s), std::sin(2 * s)); });
  const auto d = g->derivative(f.values);
  double err = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double s = r[i];
    const cplx ex = -std::exp(-s) * cplx(std::cos(s), std::sin(2 * s)) +
                    std::exp(-s) * cplx(-std::sin(s), 2 * std::cos(2 * s));
    err = std::max(err, std::abs(d[i] - ex));
  }
  CHECK(err < 1e-10);
  const auto C = g->cumulative(f.values), B = g->cumulative_from_right(f.values);
  CHECK(std::abs(C.back() - g->integrate_dr(f.values)) < 1e-14);
  CHECK(std::abs(B.front() - g->integrate_dr(f.values)) < 1e-14);
  CHECK(std::abs(f.at(3.3) - std::exp(-3.3) * cplx(std::cos(3.3), std::sin(6.6))) < 1e-12);
  CHECK_THROWS_AS(RadialGrid({1.0, 1.0}, 16), ValidationError);
  const std::string csv = profile_csv(f);
  CHECK(csv.rfind("r,re,im\n", 0) == 0);
}

TEST_CASE("project_mode examples") {
  const GridPtr g = grid_to(10.0, 1.0);
  FieldSampler U = [](double r, double) { return std::array<cplx, 2>{0.0, 1.0 / r}; };
  const ModeField u0 = project_mode(U, 0, g);
  const ModeField u1 = project_mode(U, 1, g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(std::abs(u0.vtheta.values[i] - 1.0 / g->nodes()[i]) < 1e-14);
    CHECK(std::abs(u0.vr.values[i]) < 1e-15);
  }
  CHECK(u1.vtheta.sup_norm() < 1e-15);
  CHECK(mode_rot(u0).sup_norm() < 1e-10);

  FieldSampler h = [](double, double t) { return std::array<cplx, 2>{std::exp(I1 * t), 0.0}; };
  CHECK(std::abs(project_mode(h, 1, g).vr.values[5] - 1.0) < 1e-14);
  CHECK(project_mode(h, -1, g).vr.sup_norm() < 1e-15);

  // degree-3 trigonometric polynomial with known coefficients
  const cplx c[7] = {{0.3, 0.1}, {-1.0, 0.2}, {0.5, 0.5}, {2.0, -1.0}, {0.1, 0.9}, {-0.4, 0.0}, {0.0, 0.7}};
  FieldSampler p = [&](double r, double t) {
    cplx s = 0.0;
    for (int n = -3; n <= 3; ++n) s += c[n + 3] * std::pow(r, -std::abs(n)) * std::exp(I1 * double(n) * t);
    return std::array<cplx, 2>{s, 2.0 * s};
  };
  for (int n = -3; n <= 3; ++n) {
    const ModeField m = project_mode(p, n, g);
    const double r = g->nodes()[7];
    CHECK(std::abs(m.vr.values[7] - c[n + 3] * std::pow(r, -std::abs(n))) < 1e-12);
    CHECK(std::abs(m.vtheta.values[7] - 2.0 * c[n + 3] * std::pow(r, -std::abs(n))) < 1e-12);
  }
  CHECK_THROWS_AS(project_mode(p, 3, g, 8), ValidationError);
  FieldSampler bad = [](double, double) { return std::array<cplx, 2>{NAN, 0.0}; };
  CHECK_THROWS_AS(project_mode(bad, 1, g), ValidationError);
}

TEST_CASE("mode_div and mode_rot examples") {
  const GridPtr g = grid_to(10.0, 1.0);
  const RadialProfile zero(g);
  const ModeField flux(0, sample(g, [](double r) { return cplx(1.0 / r); }), zero);
  CHECK(mode_div(flux).sup_norm() < 1e-10);
  const ModeField swirl(0, zero, sample(g, [](double r) { return cplx(std::sin(r)); }));
  CHECK(mode_div(swirl).sup_norm() == 0.0);
  // grad(r cos theta) = e_x, mode 1: (1/2, i/2)
  const ModeField ex(1, sample(g, [](double) { return cplx(0.5); }), sample(g, [](double) { return cplx(0.0, 0.5); }));
  CHECK(mode_rot(ex).sup_norm() < 1e-12);
}

TEST_CASE("gradient energy: Parseval and the (|n|-1)^2 lower bound") {
  std::mt19937_64 rng(7);
  const GridPtr g = grid_to(20.0, 0.5);
  // band-limited field with modes -2..2; direct theta quadrature of |grad v|^2
  std::map<int, std::pair<Bumps, Bumps>> modes;
  for (int n = -2; n <= 2; ++n) modes[n] = {random_bumps(rng), random_bumps(rng)};
  double sum_modes = 0.0;
  for (auto& [n, ab] : modes) {
    ModeField m(n, sample(g, ab.first), sample(g, ab.second));
    sum_modes += grad_energy(m);
  }
  const int nt = 64;
  std::vector<double> dens(g->size(), 0.0);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = g->nodes()[i];
    for (int j = 0; j < nt; ++j) {
      const double t = 2 * pi * j / nt;
      cplx vr = 0, vt = 0, dvr = 0, dvt = 0, tvr = 0, tvt = 0;
      for (auto& [n, ab] : modes) {
        const cplx e = std::exp(I1 * double(n) * t);
        vr += ab.first(r) * e;
        vt += ab.second(r) * e;
        dvr += ab.first.d(r) * e;
        dvt += ab.second.d(r) * e;
        tvr += I1 * double(n) * ab.first(r) * e;
        tvt += I1 * double(n) * ab.second(r) * e;
      }
      dens[i] += (std::norm(dvr) + std::norm(dvt) + std::norm((tvr - vt) / r) + std::norm((tvt + vr) / r)) *
                 (2 * pi / nt);
    }
  }
  const double direct = g->integrate(dens) / (2 * pi);
  CHECK(std::abs(direct - sum_modes) <= 1e-10 * direct);

  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::array<int, 3>{2, 3, 5}[trial % 3];
    const Bumps a = random_bumps(rng), b = random_bumps(rng);
    const ModeField m(n, sample(g, a), sample(g, b));
    CHECK(grad_energy(m) >= grad_energy_lower(m) * (1 - 1e-12));
    if (n == 2) CHECK(grad_energy(m) >= weighted_energy(m));
  }
  const ModeField z(1, RadialProfile(g), RadialProfile(g));
  CHECK(grad_energy(z) == 0.0);
}

TEST_CASE("angular derivative identity") {
  // x_perp . grad v - v_perp has modes i n P_n v
  std::mt19937_64 rng(11);
  const GridPtr g = grid_to(12.0, 1.0);
  std::map<int, std::pair<Bumps, Bumps>> modes;
  for (int n = -2; n <= 2; ++n) modes[n] = {random_bumps(rng), random_bumps(rng)};
  auto cart = [&](double x, double y) {
    const double r = std::hypot(x, y), t = std::atan2(y, x);
    cplx vr = 0, vt = 0;
    for (auto& [n, ab] : modes) {
      const cplx e = std::exp(I1 * double(n) * t);
      vr += ab.first(r) * e;
      vt += ab.second(r) * e;
    }
    return std::array<cplx, 2>{vr * std::cos(t) - vt * std::sin(t), vr * std::sin(t) + vt * std::cos(t)};
  };
  FieldSampler lhs = [&](double r, double t) {
    const double x = r * std::cos(t), y = r * std::sin(t), h = 1e-3;
    // x_perp . grad = -y d/dx + x d/dy, fourth-order differences
    auto dd = [&](double dx, double dy) {
      std::array<cplx, 2> out{};
      const auto p1 = cart(x + h * dx, y + h * dy), m1 = cart(x - h * dx, y - h * dy);
      const auto p2 = cart(x + 2 * h * dx, y + 2 * h * dy), m2 = cart(x - 2 * h * dx, y - 2 * h * dy);
      for (int k = 0; k < 2; ++k) out[k] = (8.0 * (p1[k] - m1[k]) - (p2[k] - m2[k])) / (12 * h);
      return out;
    };
    const auto gx = dd(1, 0), gy = dd(0, 1), v = cart(x, y);
    std::array<cplx, 2> w{-y * gx[0] + x * gy[0] + v[1], -y * gx[1] + x * gy[1] - v[0]};
    // back to polar components
    return std::array<cplx, 2>{w[0] * std::cos(t) + w[1] * std::sin(t), -w[0] * std::sin(t) + w[1] * std::cos(t)};
  };
  for (int n = -2; n <= 2; ++n) {
    const ModeField m = project_mode(lhs, n, g, 64);
    const auto& ab = modes[n];
    double err = 0.0;
    for (std::size_t i = 0; i < g->size(); i += 7) {
      const double r = g->nodes()[i];
      err = std::max(err, std::abs(m.vr.values[i] - I1 * double(n) * ab.first(r)));
      err = std::max(err, std::abs(m.vtheta.values[i] - I1 * double(n) * ab.second(r)));
    }
    CHECK(err < 1e-9);
  }
}

TEST_CASE("Theta(T)") {
  for (double T : {std::exp(1.0) * 1.001, 10.0, 100.0, 1e6}) {
    const ThetaCheck c = theta_bounds(T);
    CHECK(c.holds);
    CHECK(std::abs(theta_of(T) - boost::math::expint(1, 1.0 / T)) < 1e-10);
  }
  const double beta = 0.05, T = std::exp(1.0 / (12 * beta));
  CHECK(3 * beta * theta_of(T) <= 0.25);
  CHECK(std::abs(3 * beta * std::log(T) - 0.25) < 1e-12);
  CHECK_THROWS_AS(theta_of(2.0), ValidationError);
}

TEST_CASE("Biot-Savart identities on random vorticities") {
  std::mt19937_64 rng(3);
  const GridPtr g = grid_to(40.0, 0.4);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 3;
    const Bumps b = random_bumps(rng);
    const VorticityMode w{n, sample(g, b)};
    const StreamFunction s = stream_full(w);
    CHECK(s.psi.values[0] == 0.0);
    const ModeField v = velocity(w);
    const RadialProfile div = mode_div(v), rot = mode_rot(v);
    const double vs = std::max(v.vr.sup_norm(), v.vtheta.sup_norm());
    CHECK(div.sup_norm() <= 1e-6 * vs);
    CHECK(rel_sup(rot.values, w.omega.values) <= 1e-6);
    CHECK(std::abs(v.vr.values[0]) <= 1e-6 * vs);
  }
  // streamfunction ODE for n = 2
  const Bumps b = random_bumps(rng);
  const VorticityMode w{2, sample(g, b)};
  const RadialProfile psi = stream(w);
  const auto d1 = g->derivative(psi.values), d2 = g->derivative(d1);
  double res = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = g->nodes()[i];
    res = std::max(res, std::abs(-d2[i] - d1[i] / r + 4.0 / (r * r) * psi.values[i] - w.omega.values[i]));
  }
  CHECK(res <= 1e-6 * w.omega.sup_norm());
  // linearity
  const Bumps b2 = random_bumps(rng);
  const cplx a1(0.3, -1.2), a2(2.0, 0.5);
  const VorticityMode w1{1, sample(g, b)}, w2{1, sample(g, b2)};
  VorticityMode wc{1, RadialProfile(g)};
  for (std::size_t i = 0; i < g->size(); ++i) wc.omega.values[i] = a1 * w1.omega.values[i] + a2 * w2.omega.values[i];
  const ModeField v1 = velocity(w1), v2 = velocity(w2), vc = velocity(wc);
  std::vector<cplx> lin(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) lin[i] = a1 * v1.vtheta.values[i] + a2 * v2.vtheta.values[i];
  CHECK(rel_sup(vc.vtheta.values, lin) <= 1e-12);
  CHECK(stream(VorticityMode{1, RadialProfile(g)}).sup_norm() == 0.0);
}

TEST_CASE("Biot-Savart tail checks") {
  const GridPtr g = grid_to(15.0, 0.5);
  const VorticityMode slow{1, sample(g, [](double r) { return cplx(1.0 / (r * r)); })};
  CHECK_THROWS_AS(stream_full(slow), NumericalError);
  // rotation-form input avoids the conditionally convergent integral
  const GridPtr g2 = grid_to(40.0, 0.5);
  Bumps a, b;
  a.c = {4.0};
  a.w = {1.0};
  a.a = {1.0};
  b.c = {5.0};
  b.w = {0.7};
  b.a = {cplx(0.0, 2.0)};
  const ModeField u(1, sample(g2, a), sample(g2, b));
  const StreamFunction s1 = stream_full(u);
  const StreamFunction s2 = stream_full(VorticityMode{1, mode_rot(u)});
  CHECK(std::abs(s1.d_const - s2.d_const) < 1e-10);
}
