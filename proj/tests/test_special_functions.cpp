#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>

#include "esr/special_functions.hpp"
#include "oracles.hpp"

using namespace esr;

TEST_CASE("order_of") {
  const Order o = order_of(0.1, 1);
  CHECK(std::abs(o.mu - std::sqrt(cplx(1.0, 0.1))) < 1e-14);
  CHECK(std::abs(o.mu * o.mu - cplx(1.0, 0.1)) <= 1e-14 * std::abs(cplx(1.0, 0.1)));
  CHECK(std::abs(o.mu.real() - 1.00125) < 1e-4);
  CHECK(std::abs(o.zeta - (o.mu - 1.0)) < 1e-15);
  const Order z = order_of(0.0, 1);
  CHECK(z.mu == cplx(1.0, 0.0));
  const Order m = order_of(0.2, -1);
  CHECK(m.mu.real() > 0.0);
  CHECK(m.mu.imag() < 0.0);
  for (double b : {0.001, 0.01, 0.1, 0.2, 0.3}) {
    const Order ob = order_of(b, 1);
    CHECK(std::abs(ob.mu.real() - 1.0 - b * b / 8.0) <= b * b * b * b);
    CHECK(std::abs(ob.mu.imag() - b / 2.0) <= b * b * b);
  }
  CHECK_THROWS_AS(order_of(1.0, 1), ValidationError);
  CHECK_THROWS_AS(order_of(-0.1, 1), ValidationError);
  CHECK_THROWS_AS(order_of(0.1, 2), ValidationError);
  CHECK_THROWS_AS(order_of(5e-4, 1), ValidationError);
}

TEST_CASE("gamma_c") {
  CHECK(std::abs(gamma_c(1.0) - 1.0) < 1e-15);
  CHECK(std::abs(gamma_c(0.5) - std::sqrt(pi)) < 1e-14);
  CHECK(oracle::rel(gamma_c(cplx(1.00125, 0.05)), cplx(0.996821950957874353552, -0.028624844123098291607)) <
        1e-14);
  double worst = 0.0;
  for (double x = -4.9; x <= 5.0; x += 0.37)
    for (double y = -5.0; y <= 5.0; y += 0.41) {
      const cplx z(x, y);
      if (std::abs(y) < 0.05 && std::abs(x - std::round(x)) < 0.05 && x < 0.5) continue;
      worst = std::max(worst, oracle::rel(gamma_c(z), oracle::gamma(z)));
    }
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(gamma_c(cplx(-2.0, 1e-9)), ValidationError);
  CHECK_THROWS_AS(gamma_c(0.0), ValidationError);
  CHECK(oracle::rel(rgamma_c(cplx(2.5, 1.0)) * gamma_c(cplx(2.5, 1.0)), 1.0) < 1e-14);
}

TEST_CASE("bessel values against frozen high-precision references") {
  struct Row {
    double nr, ni, zr, zi, ir, ii, kr, ki;
  };
  const Row rows[] = {
      {1.0012461141278124, 0.04993777183700244, 2.0, 0.0, 1.589531593331147, -0.049967956426002415,
       0.1398394077607249, 0.002847194878935703},
      {1.0012461141278124, 0.04993777183700244, 0.3, 0.2, 0.1546356595283, 0.08383845005393067,
       2.1538072399666435, -1.5206336888136305},
      {1.0012461141278124, 0.04993777183700244, 15.0, 5.0, 42021.63101609816, -317368.1156145163,
       4.314329095082785e-08, 8.871353653060253e-08},
      {0.00124611412781249, 0.04993777183700244, 0.05, 0.02, 0.968873038862685, -0.14731248710727926,
       3.0237034604023596, -0.3727726585192477},
      {2.0012461141278126, 0.04993777183700244, 30.0, -10.0, -649553358693.5508, 303197349000.6644,
       -1.6006361816926523e-14, -1.5130141708218038e-14},
      {1.0109477362581745, 0.14837562281428682, 7.0, 3.0, -141.20953984109025, 50.09396401547027,
       -0.0004345972707439629, 2.6523482404770976e-05},
  };
  for (const Row& r : rows) {
    const cplx nu(r.nr, r.ni), z(r.zr, r.zi);
    const BesselValue i = bessel_i(nu, z), k = bessel_k(nu, z);
    CHECK_FALSE(i.scaled);
    CHECK(oracle::rel(i.value, cplx(r.ir, r.ii)) < 1e-12);
    CHECK(oracle::rel(k.value, cplx(r.kr, r.ki)) < 1e-12);
    CHECK(i.est_abs_error >= 0.0);
    CHECK(k.est_abs_error >= 0.0);
  }
}

TEST_CASE("bessel values against quadrature oracles") {
  const cplx mus[] = {order_of(0.001, 1).mu, order_of(0.05, 1).mu, order_of(0.3, -1).mu};
  const cplx zs[] = {{0.01, 0.0}, {0.5, 0.3}, {1.9, -1.0}, {3.0, 2.0}, {11.0, -4.0}, {13.0, 6.0},
                     {19.0, 2.0}, {25.0, -9.0}, {45.0, 10.0}};
  for (const cplx& mu : mus)
    for (const cplx& z : zs)
      for (const cplx nu : {mu, mu + 1.0, mu - 1.0}) {
        CAPTURE(nu);
        CAPTURE(z);
        CHECK(oracle::rel(bessel_k(nu, z).value, oracle::bessel_k(nu, z)) < 1e-11);
        CHECK(oracle::rel(bessel_i(nu, z).value, oracle::bessel_i(nu, z)) < 1e-11);
      }
}

TEST_CASE("real orders against boost") {
  for (double nu : {0.0, 1.0, 2.0, 1.5, 0.5})
    for (double x : {0.001, 0.2, 1.0, 2.0, 5.0, 12.5, 19.0, 21.0, 40.0}) {
      CAPTURE(nu);
      CAPTURE(x);
      CHECK(oracle::rel(bessel_i(nu, x).value, boost::math::cyl_bessel_i(nu, x)) < 1e-13);
      CHECK(oracle::rel(bessel_k(nu, x).value, boost::math::cyl_bessel_k(nu, x)) < 1e-13);
    }
  CHECK(std::abs(bessel_k(1.0, 1.0).value - 0.6019) < 1e-4);
  CHECK(bessel_i(1.0, 0.0).value == 0.0);
  CHECK(std::abs(bessel_i(1.0, 0.01).value - 0.005000062500260417) < 1e-16);
  // half-integer closed forms
  for (double x : {0.3, 2.0, 9.0}) {
    const double k32 = std::sqrt(pi / (2 * x)) * std::exp(-x) * (1 + 1 / x);
    const double i32 = std::sqrt(2 / (pi * x)) * (std::cosh(x) - std::sinh(x) / x);
    CHECK(oracle::rel(bessel_k(1.5, x).value, k32) < 1e-13);
    CHECK(oracle::rel(bessel_i(1.5, x).value, i32) < 1e-13);
  }
  CHECK(wronskian_residual(1.5, 2.0) <= 1e-10);
}

TEST_CASE("wronskian") {
  CHECK(wronskian_residual(order_of(0.1, 1).mu, 1.0) <= 1e-9);
  CHECK(wronskian_residual(order_of(0.05, 1).mu, 10.0) <= 1e-9);
  CHECK(wronskian_residual(order_of(0.1, 1).mu, 2.0) <= 1e-9);
}

TEST_CASE("regime continuity and conjugate symmetry") {
  const BesselOrder b(order_of(0.1, 1).mu);
  for (double arg : {0.0, 0.6, -1.1}) {
    const cplx u = std::polar(1.0, arg);
    CHECK(oracle::rel(b.i_series(12.0 * u), b.i_integral(12.0 * u)) < 1e-9);
    CHECK(oracle::rel(b.i_integral(20.0 * u), b.i_asymptotic(20.0 * u)) < 1e-9);
    CHECK(oracle::rel(b.k_series(2.0 * u), b.k_integral(2.0 * u)) < 1e-9);
    CHECK(oracle::rel(b.k_integral(20.0 * u), b.k_asymptotic(20.0 * u)) < 1e-9);
  }
  BesselMethod how;
  b.i_scaled(5.0, &how);
  CHECK(how == BesselMethod::series);
  b.i_scaled(15.0, &how);
  CHECK(how == BesselMethod::integral);
  b.k_scaled(30.0, &how);
  CHECK(how == BesselMethod::asymptotic);
  const cplx mu = order_of(0.2, 1).mu;
  for (const cplx z : {cplx(0.4, 0.2), cplx(8.0, 3.0), cplx(30.0, -7.0)}) {
    CHECK(oracle::rel(bessel_i(std::conj(mu), std::conj(z)).value, std::conj(bessel_i(mu, z).value)) < 1e-14);
    CHECK(oracle::rel(bessel_k(std::conj(mu), std::conj(z)).value, std::conj(bessel_k(mu, z).value)) < 1e-14);
  }
}

TEST_CASE("recurrences and small-argument behaviour") {
  const cplx mu = order_of(0.1, 1).mu;
  const cplx z(1.3, 0.4);
  const double h = 1e-4;
  auto I = [&](cplx nu, cplx x) { return bessel_i(nu, x).value; };
  auto K = [&](cplx nu, cplx x) { return bessel_k(nu, x).value; };
  const cplx dI = (I(mu, z + h) - I(mu, z - h)) / (2 * h);
  const cplx dK = (K(mu, z + h) - K(mu, z - h)) / (2 * h);
  CHECK(oracle::rel(dI, mu / z * I(mu, z) + I(mu + 1.0, z)) < 1e-8);
  CHECK(oracle::rel(dK, -mu / z * K(mu, z) - K(mu - 1.0, z)) < 1e-8);
  // K_mu(z) - Gamma(mu)/2 (z/2)^{-mu} = O(|z|^{2 - Re mu} log)
  for (double x : {1e-2, 1e-3}) {
    const cplx lead = gamma_c(mu) / 2.0 * std::pow(cplx(x / 2), -mu);
    const double rem = std::abs(K(mu, x) - lead);
    CHECK(rem <= 2.0 * std::pow(x, 2 - mu.real()) * (1 + std::abs(std::log(x))));
  }
  for (double x : {10.0, 30.0, 50.0}) CHECK(std::abs(K(mu, x)) <= 2.0 * std::exp(-x) / std::sqrt(x));
}

TEST_CASE("overflow guard and cancellation alarm") {
  const BesselValue i = bessel_i(order_of(0.1, 1).mu, cplx(800.0, 1.0));
  CHECK(i.scaled);
  CHECK(std::isfinite(std::abs(i.value)));
  const BesselValue k = bessel_k(order_of(0.1, 1).mu, cplx(800.0, 1.0));
  CHECK(k.scaled);
  CHECK_THROWS_AS(bessel_k(cplx(1.0 + 1e-8, 0.0), cplx(0.5, 0.0)), NumericalError);
}
