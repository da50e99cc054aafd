#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>

#include "esr/resolvent.hpp"
#include "esr/spectral_scan.hpp"
#include "oracles.hpp"

using namespace esr;

TEST_CASE("scan spec validation") {
  ScanSpec s;
  s.betas = {0.2};
  s.rays = {0.0};
  s.sector_epsilon = 0.0;
  CHECK_THROWS_AS(scan_fn(s), ValidationError);
  s.sector_epsilon = pi / 4;
  s.rays = {2.5};
  CHECK_THROWS_AS(scan_fn(s), ValidationError);
  s.rays = {0.0};
  s.log10_max = 0.5;
  CHECK_THROWS_AS(scan_fn(s), ValidationError);
  s.log10_max.reset();
  s.log10_min = -400.0;
  CHECK_THROWS_AS(scan_fn(s), ValidationError);
  CHECK(sector_rays(5, pi / 4).front() == doctest::Approx(-3 * pi / 4));
  CHECK(sector_rays(5, pi / 4)[2] == 0.0);
}

TEST_CASE("empty ray list gives an empty report") {
  ScanSpec s;
  s.betas = {0.2};
  const ScanReport r = scan_fn(s);
  CHECK(r.rows.empty());
  CHECK(scan_csv(r) == "beta,re_lambda,im_lambda,abs_Fn,normalized,model_abs,model_err\n");
}

TEST_CASE("Stokes limit against K_0") {
  ScanSpec s;
  s.betas = {0.0};
  s.rays = {0.0};
  s.log10_min = -10.0;
  s.log10_max = -1.0;
  s.points_per_decade = 2;
  for (const ScanRow& r : scan_fn(s).rows) {
    const double k = std::sqrt(r.lambda.real());
    CHECK(std::abs(r.abs_Fn - boost::math::cyl_bessel_k(0, k) / k) <= 1e-8 * r.abs_Fn);
    // leading small-k term of K_0(k) / k
    CHECK(std::abs(r.model_abs - std::abs(-(euler_gamma + std::log(k / 2)) / k)) <= 1e-12 * r.model_abs);
  }
}

TEST_CASE("lower bound on the normalized kernel") {
  ScanSpec s;
  s.betas = {0.2};
  s.rays = sector_rays(5, pi / 4);
  const ScanReport r = scan_fn(s);
  CHECK(r.rows.size() == 5 * 75);  // log10|lambda| in [-12, log10(0.2^4)] at 8 per decade
  CHECK(r.zero_flags == 0);
  CHECK(r.failures == 0);
  CHECK(r.c0 > 0.0);
  CHECK(r.lower_bound_holds());
  for (const auto& row : r.rows) CHECK(row.normalized > 0.0);
  s.points_per_decade = 16;
  s.rays = sector_rays(9, pi / 4);
  const ScanReport r2 = scan_fn(s);
  CHECK(std::abs(r2.c0 - r.c0) <= 0.05 * r.c0);
}

TEST_CASE("conjugation pairs n with -n") {
  for (double beta : {0.1, 0.3})
    for (cplx lam : {cplx(1e-5, 3e-5), cplx(-2e-3, 1e-3), cplx(1e-9, -1e-10)}) {
      const ScanRow a = scan_sample(beta, lam, 1), b = scan_sample(beta, std::conj(lam), -1);
      CHECK(std::abs(a.abs_Fn - b.abs_Fn) <= 1e-12 * a.abs_Fn);
      const cplx fa = f_n_kernel(make_query(lam, beta, 1)).value;
      const cplx fb = f_n_kernel(make_query(std::conj(lam), beta, -1)).value;
      CHECK(oracle::rel(fb, std::conj(fa)) <= 1e-12);
    }
}

TEST_CASE("expansion remainder") {
  // zeta -> 0: exp(zeta gamma(zeta)) = 1 + gamma zeta + O(zeta^2)
  const cplx z(1e-6, 2e-6);
  CHECK(std::abs(exp_zeta_gamma(z) - (1.0 + euler_gamma * z)) < 1e-10);
  CHECK(exp_zeta_gamma(0.0) == cplx(1.0));

  // remainder from an independent series evaluation of F at lambda = 0.01, beta = 0.1
  const double beta = 0.1;
  const cplx lam = 0.01;
  const Order o = order_of(beta, 1);
  const cplx k = std::sqrt(lam), zeta = o.zeta;
  const cplx F = oracle::kernel_series(o.mu, k);
  const cplx eg = (pi * zeta / 2.0) / (std::sin(pi * zeta / 2.0) * oracle::gamma(1.0 + zeta));
  const cplx p = std::pow(k / 2.0, zeta);
  const double R = std::abs(zeta * k * p * F / oracle::gamma(1.0 + zeta) - 1.0 + eg * p);
  CHECK(std::abs(expansion_check(beta, lam) - R) < 1e-10);
  const RemainderFit fit = fit_remainder(beta, 0.0, -1.0, 2.0);
  CHECK(R <= fit.c1_full * std::pow(std::abs(lam), o.mu.real() / 2.0) * (1 + 1e-9));
  CHECK(fit.stable());
  for (double arg : {-2.0, 1.0}) CHECK(fit_remainder(0.25, arg, std::log10(0.4), 2.0).stable());
  // with gamma(zeta) cut to the Euler constant the O(zeta^2) term does not decay
  CHECK_FALSE(fit_remainder(0.25, 0.0, std::log10(0.4), 2.0, 8, false).stable());
  CHECK_THROWS_AS(expansion_check(beta, 0.6), ValidationError);
}

TEST_CASE("per-sample failures are not fatal") {
  const ScanRow r = scan_sample(0.2, cplx(-1.0, 0.0), 1);
  CHECK_FALSE(r.error.empty());
  ScanReport rep;
  rep.rows.push_back(r);
  CHECK(scan_csv(rep).find("nan") != std::string::npos);
}

TEST_CASE("nearly-resonance location") {
  CHECK_THROWS_AS(locate_resonance(0.1), ValidationError);
  const ResonanceSummary s = resonance_report({0.2, 0.25, 0.35}, 1, 1, 0);
  REQUIRE(s.points.size() == 3);
  const ResonancePoint& p = s.points[1];
  // -log|lambda*| sits between the 1/beta and 1/beta^2 scales
  CHECK(p.neg_log * p.beta >= 1.0);
  CHECK(p.neg_log * p.beta * p.beta <= 50.0);
  CHECK(s.points[0].neg_log > s.points[2].neg_log);
  CHECK(s.monotone);
  CHECK(s.exponent >= 0.9);
  CHECK(s.exponent <= 2.1);
  // the dip is a local minimum of N along the positive axis
  for (double f : {0.9, 1.1}) {
    const ScanRow r = scan_sample(0.25, std::pow(p.lambda_star.real(), f), 1);
    CHECK(r.normalized > p.g_min);
  }
  CHECK(resonance_json(s).find("\"c_prime\"") != std::string::npos);
}
