#include "esr/special_functions.hpp"

#include <cmath>
#include <limits>

#include "esr/quadrature.hpp"

namespace esr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,
                                -1259.1392167224028,  771.32342877765313,
                                -176.61502916214059,  12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6,
                                1.5056327351493116e-7};

cplx gamma_lanczos(cplx z) {
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
  cplx t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * pi) * std::exp((z + 0.5) * std::log(t) - t) * x;
}

// Hankel coefficients a_k(nu) up to the point where |a_k / z^k| stops decreasing.
template <class Fn>
double hankel_sum(cplx nu, cplx z, Fn&& accumulate) {
  const cplx four_nu2 = 4.0 * nu * nu;
  cplx term = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (int k = 0; k < 120; ++k) {
    if (k > 0) {
      double odd = 2.0 * k - 1.0;
      term *= (four_nu2 - odd * odd) / (8.0 * k * z);
    }
    double mag = std::abs(term);
    if (k > 0 && mag > prev) break;
    accumulate(k, term);
    last = mag;
    if (mag < 1e-18) break;
    prev = mag;
  }
  return last;
}

}  // namespace

const char* to_string(BesselMethod m) {
  switch (m) {
    case BesselMethod::series: return "series";
    case BesselMethod::integral: return "integral";
    case BesselMethod::asymptotic: return "asymptotic";
  }
  return "unknown";
}

Order order_of(double beta, int n) {
  if (std::abs(n) != 1) throw ValidationError("order_of: only |n| = 1 is supported");
  if (!(beta >= 0.0) || beta >= 1.0) throw ValidationError("order_of: beta must lie in [0, 1)");
  if (beta > 0.0 && beta < 1e-3)
    throw ValidationError("order_of: beta below the 1e-3 floor (use beta = 0 for the limit)");
  Order o;
  o.beta = beta;
  o.n = n;
  const cplx mu2(double(n) * n, n * beta);
  o.mu = std::sqrt(mu2);
  o.zeta = (mu2 - 1.0) / (o.mu + 1.0);
  return o;
}

cplx gamma_c(cplx z) {
  const double k = std::round(z.real());
  if (k <= 0.0 && std::abs(z - k) < 1e-8)
    throw ValidationError("gamma_c: argument within 1e-8 of a pole");
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma_lanczos(1.0 - z));
  return gamma_lanczos(z);
}

cplx rgamma_c(cplx z) {
  if (z.real() < 0.5) return std::sin(pi * z) * gamma_lanczos(1.0 - z) / pi;
  return 1.0 / gamma_lanczos(z);
}

BesselOrder::BesselOrder(cplx nu) : BesselOrder(int(std::lround(nu.real())), nu - std::round(nu.real())) {}

BesselOrder::BesselOrder(int base, cplx frac)
    : base_(base), frac_(frac), nu_(double(base) + frac) {
  rg1f_ = rgamma_c(1.0 + frac);
  rg1mf_ = rgamma_c(1.0 - frac);
  knu_ = nu_.real() < 0.0 ? -nu_ : nu_;

  // K integral nodes in v, with t = v^2 in the exponential-decay integral.
  const double a0 = 1.0 / 256.0;
  Rule kr;
  for (double a = a0; a < 1.0; a *= 2.0) append_gauss(kr, a, 2.0 * a, 10);
  for (int j = 1; j < 7; ++j) append_gauss(kr, j, j + 1.0, 12);
  const cplx two_nu = 2.0 * knu_;
  for (std::size_t i = 0; i < kr.x.size(); ++i) {
    const double v = kr.x[i];
    k_w_.push_back(kr.w[i] * 2.0 * std::exp(two_nu * std::log(v) - v * v));
    k_v2_.push_back(v * v);
  }
  const double la0 = std::log(a0);
  for (int j = 0; j < 3; ++j) {
    const cplx p = two_nu + (2.0 * j + 1.0);
    k_head_[j] = 2.0 * std::exp(p * la0) / p;
  }
  k_pref_ = std::sqrt(pi / 2.0) * rgamma_c(knu_ + 0.5);

  // Poisson integral nodes in theta.
  poisson_ok_ = nu_.real() > -0.5;
  if (poisson_ok_) {
    const double a = 1.0 / 256.0;
    Rule pr;
    for (double s = a; s < 0.5; s *= 2.0) append_gauss(pr, s, std::min(2.0 * s, 0.5), 10);
    const double lo = 0.5, hi = pi - 0.5;
    const int nmid = int(std::ceil((hi - lo) / 0.25));
    for (int j = 0; j < nmid; ++j)
      append_gauss(pr, lo + (hi - lo) * j / nmid, lo + (hi - lo) * (j + 1) / nmid, 10);
    for (double s = 0.5; s > a * 1.5; s *= 0.5) append_gauss(pr, pi - s, pi - 0.5 * s, 10);
    append_gauss(pr, pi - a, pi, 10);
    for (std::size_t i = 0; i < pr.x.size(); ++i) {
      const double th = pr.x[i];
      const double sh = std::sin(0.5 * th);
      p_cm1_.push_back(-2.0 * sh * sh);
      p_w_.push_back(pr.w[i] * std::exp(2.0 * nu_ * std::log(std::sin(th))));
    }
    const double la = std::log(a);
    for (int j = 0; j < 3; ++j) {
      const cplx p = 2.0 * nu_ + (2.0 * j + 1.0);
      p_head_[j] = std::exp(p * la) / p;
    }
    p_pref_ = rgamma_c(nu_ + 0.5) / std::sqrt(pi);
  }
}

cplx BesselOrder::rg_shift(int m, cplx f, cplx rg1f) const {
  cplx r = rg1f;
  if (m >= 1) {
    for (int i = 1; i < m; ++i) r /= (double(i) + f);
  } else {
    for (int i = m; i <= 0; ++i) r *= (double(i) + f);
  }
  return r;
}

cplx BesselOrder::series_unscaled(int base, cplx frac, cplx rg1f, cplx z, double* err) const {
  const cplx nu = double(base) + frac;
  if (z == 0.0) {
    if (err) *err = 0.0;
    if (nu == 0.0) return 1.0;
    if (nu.real() > 0.0) return 0.0;
    throw ValidationError("bessel series: I_nu(0) is infinite for Re nu <= 0");
  }
  const cplx h = 0.5 * z;
  const cplx h2 = h * h;
  cplx pw = std::exp(nu * std::log(h));
  cplx sum = 0.0;
  double abs_sum = 0.0, last = 0.0;
  cplx rg = 0.0;
  for (int j = 0; j < 1000; ++j) {
    const int m = base + j + 1;
    if (m <= 1 || j == 0) {
      rg = rg_shift(m, frac, rg1f);
    } else {
      rg /= (double(m - 1) + frac);
    }
    const cplx term = pw * rg;
    sum += term;
    abs_sum += std::abs(term);
    last = std::abs(term);
    const double ratio = std::abs(h2) / ((j + 1.0) * std::abs(nu + double(j + 1)));
    if (j > 0 && last <= 1e-17 * std::abs(sum) && ratio < 0.5) break;
    pw *= h2 / double(j + 1);
  }
  if (err) *err = 2.0 * last + 4.0 * kEps * abs_sum;
  return sum;
}

cplx BesselOrder::i_series(cplx z, double* err) const {
  double e = 0.0;
  const cplx v = series_unscaled(base_, frac_, rg1f_, z, &e);
  const cplx s = std::exp(-z);
  if (err) *err = e * std::abs(s);
  return v * s;
}

cplx BesselOrder::i_integral(cplx z, double* err) const {
  if (!poisson_ok_) throw ValidationError("bessel_i: integral form needs Re nu > -1/2");
  // Taylor head of sin^{2nu} e^{z(cos-1)} on the first panel
  const cplx c1 = -0.5 * z - nu_ / 3.0;
  const cplx c2 = z * z / 8.0 + z / 24.0 + z * nu_ / 6.0 + nu_ * nu_ / 18.0 - nu_ / 90.0;
  cplx sum = p_head_[0] + c1 * p_head_[1] + c2 * p_head_[2];
  double abs_sum = std::abs(sum);
  for (std::size_t i = 0; i < p_w_.size(); ++i) {
    const cplx t = p_w_[i] * std::exp(z * p_cm1_[i]);
    sum += t;
    abs_sum += std::abs(t);
  }
  const cplx pref = p_pref_ * std::exp(nu_ * std::log(0.5 * z));
  if (err) *err = 16.0 * kEps * abs_sum * std::abs(pref);
  return pref * sum;
}

cplx BesselOrder::i_asymptotic(cplx z, double* err) const {
  cplx s1 = 0.0, s2 = 0.0;
  const double last = hankel_sum(nu_, z, [&](int k, cplx t) {
    s1 += (k % 2 ? -t : t);
    s2 += t;
  });
  cplx c;
  if (z.imag() > 0.0) {
    c = I1 * std::exp(I1 * pi * nu_);
  } else if (z.imag() < 0.0) {
    c = -I1 * std::exp(-I1 * pi * nu_);
  } else {
    c = -std::sin(pi * nu_);
  }
  const cplx pref = 1.0 / std::sqrt(2.0 * pi * z);
  const cplx e2 = std::exp(-2.0 * z);
  if (err) *err = std::abs(pref) * (last * (1.0 + std::abs(c * e2)) + 4.0 * kEps * std::abs(s1));
  return pref * (s1 + c * e2 * s2);
}

cplx BesselOrder::k_series_integer(cplx z, double* err) const {
  const int n = int(std::lround(knu_.real()));
  const cplx h = 0.5 * z;
  const cplx h2 = h * h;
  const cplx lh = std::log(h);
  cplx part1 = 0.0;
  if (n > 0) {
    double fact_a = 1.0;  // (n-1)!
    for (int i = 2; i < n; ++i) fact_a *= i;
    cplx p = 1.0;
    double fk = 1.0;
    for (int k = 0; k < n; ++k) {
      part1 += (fact_a / fk) * p;
      p *= -h2;
      if (n - k - 1 > 0) fact_a /= (n - k - 1);
      fk *= (k + 1);
    }
    part1 *= 0.5 * std::exp(-double(n) * lh);
  }
  double e_in = 0.0;
  const cplx in = series_unscaled(n, 0.0, 1.0, z, &e_in);
  const cplx part2 = ((n + 1) % 2 ? -1.0 : 1.0) * lh * in;
  double psi_a = -euler_gamma;  // psi(k+1)
  double psi_b = -euler_gamma;  // psi(n+k+1)
  for (int i = 1; i <= n; ++i) psi_b += 1.0 / i;
  double denom = 1.0;
  for (int i = 2; i <= n; ++i) denom *= i;
  cplx p = 1.0, sum3 = 0.0;
  double abs3 = 0.0, last = 0.0;
  for (int k = 0; k < 500; ++k) {
    const cplx t = (psi_a + psi_b) * p / denom;
    sum3 += t;
    abs3 += std::abs(t);
    last = std::abs(t);
    if (k > 2 && last < 1e-17 * std::abs(sum3)) break;
    p *= h2;
    denom *= double(k + 1) * double(n + k + 1);
    psi_a += 1.0 / (k + 1);
    psi_b += 1.0 / (n + k + 1);
  }
  const cplx hn = std::exp(double(n) * lh);
  const cplx part3 = (n % 2 ? -0.5 : 0.5) * hn * sum3;
  const cplx k = part1 + part2 + part3;
  if (err) {
    *err = 4.0 * kEps * (std::abs(part1) + std::abs(part2) + std::abs(hn) * abs3) +
           std::abs(lh) * e_in + std::abs(hn) * last;
  }
  return k;
}

cplx BesselOrder::k_series(cplx z, double* err) const {
  if (z == 0.0) throw ValidationError("bessel_k: K_nu(0) is infinite");
  const cplx ez = std::exp(z);
  if (frac_ == 0.0) {
    double e = 0.0;
    const cplx v = k_series_integer(z, &e);
    if (err) *err = e * std::abs(ez);
    return v * ez;
  }
  const cplx s = ((base_ % 2) ? -1.0 : 1.0) * std::sin(pi * frac_);
  if (std::abs(s) < 1e-6)
    throw NumericalError("bessel_k: order within 1e-6 of an integer (cancellation alarm)");
  double e1 = 0.0, e2 = 0.0;
  const cplx ineg = series_unscaled(-base_, -frac_, rg1mf_, z, &e1);
  const cplx ipos = series_unscaled(base_, frac_, rg1f_, z, &e2);
  const cplx k = 0.5 * pi * (ineg - ipos) / s;
  if (err) *err = (0.5 * pi * (e1 + e2) / std::abs(s) + 4.0 * kEps * std::abs(k)) * std::abs(ez);
  return k * ez;
}

cplx BesselOrder::k_integral(cplx z, double* err) const {
  if (z == 0.0) throw ValidationError("bessel_k: K_nu(0) is infinite");
  const cplx alpha = knu_ - 0.5;
  const cplx x = 1.0 / (2.0 * z);
  const cplx c1 = alpha * x - 1.0;
  const cplx c2 = 0.5 - alpha * x + 0.5 * alpha * (alpha - 1.0) * x * x;
  cplx sum = k_head_[0] + c1 * k_head_[1] + c2 * k_head_[2];
  double abs_sum = std::abs(sum);
  for (std::size_t i = 0; i < k_w_.size(); ++i) {
    const cplx t = k_w_[i] * std::exp(alpha * std::log(1.0 + k_v2_[i] * x));
    sum += t;
    abs_sum += std::abs(t);
  }
  const cplx pref = k_pref_ / std::sqrt(z);
  if (err) *err = 16.0 * kEps * abs_sum * std::abs(pref);
  return pref * sum;
}

cplx BesselOrder::k_asymptotic(cplx z, double* err) const {
  cplx s = 0.0;
  const double last = hankel_sum(knu_, z, [&](int, cplx t) { s += t; });
  const cplx pref = std::sqrt(pi / (2.0 * z));
  if (err) *err = std::abs(pref) * (last + 4.0 * kEps * std::abs(s));
  return pref * s;
}

cplx BesselOrder::i_scaled(cplx z, BesselMethod* how, double* err) const {
  const double az = std::abs(z);
  if (az <= kSeriesRadiusI || (az <= kAsymptoticRadius && !poisson_ok_)) {
    if (how) *how = BesselMethod::series;
    return i_series(z, err);
  }
  if (az <= kAsymptoticRadius) {
    if (how) *how = BesselMethod::integral;
    return i_integral(z, err);
  }
  if (how) *how = BesselMethod::asymptotic;
  return i_asymptotic(z, err);
}

cplx BesselOrder::k_scaled(cplx z, BesselMethod* how, double* err) const {
  const double az = std::abs(z);
  if (az <= kSeriesRadiusK) {
    if (how) *how = BesselMethod::series;
    return k_series(z, err);
  }
  if (az <= kAsymptoticRadius) {
    if (how) *how = BesselMethod::integral;
    return k_integral(z, err);
  }
  if (how) *how = BesselMethod::asymptotic;
  return k_asymptotic(z, err);
}

namespace {

constexpr double kOverflowRe = 700.0;

BesselValue unscale(cplx scaled, double err, BesselMethod how, cplx factor_exp) {
  BesselValue out;
  out.method = how;
  if (factor_exp.real() > kOverflowRe || factor_exp.real() < -kOverflowRe) {
    const cplx ph = std::exp(I1 * factor_exp.imag());
    out.value = scaled * ph;
    out.est_abs_error = err;
    out.scaled = true;
  } else {
    const cplx f = std::exp(factor_exp);
    out.value = scaled * f;
    out.est_abs_error = err * std::abs(f);
  }
  return out;
}

}  // namespace

BesselValue bessel_i(cplx mu, cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !std::isfinite(mu.real()) ||
      !std::isfinite(mu.imag()))
    throw ValidationError("bessel_i: non-finite input");
  BesselOrder o(mu);
  BesselMethod how;
  double err = 0.0;
  const cplx s = o.i_scaled(z, &how, &err);
  return unscale(s, err, how, z);
}

BesselValue bessel_k(cplx mu, cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !std::isfinite(mu.real()) ||
      !std::isfinite(mu.imag()))
    throw ValidationError("bessel_k: non-finite input");
  BesselOrder o(mu);
  BesselMethod how;
  double err = 0.0;
  const cplx s = o.k_scaled(z, &how, &err);
  return unscale(s, err, how, -z);
}

double wronskian_residual(cplx mu, cplx z) {
  BesselOrder o(mu);
  BesselOrder up(o.base() + 1, o.frac());
  BesselOrder dn(o.base() - 1, o.frac());
  const cplx i0 = o.i_scaled(z), i1 = up.i_scaled(z);
  const cplx k0 = o.k_scaled(z), km = dn.k_scaled(z);
  return std::abs(-2.0 * mu * i0 * k0 - z * (i0 * km + i1 * k0) + 1.0);
}

}  // namespace esr
