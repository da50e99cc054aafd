#include "esr/spectral_scan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "esr/parallel.hpp"
#include "esr/resolvent.hpp"

namespace esr {

namespace {

double normalizer(double beta, double abs_lambda) { return std::min(1.0, -beta * beta * std::log(abs_lambda)); }

// beta |F| |lambda|^{Re mu / 2}
double weighted_kernel(const ResolventQuery& q, cplx F) {
  return q.beta * std::abs(F) * std::pow(std::abs(q.lambda), q.order.mu.real() / 2.0);
}

std::vector<double> log_samples(double lo, double hi, int per_decade) {
  const int steps = std::max(0, int(std::lround((hi - lo) * per_decade)));
  std::vector<double> out;
  if (steps == 0) {
    out.push_back(hi);
    return out;
  }
  for (int i = 0; i <= steps; ++i) out.push_back(lo + (hi - lo) * i / steps);
  return out;
}

}  // namespace

std::vector<double> sector_rays(int count, double eps) {
  if (count < 0 || !(eps > 0.0 && eps < pi / 2)) throw ValidationError("sector_rays: bad count or epsilon");
  std::vector<double> out;
  const double top = pi - eps;
  if (count == 1) out.push_back(0.0);
  for (int j = 0; count > 1 && j < count; ++j) out.push_back(-top + 2.0 * top * j / (count - 1));
  return out;
}

void validate(const ScanSpec& s) {
  if (!(s.sector_epsilon > 0.0 && s.sector_epsilon < pi / 2)) throw ValidationError("scan: epsilon must lie in (0, pi/2)");
  if (s.points_per_decade < 1) throw ValidationError("scan: points_per_decade must be positive");
  if (std::abs(s.n) != 1) throw ValidationError("scan: only |n| = 1 is supported");
  if (!std::isfinite(s.log10_min) || s.log10_min < -300.0) throw ValidationError("scan: |lambda| below 1e-300");
  for (double b : s.betas) {
    if (!(b >= 0.0 && b < 0.5)) throw ValidationError("scan: beta must lie in [0, 0.5)");
    const double hi = s.log10_max ? *s.log10_max : 4.0 * std::log10(b);
    if (!(hi < 0.0) || !(hi >= s.log10_min)) throw ValidationError("scan: need log10_min <= log10_max < 0");
  }
  for (double a : s.rays)
    if (!(std::abs(a) <= pi - s.sector_epsilon + 1e-12)) throw ValidationError("scan: ray outside the sector");
}

cplx exp_zeta_gamma(cplx zeta) {
  if (std::abs(zeta) < 1e-300) return 1.0;
  const cplx h = pi * zeta / 2.0;
  return h / std::sin(h) * rgamma_c(1.0 + zeta);
}

ScanRow scan_sample(double beta, cplx lambda, int n, bool exact_gamma) {
  ScanRow row;
  row.beta = beta;
  row.lambda = lambda;
  try {
    const ResolventQuery q = make_query(lambda, beta, n);
    const cplx F = f_n_kernel(q).value;
    const cplx k = q.sqrt_lambda, zeta = q.order.zeta;
    row.abs_Fn = std::abs(F);
    row.zero_flag = row.abs_Fn < kKernelFloor;
    row.normalized = weighted_kernel(q, F) / normalizer(beta, std::abs(lambda));
    const cplx lg = std::log(k / 2.0);
    if (zeta == 0.0) {
      row.model_abs = std::abs(-(euler_gamma + lg) / k);
      row.model_err = 0.0;
    } else {
      const cplx eg = exact_gamma ? exp_zeta_gamma(zeta) : std::exp(zeta * euler_gamma);
      const cplx p = std::exp(zeta * lg);  // (k/2)^zeta
      const cplx g1 = gamma_c(1.0 + zeta);
      const cplx bracket = 1.0 - eg * p;
      row.model_abs = std::abs(g1 / (zeta * k * p) * bracket);
      row.model_err = std::abs(zeta * k * p * F / g1 - bracket);
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

ScanReport scan_fn(const ScanSpec& spec) {
  validate(spec);
  struct Job {
    double beta;
    cplx lambda;
  };
  std::vector<Job> jobs;
  for (double b : spec.betas) {
    const double hi = spec.log10_max ? *spec.log10_max : 4.0 * std::log10(b);
    for (double a : spec.rays)
      for (double x : log_samples(spec.log10_min, hi, spec.points_per_decade))
        jobs.push_back({b, std::polar(std::pow(10.0, x), a)});
  }
  ScanReport rep;
  rep.rows.resize(jobs.size());
  parallel_for(jobs.size(), spec.threads,
               [&](std::size_t i) { rep.rows[i] = scan_sample(jobs[i].beta, jobs[i].lambda, spec.n, spec.exact_gamma); });
  double c0 = INFINITY;
  for (const auto& r : rep.rows) {
    if (!r.error.empty()) {
      ++rep.failures;
      continue;
    }
    if (r.zero_flag) ++rep.zero_flags;
    if (r.beta > 0.0) c0 = std::min(c0, r.normalized);
  }
  rep.c0 = std::isfinite(c0) ? c0 : 0.0;
  return rep;
}

double expansion_check(double beta, cplx lambda, bool exact_gamma, int n) {
  if (!(std::abs(lambda) < 0.5)) throw ValidationError("expansion_check: need |lambda| < 1/2");
  const ScanRow r = scan_sample(beta, lambda, n, exact_gamma);
  if (!r.error.empty()) throw NumericalError("expansion_check: " + r.error);
  return r.model_err;
}

RemainderFit fit_remainder(double beta, double arg, double log10_top, double decades, int per_decade,
                           bool exact_gamma) {
  if (!(decades >= 1.0)) throw ValidationError("fit_remainder: need at least one decade");
  RemainderFit fit;
  fit.beta = beta;
  fit.arg = arg;
  const double re_mu = order_of(beta, 1).mu.real();
  for (double x : log_samples(log10_top - decades, log10_top, per_decade)) {
    const double abs_l = std::pow(10.0, x);
    const double ratio = expansion_check(beta, std::polar(abs_l, arg), exact_gamma) / std::pow(abs_l, re_mu / 2.0);
    fit.c1_full = std::max(fit.c1_full, ratio);
    if (x >= log10_top - 1.0 - 1e-12) fit.c1_top = std::max(fit.c1_top, ratio);
    ++fit.samples;
  }
  return fit;
}

ResonancePoint locate_resonance(double beta, int n) {
  if (!(beta >= 0.15 && beta <= 0.35)) throw ValidationError("resonance: beta must lie in [0.15, 0.35]");
  auto g = [&](double x) {
    const ResolventQuery q = make_query(std::pow(10.0, x), beta, n);
    return weighted_kernel(q, f_n_kernel(q).value) / normalizer(beta, std::pow(10.0, x));
  };
  const double hi = -1.0 / (6.0 * beta * std::log(10.0));
  const auto xs = log_samples(-300.0, hi, 4);
  std::size_t best = 0;
  std::vector<double> gs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    gs[i] = g(xs[i]);
    if (gs[i] < gs[best]) best = i;
  }
  // golden-section refinement inside the neighbouring samples
  double a = xs[best > 0 ? best - 1 : 0], b = xs[std::min(best + 1, xs.size() - 1)];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > 1e-9 * std::max(1.0, std::abs(a))) {
    if (gc < gd) {
      b = d, d = c, gd = gc;
      c = b - ratio * (b - a), gc = g(c);
    } else {
      a = c, c = d, gc = gd;
      d = a + ratio * (b - a), gd = g(d);
    }
  }
  ResonancePoint p;
  p.beta = beta;
  const double x = 0.5 * (a + b);
  p.lambda_star = std::pow(10.0, x);
  p.g_min = std::min({g(x), gs[best]});
  p.neg_log = -x * std::log(10.0);
  return p;
}

ResonanceSummary resonance_report(const std::vector<double>& betas, int n, int threads, int heat_rays,
                                  int heat_per_decade) {
  ResonanceSummary s;
  s.points.resize(betas.size());
  parallel_for(betas.size(), threads, [&](std::size_t i) { s.points[i] = locate_resonance(betas[i], n); });
  s.c_prime = INFINITY;
  for (const auto& p : s.points) {
    s.c_prime = std::min(s.c_prime, p.beta * p.neg_log);
    s.c = std::max(s.c, p.beta * p.beta * p.neg_log);
  }
  if (s.points.empty()) s.c_prime = 0.0;
  for (std::size_t i = 0; i < s.points.size(); ++i)
    for (std::size_t j = 0; j < s.points.size(); ++j)
      if (s.points[i].beta < s.points[j].beta && s.points[i].neg_log <= s.points[j].neg_log) s.monotone = false;
  if (s.points.size() >= 2) {
    double mx = 0, my = 0;
    for (const auto& p : s.points) mx += std::log(p.beta), my += std::log(p.neg_log);
    mx /= s.points.size(), my /= s.points.size();
    double sxy = 0, sxx = 0;
    for (const auto& p : s.points) {
      sxy += (std::log(p.beta) - mx) * (std::log(p.neg_log) - my);
      sxx += std::pow(std::log(p.beta) - mx, 2);
    }
    s.exponent = sxx > 0 ? -sxy / sxx : 0.0;
  }
  if (heat_rays > 0 && !betas.empty()) {
    ScanSpec h;
    h.betas = betas;
    h.sector_epsilon = pi / 4;
    h.log10_min = -300.0;
    h.log10_max = -1.0;
    h.points_per_decade = heat_per_decade;
    h.rays = sector_rays(heat_rays, h.sector_epsilon);
    h.n = n;
    h.threads = threads;
    s.heatmap = scan_fn(h);
  }
  return s;
}

std::string scan_csv(const ScanReport& r) {
  std::ostringstream os;
  os.precision(12);
  os << "beta,re_lambda,im_lambda,abs_Fn,normalized,model_abs,model_err\n";
  for (const auto& row : r.rows) {
    os << row.beta << ',' << row.lambda.real() << ',' << row.lambda.imag() << ',';
    if (row.error.empty())
      os << row.abs_Fn << ',' << row.normalized << ',' << row.model_abs << ',' << row.model_err << '\n';
    else
      os << "nan,nan,nan,nan\n";
  }
  return os.str();
}

std::string resonance_json(const ResonanceSummary& s) {
  nlohmann::ordered_json j;
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : s.points)
    j["points"].push_back({{"beta", p.beta},
                           {"lambda_star", p.lambda_star.real()},
                           {"neg_log_lambda", p.neg_log},
                           {"beta_neg_log", p.beta * p.neg_log},
                           {"beta2_neg_log", p.beta * p.beta * p.neg_log},
                           {"g_min", p.g_min},
                           {"in_annulus", p.beta * s.c_prime <= p.beta * p.beta * p.neg_log + 1e-12 &&
                                              p.beta * p.beta * p.neg_log <= s.c + 1e-12}});
  j["c_prime"] = s.c_prime;
  j["c"] = s.c;
  j["exponent"] = s.exponent;
  j["monotone"] = s.monotone;
  j["heatmap_samples"] = s.heatmap.rows.size();
  j["heatmap_c0"] = s.heatmap.c0;
  return j.dump(2);
}

}  // namespace esr
