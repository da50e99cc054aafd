#include "esr/bounds_harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include <json.hpp>

#include "esr/parallel.hpp"
#include "esr/polar_fourier.hpp"
#include "esr/quadrature.hpp"
#include "esr/resolvent.hpp"
#include "esr/semigroup.hpp"

namespace esr {

const char* to_string(BesselFamily f) {
  switch (f) {
    case BesselFamily::B2: return "B2";
    case BesselFamily::B3: return "B3";
    case BesselFamily::B4: return "B4";
  }
  return "?";
}

namespace {

// Admissible orderings of 1, tau, r and rho = 1 / Re sqrt(lambda).
enum class Regime {
  none,
  tau_r_inner,       // 1 <= tau <= r <= rho
  tau_inner_r_outer, // 1 <= tau <= rho <= r
  tau_r_outer,       // rho <= tau <= r
  tau_inner,         // 1 <= tau <= rho
  tau_outer,         // tau >= rho
  r_tau_inner,       // 1 <= r <= tau <= rho
  r_inner_tau_outer, // 1 <= r <= rho <= tau
  r_tau_outer,       // rho <= r <= tau
  r_inner,           // 1 <= r <= rho
  r_outer,           // r >= rho
};

struct EstimateInfo {
  const char* id;
  BesselFamily family;
  Regime regime;
  bool p_at_least_2;
};

const std::vector<EstimateInfo>& table() {
  using R = Regime;
  using F = BesselFamily;
  static const std::vector<EstimateInfo> t{
      {"B2.est1", F::B2, R::tau_r_inner, false},     {"B2.est2", F::B2, R::tau_inner_r_outer, false},
      {"B2.est3", F::B2, R::tau_r_outer, false},     {"B2.est4", F::B2, R::tau_inner, false},
      {"B2.est5", F::B2, R::tau_outer, false},       {"B3.est1", F::B3, R::tau_inner, false},
      {"B3.est2", F::B3, R::tau_outer, false},       {"B3.est3", F::B3, R::r_tau_inner, false},
      {"B3.est4", F::B3, R::r_inner_tau_outer, false}, {"B3.est5", F::B3, R::r_tau_outer, false},
      {"B4.est1", F::B4, R::none, true},             {"B4.est2", F::B4, R::r_inner, false},
      {"B4.est3", F::B4, R::r_outer, false},         {"B4.est4", F::B4, R::r_inner, false},
      {"B4.est5", F::B4, R::r_outer, false},         {"B4.est6", F::B4, R::r_inner, true},
      {"B4.est7", F::B4, R::r_outer, true},          {"B4.est8", F::B4, R::r_inner, true},
      {"B4.est9", F::B4, R::r_outer, true},
  };
  return t;
}

const EstimateInfo& info_of(const std::string& id) {
  for (const auto& e : table())
    if (id == e.id) return e;
  throw ValidationError("unknown estimate id: " + id);
}

double rho_of(cplx lambda) { return 1.0 / std::sqrt(lambda).real(); }

// Composite Gauss-Legendre on [a, b]: panels grow geometrically from a and never exceed cap.
template <class G>
cplx panel_integral(G&& g, double a, double b, double cap, int refine) {
  if (!(b > a)) return 0.0;
  const Rule& rule = gauss_legendre(16 * refine);
  cplx acc = 0.0;
  for (double lo = a; lo < b;) {
    double hi = std::min({b, lo + std::min(lo, cap)});
    if (b - hi < 1e-9 * b) hi = b;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * half * g(mid + half * rule.x[i]);
    lo = hi;
  }
  return acc;
}

struct Kernels {
  Order order;
  BesselTriple b;
  explicit Kernels(double beta) : order(order_of(beta, 1)), b(order) {}
  cplx K(int shift, cplx z) const {  // K_{mu - shift}
    const BesselOrder& o = shift == 0 ? b.mu : b.mu_minus;
    return o.k_scaled(z) * std::exp(-z);
  }
  cplx I(int shift, cplx z) const {  // I_{mu + shift}
    const BesselOrder& o = shift == 0 ? b.mu : b.mu_plus;
    return o.i_scaled(z) * std::exp(z);
  }
};

bool leq(double a, double b) { return a <= b * (1.0 + 1e-12); }

}  // namespace

std::vector<std::string> estimate_ids(BesselFamily f) {
  std::vector<std::string> out;
  for (const auto& e : table())
    if (e.family == f) out.push_back(e.id);
  return out;
}

void validate_sample(const std::string& id, const BoundSample& s) {
  const EstimateInfo& e = info_of(id);
  if (!(s.beta >= 1e-3 && s.beta < 1.0)) throw ValidationError(id + ": beta must lie in [1e-3, 1)");
  const double mod = std::abs(s.lambda);
  if (!(mod > 0.0 && mod <= 1.0)) throw ValidationError(id + ": need 0 < |lambda| <= 1");
  if (!(std::abs(std::arg(s.lambda)) < pi)) throw ValidationError(id + ": lambda on the negative axis");
  if (e.family != BesselFamily::B4 && s.k != 0 && s.k != 1) throw ValidationError(id + ": k must be 0 or 1");
  if (e.family == BesselFamily::B4 && !(s.p > (e.p_at_least_2 ? 2.0 - 1e-12 : 1.0)))
    throw ValidationError(id + (e.p_at_least_2 ? ": needs p >= 2" : ": needs p > 1"));
  const double rho = rho_of(s.lambda), r = s.r, t = s.tau;
  bool ok = true;
  switch (e.regime) {
    case Regime::none: break;
    case Regime::tau_r_inner: ok = leq(1, t) && leq(t, r) && leq(r, rho); break;
    case Regime::tau_inner_r_outer: ok = leq(1, t) && leq(t, rho) && leq(rho, r); break;
    case Regime::tau_r_outer: ok = leq(rho, t) && leq(t, r); break;
    case Regime::tau_inner: ok = leq(1, t) && leq(t, rho); break;
    case Regime::tau_outer: ok = leq(rho, t); break;
    case Regime::r_tau_inner: ok = leq(1, r) && leq(r, t) && leq(t, rho); break;
    case Regime::r_inner_tau_outer: ok = leq(1, r) && leq(r, rho) && leq(rho, t); break;
    case Regime::r_tau_outer: ok = leq(rho, r) && leq(r, t); break;
    case Regime::r_inner: ok = leq(1, r) && leq(r, rho); break;
    case Regime::r_outer: ok = leq(rho, r); break;
  }
  if (!ok) throw ValidationError(id + ": sample outside the regime of the estimate");
}

BoundTerms evaluate_estimate(const std::string& id, const BoundSample& s, int refine) {
  validate_sample(id, s);
  const EstimateInfo& e = info_of(id);
  const Kernels kn(s.beta);
  const cplx k = std::sqrt(s.lambda);
  const double mod = std::abs(s.lambda), rm = kn.order.mu.real(), re_k = k.real();
  const double cap = 1.0 / std::abs(k);
  const double far = 40.0 / re_k;
  const double r = s.r, t = s.tau, p = s.p;
  const int sh = s.k;
  auto to_inf = [&](double a) { return std::max(a, 1.0 / re_k) + far; };
  auto integral = [&](auto g, double a, double b) { return panel_integral(g, a, b, cap, refine); };
  auto abs_int = [&](auto g, double a, double b) {
    return integral([&](double x) { return cplx(std::abs(g(x))); }, a, b).real();
  };
  auto lp = [&](auto g, double a, double b) {
    return std::pow(integral([&](double x) { return cplx(std::pow(std::abs(g(x)), p) * x); }, a, b).real(),
                    1.0 / p);
  };
  auto Ks = [&](double x) { return kn.K(0, k * x); };
  auto Is = [&](double x) { return kn.I(0, k * x); };

  BoundTerms out;
  const double bk = std::pow(s.beta, -sh);
  switch (e.family) {
    case BesselFamily::B2: {
      auto g2 = [&](double x) { return std::pow(x, 2 - sh) * kn.K(sh, k * x); };
      auto g0 = [&](double x) { return std::pow(x, -sh) * kn.K(sh, k * x); };
      if (id == "B2.est1") {
        out.lhs = std::abs(integral(g2, t, r));
        out.rhs = bk * std::pow(mod, -rm / 2 + sh / 2.0) * std::pow(r, 3 - rm);
      } else if (id == "B2.est2") {
        out.lhs = std::abs(integral(g2, t, r));
        out.rhs = bk * std::pow(mod, -1.5 + sh / 2.0);
      } else if (id == "B2.est3") {
        out.lhs = abs_int(g2, t, r);
        out.rhs = std::pow(mod, -0.75) * std::pow(t, 1.5 - sh) * std::exp(-re_k * t);
      } else if (id == "B2.est4") {
        out.lhs = std::abs(integral(g0, t, to_inf(t)));
        out.rhs = bk / s.beta * std::pow(mod, -rm / 2 + sh / 2.0) * std::pow(t, 1 - rm);
      } else {
        out.lhs = abs_int(g0, t, to_inf(t));
        out.rhs = std::pow(mod, -0.75) * std::pow(t, -0.5 - sh) * std::exp(-re_k * t);
      }
      break;
    }
    case BesselFamily::B3: {
      auto g2 = [&](double x) { return std::pow(x, 2 - sh) * kn.I(sh, k * x); };
      auto g0 = [&](double x) { return std::pow(x, -sh) * kn.I(sh, k * x); };
      if (id == "B3.est1") {
        out.lhs = abs_int(g2, 1.0, t);
        out.rhs = std::pow(mod, rm / 2 + sh / 2.0) * std::pow(t, rm + 3);
      } else if (id == "B3.est2") {
        out.lhs = abs_int(g2, 1.0, t);
        out.rhs = std::pow(mod, -0.75) * std::pow(t, 1.5 - sh) * std::exp(re_k * t);
      } else if (id == "B3.est3") {
        out.lhs = abs_int(g0, r, t);
        out.rhs = std::pow(mod, rm / 2 + sh / 2.0) * std::pow(t, rm + 1);
      } else {
        out.lhs = abs_int(g0, r, t);
        out.rhs = std::pow(mod, -0.75) * std::pow(t, -0.5 - sh) * std::exp(re_k * t);
      }
      break;
    }
    case BesselFamily::B4: {
      auto Kr = [&](double x) { return Ks(x) / x; };
      auto Ir = [&](double x) { return Is(x) / x; };
      const double outer = std::pow(mod, -0.25 - 0.5 / p) * std::pow(r, -1.5 + 1.0 / p);
      if (id == "B4.est1") {
        out.lhs = lp(Ks, 1.0, to_inf(1.0));
        out.rhs = std::pow(p * rm - 2.0, -1.0 / p) * std::pow(mod, -rm / 2);
      } else if (id == "B4.est2") {
        out.lhs = lp(Kr, r, to_inf(r));
        out.rhs = std::pow(mod, -rm / 2) * std::pow(r, -rm - 1 + 2.0 / p);
      } else if (id == "B4.est3") {
        out.lhs = lp(Kr, r, to_inf(r));
        out.rhs = outer * std::exp(-re_k * r);
      } else if (id == "B4.est4") {
        out.lhs = lp(Ir, 1.0, r);
        out.rhs = std::pow(mod, rm / 2) * std::pow(r, rm - 1 + 2.0 / p);
      } else if (id == "B4.est5") {
        out.lhs = lp(Ir, 1.0, r);
        out.rhs = outer * std::exp(re_k * r);
      } else if (id == "B4.est6") {
        out.lhs = lp(Ks, r, to_inf(r)) + s.beta * abs_int(Ks, r, to_inf(r));
        out.rhs = std::pow(mod, -rm / 2) * std::pow(r, 1 - rm) / s.beta;
      } else if (id == "B4.est7") {
        out.lhs = lp(Ks, r, to_inf(r)) + abs_int(Ks, r, to_inf(r));
        out.rhs = std::pow(mod, -0.5) * std::exp(-re_k * r);
      } else if (id == "B4.est8") {
        out.lhs = lp(Is, 1.0, r) + abs_int(Is, 1.0, r);
        out.rhs = std::pow(mod, rm / 2) * std::pow(r, rm + 1);
      } else {
        out.lhs = lp(Is, 1.0, r) + abs_int(Is, 1.0, r);
        out.rhs = std::pow(mod, -0.5) * std::exp(re_k * r);
      }
      break;
    }
  }
  if (!std::isfinite(out.lhs) || !std::isfinite(out.rhs) || !(out.rhs > 0.0))
    throw NumericalError(id + ": non-finite bound terms");
  return out;
}

std::vector<BoundSample> draw_samples(const std::string& id, int count, std::uint64_t seed) {
  const EstimateInfo& e = info_of(id);
  if (count < 0) throw ValidationError("draw_samples: negative count");
  std::mt19937_64 gen(seed ^ std::hash<std::string>{}(id));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double betas[] = {0.1, 0.15, 0.2, 0.3};
  const double ps_any[] = {1.5, 2.0, 4.0};
  const double ps_two[] = {2.0, 3.0, 4.0};
  // log-uniform in [a, b]
  auto logu = [&](double a, double b) { return a * std::pow(b / a, u(gen)); };
  std::vector<BoundSample> out;
  for (int i = 0; i < count; ++i) {
    BoundSample s;
    s.beta = betas[gen() % 4];
    s.k = int(gen() % 2);
    s.p = e.p_at_least_2 ? ps_two[gen() % 3] : ps_any[gen() % 3];
    const double mod = std::pow(10.0, -8.0 * u(gen));
    const double arg = (2.0 * u(gen) - 1.0) * 0.74 * pi;
    s.lambda = std::polar(mod, arg);
    const double rho = rho_of(s.lambda), top = 20.0 * rho;
    double a = logu(1.0, rho), b = logu(1.0, rho), c = logu(rho, top), d = logu(rho, top);
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    switch (e.regime) {
      case Regime::none: break;
      case Regime::tau_r_inner: s.tau = a, s.r = b; break;
      case Regime::tau_inner_r_outer: s.tau = a, s.r = c; break;
      case Regime::tau_r_outer: s.tau = c, s.r = d; break;
      case Regime::tau_inner: s.tau = a; break;
      case Regime::tau_outer: s.tau = c; break;
      case Regime::r_tau_inner: s.r = a, s.tau = b; break;
      case Regime::r_inner_tau_outer: s.r = a, s.tau = c; break;
      case Regime::r_tau_outer: s.r = c, s.tau = d; break;
      case Regime::r_inner: s.r = a; break;
      case Regime::r_outer: s.r = c; break;
    }
    out.push_back(s);
  }
  return out;
}

namespace {

BoundSample rescaled(BoundSample s, double factor) {
  // lambda -> lambda / factor^2 with r, tau -> factor r, factor tau keeps the regime
  s.lambda /= factor * factor;
  s.r *= factor;
  s.tau *= factor;
  return s;
}

}  // namespace

BoundCheck check_estimate(const std::string& id, const std::vector<BoundSample>& samples, int threads) {
  for (const auto& s : samples) validate_sample(id, s);
  BoundCheck c;
  c.id = id;
  c.samples = samples;
  c.n_samples = int(samples.size());
  if (samples.empty()) return c;
  const std::size_t m = samples.size();
  // per sample: base, doubled quadrature, |lambda|/2, |lambda|/100
  std::vector<double> ratio(4 * m);
  parallel_for(4 * m, threads, [&](std::size_t i) {
    const BoundSample& s = samples[i % m];
    BoundTerms t;
    switch (i / m) {
      case 0: t = evaluate_estimate(id, s, 1); break;
      case 1: t = evaluate_estimate(id, s, 2); break;
      case 2: t = evaluate_estimate(id, rescaled(s, std::sqrt(2.0)), 1); break;
      default: t = evaluate_estimate(id, rescaled(s, 10.0), 1); break;
    }
    ratio[i] = t.lhs / t.rhs;
  });
  auto sup = [&](int block) { return *std::max_element(ratio.begin() + block * m, ratio.begin() + (block + 1) * m); };
  const double base = sup(0), fine = sup(1), half = sup(2), shrunk = sup(3);
  c.fitted_C = base;
  if (base > 0.0) {
    c.max_violation_ratio = std::max(base, fine) / base;
    c.refinement_drift = std::max(std::abs(fine / base - 1.0), std::abs(half / base - 1.0));
    c.growth_two_decades = shrunk / base;
  } else {
    // every LHS vanished (e.g. tau = r); the bound holds trivially
    c.max_violation_ratio = (fine > 0.0 || half > 0.0) ? INFINITY : 0.0;
    c.growth_two_decades = shrunk > 0.0 ? INFINITY : 1.0;
  }
  return c;
}

double k_norm_scaled(double beta, double x, double arg, double p, int refine) {
  if (!(p >= 2.0)) throw ValidationError("k_norm_scaled: needs p >= 2");
  if (!(x >= 0.0) || !(std::abs(arg) < pi)) throw ValidationError("k_norm_scaled: need x >= 0, |arg| < pi");
  const Order o = order_of(beta, 1);
  const BesselOrder K(1, o.zeta);
  const double rm = o.mu.real();
  const cplx dir = std::polar(1.0, arg / 2.0);
  const double log_k = -x / 2.0;
  // s = e^y, y in [0, Y]; the integrand is (|k|^{Re mu} |K_mu(k s)|)^p s^2
  const double y_end = x / 2.0 + std::log(41.0 / dir.real());
  auto g = [&](double y) {
    const cplx z = dir * std::exp(log_k + y);
    const cplx ks = K.k_scaled(z);
    const double lg = rm * log_k + std::log(std::abs(ks)) - z.real();
    return cplx(std::exp(p * lg + 2.0 * y));
  };
  const Rule& rule = gauss_legendre(16 * refine);
  double acc = 0.0;
  for (double lo = 0.0; lo < y_end;) {
    // width 2 in y while |k s| < 1, then at most one unit of |k s|
    const double u = std::exp(log_k + lo);
    const double hi = std::min(y_end, lo + (u < 1.0 ? 2.0 : std::min(2.0, std::log1p(1.0 / u))));
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * half * g(mid + half * rule.x[i]).real();
    lo = hi;
  }
  return std::pow(acc, 1.0 / p);
}

BoundCheck k_norm_beta_sweep(const std::vector<double>& betas, int threads) {
  if (betas.size() < 2) throw ValidationError("beta sweep needs at least two betas");
  const std::vector<double> xs{100, 200, 400, 700, 1000, 1400};
  const std::vector<double> args{-0.7 * pi, 0.0, 0.7 * pi};
  const std::size_t per = xs.size() * args.size();
  std::vector<double> v(betas.size() * per);
  parallel_for(v.size(), threads, [&](std::size_t i) {
    const std::size_t b = i / per, j = i % per;
    v[i] = k_norm_scaled(betas[b], xs[j / args.size()], args[j % args.size()], 2.0);
  });
  BoundCheck c;
  c.id = "B4.est1.beta";
  c.n_samples = int(v.size());
  std::vector<double> lb, lc;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    const double C = *std::max_element(v.begin() + b * per, v.begin() + (b + 1) * per);
    lb.push_back(std::log(betas[b]));
    lc.push_back(std::log(C));
    c.fitted_C = std::max(c.fitted_C, C * betas[b]);
  }
  c.beta_exponent = ls_slope(lb, lc);
  c.has_beta_exponent = true;
  c.declared_exponent = -1.0;  // (2 Re mu - 2)^{-1/2} ~ 2 / beta
  return c;
}


std::vector<BoundCheck> check_bessel_integral_bounds(BesselFamily f, const std::vector<BoundSample>& samples,
                                                     std::uint64_t seed, int per_estimate, int threads) {
  std::vector<BoundCheck> out;
  for (const auto& id : estimate_ids(f)) {
    const auto s = samples.empty() ? draw_samples(id, per_estimate, seed) : samples;
    out.push_back(check_estimate(id, s, threads));
    if (id == "B4.est1") {
      const BoundCheck sweep = k_norm_beta_sweep({0.1, 0.15, 0.2, 0.3}, threads);
      out.back().beta_exponent = sweep.beta_exponent;
      out.back().has_beta_exponent = true;
      out.back().declared_exponent = sweep.declared_exponent;
    }
  }
  return out;
}

double EnergyTerms::rhs(double T) const { return norm_v * norm_grad / T + theta_of(T) * norm_grad * norm_grad; }

EnergyTerms energy_terms(const ModeField& v) {
  EnergyTerms e;
  e.lhs = std::abs(pairing(mode_rot(v), v));
  e.norm_v = v.l2_norm();
  e.norm_grad = std::sqrt(grad_energy(v));
  return e;
}

std::vector<ModeField> random_solenoidal_fields(const EnergySampleSpec& spec) {
  if (spec.count < 0 || spec.n == 0) throw ValidationError("random fields: need count >= 0 and n != 0");
  GridOptions go;
  go.r_max = 16.0;
  go.nodes_per_panel = spec.nodes_per_panel;
  go.caps = {WidthCap{1.0, 16.0, 0.5}};
  const GridPtr grid = RadialGrid::build(go);
  std::mt19937_64 gen(spec.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::vector<ModeField> out;
  for (int i = 0; i < spec.count; ++i) {
    struct Blob {
      double cx, cy, w, a;
    };
    std::vector<Blob> blobs(1 + gen() % 3);
    for (auto& b : blobs) {
      const double rad = 1.8 + 3.2 * u(gen), ang = 2.0 * pi * u(gen);
      b = {rad * std::cos(ang), rad * std::sin(ang), 0.4 + 0.6 * u(gen), amp(gen)};
    }
    // psi = chi(r) G(x, y); v_r = psi_theta / r, v_theta = -psi_r
    auto field = [&blobs](double r, double th) {
      const double c = std::cos(th), s = std::sin(th), x = r * c, y = r * s;
      double G = 0.0, gx = 0.0, gy = 0.0;
      for (const auto& b : blobs) {
        const double dx = x - b.cx, dy = y - b.cy, e = b.a * std::exp(-(dx * dx + dy * dy) / (2.0 * b.w * b.w));
        G += e;
        gx -= e * dx / (b.w * b.w);
        gy -= e * dy / (b.w * b.w);
      }
      const double chi = wall_cutoff(r), dchi = wall_cutoff_d(r);
      const double psi_r = dchi * G + chi * (gx * c + gy * s);
      const double psi_th = chi * r * (-gx * s + gy * c);
      return std::array<cplx, 2>{cplx(psi_th / r), cplx(-psi_r)};
    };
    out.push_back(project_mode(field, spec.n, grid, spec.n_theta));
  }
  return out;
}

std::vector<BoundCheck> check_energy_ingredients(const std::vector<ModeField>& v_samples,
                                                 const std::vector<ModeField>& refined) {
  if (!refined.empty() && refined.size() != v_samples.size())
    throw ValidationError("energy check: refined set must match the samples");
  std::vector<EnergyTerms> base, fine;
  for (const auto& v : v_samples) base.push_back(energy_terms(v));
  for (const auto& v : refined) fine.push_back(energy_terms(v));
  std::vector<BoundCheck> out;
  for (double logT : {2.0, 4.0, 8.0}) {
    const double T = std::exp(logT);
    auto worst = [T](const std::vector<EnergyTerms>& terms) {
      double w = 0.0;
      for (const auto& e : terms) {
        const double rhs = e.rhs(T);
        if (rhs > 0.0) w = std::max(w, e.lhs / rhs);
        else if (e.lhs > 0.0) w = INFINITY;
      }
      return w;
    };
    BoundCheck c;
    char id[32];
    std::snprintf(id, sizeof id, "energy.logT.e%g", logT);
    c.id = id;
    c.n_samples = int(v_samples.size());
    c.fitted_C = worst(base);
    c.max_violation_ratio = std::max(c.fitted_C, fine.empty() ? 0.0 : worst(fine));
    if (!fine.empty() && c.fitted_C > 0.0) c.refinement_drift = std::abs(worst(fine) / c.fitted_C - 1.0);
    c.growth_two_decades = 1.0;
    out.push_back(c);
  }
  return out;
}

std::vector<BoundCheck> check_energy_ingredients(const EnergySampleSpec& spec, int threads) {
  EnergySampleSpec fine = spec;
  fine.n_theta *= 2;
  fine.nodes_per_panel *= 2;
  std::vector<ModeField> a, b;
  parallel_for(2, threads, [&](std::size_t i) {
    (i == 0 ? a : b) = random_solenoidal_fields(i == 0 ? spec : fine);
  });
  return check_energy_ingredients(a, b);
}

namespace {

struct AuditCase {
  double x, arg, scale;
  int comp;
};

// Normalized quantities of one resolvent solve: |c| / ||f||_1, ||w|| |lambda| / ||f||_2 and
// |<omega_hom, w_r / r>| |lambda| / ||f||_2^2. Zero when the solve is rejected.
std::array<double, 3> audit_sample(double beta, const AuditCase& a) {
  const cplx k = std::polar(std::exp(-a.x / 2.0), a.arg / 2.0);
  const ResolventQuery q = make_query_sqrt(k, beta, 1);
  // bump data near the wall (scale 0) or at radius scale / |k|, one polar component at a time
  const double c0 = a.scale == 0.0 ? 2.0 : std::max(2.0, a.scale / std::abs(k));
  const double w0 = a.scale == 0.0 ? 0.9 : 0.5 * c0;
  auto bump = [c0, w0](double r) {
    const double y = (r - c0) / w0;
    return cplx(std::abs(y) < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0);
  };
  auto zero = [](double) { return cplx(0.0); };
  ForceMode f = a.comp == 0 ? body_force(1, bump, zero, c0 - w0, c0 + w0, w0 / 4)
                            : body_force(1, zero, bump, c0 - w0, c0 + w0, w0 / 4);
  // keeps w ~ f / lambda inside the double range
  if (a.scale > 0.0) f = scaled(f, std::exp(-a.x / 2.0));
  SolveOptions o;
  o.residuals = false;
  ModeSolution s;
  try {
    s = solve_body_force(q, f, o);
  } catch (const std::exception&) {
    return {0.0, 0.0, 0.0};
  }
  const ModeField fs = sample_force(f, s.velocity.vr.grid);
  const double f2 = fs.l2_norm();
  std::vector<double> mag(fs.vr.values.size());
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::hypot(std::abs(fs.vr.values[i]), std::abs(fs.vtheta.values[i]));
  const double f1 = fs.vr.grid->integrate(mag);
  const double lam = std::exp(-a.x);
  std::array<double, 3> v{std::abs(s.c_const) / f1, s.velocity.l2_norm() * lam / f2,
                          std::abs(pairing(s.omega_hom, s.velocity)) * lam / (f2 * f2)};
  for (auto& e : v)
    if (!std::isfinite(e)) e = 0.0;
  return v;
}

}  // namespace

std::vector<AuditEntry> beta_audit(const AuditSpec& spec) {
  if (spec.betas.size() < 2) throw ValidationError("audit: needs at least two betas");
  if (spec.x_points < 2 || spec.refine_points < 0) throw ValidationError("audit: bad sampling counts");
  for (double b : spec.betas)
    if (!(b >= 0.05 && b < 1.0)) throw ValidationError("audit: beta must lie in [0.05, 1)");
  const char* ids[3] = {"c_constant.q1", "velocity_l2.q2", "vorticity_pairing.q2"};
  const double declared[3] = {-1.0, -2.0, -5.0};
  std::vector<AuditEntry> out(3);
  for (int j = 0; j < 3; ++j) out[j].id = ids[j], out[j].declared = declared[j];
  const std::vector<double> args{-0.74 * pi, -0.37 * pi, 0.0, 0.37 * pi, 0.74 * pi};
  const std::vector<double> scales{0.0, 1e-2, 1.0};
  for (double beta : spec.betas) {
    // |lambda| from the top of the proven disk down to the far end of the nearly-resonant range
    const double x_lo = 1.0 / (6.0 * beta) + 0.5, x_hi = std::min(1400.0, 24.0 / (beta * beta));
    std::vector<double> xs;
    for (int i = 0; i < spec.x_points; ++i) xs.push_back(x_lo * std::pow(x_hi / x_lo, double(i) / (spec.x_points - 1)));
    // the dip of |F| sits near -log|lambda| = 8 pi / beta
    if (8.0 * pi / beta < x_hi) xs.push_back(8.0 * pi / beta);
    std::sort(xs.begin(), xs.end());
    std::vector<AuditCase> cases;
    for (double x : xs)
      for (double a : args)
        for (double s : scales)
          for (int comp : {0, 1}) cases.push_back({x, a, s, comp});
    std::vector<std::array<double, 3>> val(cases.size());
    parallel_for(cases.size(), spec.threads, [&](std::size_t i) { val[i] = audit_sample(beta, cases[i]); });
    for (int j = 0; j < 3; ++j) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < cases.size(); ++i)
        if (val[i][j] > val[best][j]) best = i;
      double C = val[best][j], at = cases[best].x;
      // refine in x around the worst sample
      const auto pos = std::find(xs.begin(), xs.end(), cases[best].x) - xs.begin();
      const double lo = xs[std::max<long>(pos - 1, 0)], hi = xs[std::min<long>(pos + 1, long(xs.size()) - 1)];
      std::vector<std::array<double, 3>> ref(spec.refine_points);
      std::vector<double> rx(spec.refine_points);
      for (int i = 0; i < spec.refine_points; ++i) rx[i] = lo * std::pow(hi / lo, (i + 0.5) / spec.refine_points);
      parallel_for(rx.size(), spec.threads, [&](std::size_t i) {
        AuditCase c = cases[best];
        c.x = rx[i];
        ref[i] = audit_sample(beta, c);
      });
      for (int i = 0; i < spec.refine_points; ++i)
        if (ref[i][j] > C) C = ref[i][j], at = rx[i];
      out[j].betas.push_back(beta);
      out[j].constants.push_back(C);
      out[j].argmax_x.push_back(at);
    }
  }
  for (auto& e : out) {
    std::vector<double> lb, lc;
    for (std::size_t i = 0; i < e.betas.size(); ++i) {
      if (!(e.constants[i] > 0.0)) throw NumericalError("audit: no admissible sample for " + e.id);
      lb.push_back(std::log(e.betas[i]));
      lc.push_back(std::log(e.constants[i]));
    }
    e.slope = ls_slope(lb, lc);
  }
  return out;
}

std::string report_json(std::uint64_t seed, const std::vector<BoundCheck>& checks,
                        const std::vector<AuditEntry>& audit) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["seed"] = seed;
  j["checks"] = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json e;
    e["id"] = c.id;
    e["n_samples"] = c.n_samples;
    e["fitted_C"] = c.fitted_C;
    e["max_violation_ratio"] = c.max_violation_ratio;
    e["refinement_drift"] = c.refinement_drift;
    e["growth_two_decades"] = c.growth_two_decades;
    if (c.has_beta_exponent) {
      e["beta_exponent"] = c.beta_exponent;
      e["declared_exponent"] = c.declared_exponent;
    }
    j["checks"].push_back(e);
  }
  if (!audit.empty()) {
    j["beta_audit"] = ordered_json::array();
    for (const auto& a : audit) {
      ordered_json e;
      e["id"] = a.id;
      e["betas"] = a.betas;
      e["constants"] = a.constants;
      e["argmax_x"] = a.argmax_x;
      e["slope"] = a.slope;
      e["declared"] = a.declared;
      e["within_half"] = a.within();
      j["beta_audit"].push_back(e);
    }
  }
  return j.dump(2) + "\n";
}

}  // namespace esr
