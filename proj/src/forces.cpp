#include "esr/forces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "esr/special_functions.hpp"

namespace esr {

const char* to_string(ForceKind k) {
  switch (k) {
    case ForceKind::body: return "body";
    case ForceKind::div: return "div";
    case ForceKind::boundary: return "boundary";
  }
  return "?";
}

bool ForceMode::is_zero() const {
  switch (kind) {
    case ForceKind::body: return !f_r && !f_theta;
    case ForceKind::div: return std::none_of(F.begin(), F.end(), [](const RadialFn& g) { return bool(g); });
    case ForceKind::boundary: return b_r == 0.0 && b_theta == 0.0;
  }
  return true;
}

namespace {

void check_mode(int n) {
  if (n == 0) throw ValidationError("force mode index must be nonzero");
}

void check_support(double lo, double hi, double scale) {
  if (!(lo >= 1.0) || !(hi >= lo) || !std::isfinite(hi))
    throw ValidationError("force support must satisfy 1 <= lo <= hi < inf");
  if (!(scale > 0.0)) throw ValidationError("force scale must be positive");
}

RadialFn mul(const RadialFn& f, cplx a) {
  if (!f) return {};
  return [f, a](double r) { return a * f(r); };
}

RadialFn add(const RadialFn& f, const RadialFn& g) {
  if (!f) return g;
  if (!g) return f;
  return [f, g](double r) { return f(r) + g(r); };
}

}  // namespace

ForceMode body_force(int n, RadialFn f_r, RadialFn f_theta, double lo, double hi, double scale) {
  check_mode(n);
  check_support(lo, hi, scale);
  ForceMode f;
  f.kind = ForceKind::body;
  f.n = n;
  f.f_r = std::move(f_r);
  f.f_theta = std::move(f_theta);
  f.support_lo = lo;
  f.support_hi = hi;
  f.scale = scale;
  return f;
}

ForceMode div_force(int n, std::array<RadialFn, 4> F, double gamma_prime, double lo, double hi,
                    double scale) {
  check_mode(n);
  check_support(lo, hi, scale);
  if (!(gamma_prime > 0.5 && gamma_prime <= 1.0))
    throw ValidationError("gamma_prime must lie in (1/2, 1]");
  ForceMode f;
  f.kind = ForceKind::div;
  f.n = n;
  f.F = std::move(F);
  f.gamma_prime = gamma_prime;
  f.support_lo = lo;
  f.support_hi = hi;
  f.scale = scale;
  return f;
}

ForceMode boundary_data(int n, cplx b_r, cplx b_theta) {
  check_mode(n);
  ForceMode f;
  f.kind = ForceKind::boundary;
  f.n = n;
  f.b_r = b_r;
  f.b_theta = b_theta;
  f.label = "boundary";
  return f;
}

ForceMode zero_force(int n) {
  check_mode(n);
  ForceMode f;
  f.n = n;
  f.label = "zero";
  return f;
}

ForceMode scaled(const ForceMode& f, cplx a) {
  ForceMode g = f;
  g.f_r = mul(f.f_r, a);
  g.f_theta = mul(f.f_theta, a);
  for (int i = 0; i < 4; ++i) g.F[i] = mul(f.F[i], a);
  g.b_r *= a;
  g.b_theta *= a;
  return g;
}

ForceMode sum(const ForceMode& a, const ForceMode& b) {
  if (a.kind != b.kind || a.n != b.n) throw ValidationError("cannot add forces of different kind or mode");
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  ForceMode g = a;
  g.f_r = add(a.f_r, b.f_r);
  g.f_theta = add(a.f_theta, b.f_theta);
  for (int i = 0; i < 4; ++i) g.F[i] = add(a.F[i], b.F[i]);
  g.b_r += b.b_r;
  g.b_theta += b.b_theta;
  g.support_lo = std::min(a.support_lo, b.support_lo);
  g.support_hi = std::max(a.support_hi, b.support_hi);
  g.scale = std::min(a.scale, b.scale);
  g.caps.insert(g.caps.end(), b.caps.begin(), b.caps.end());
  g.label = a.label + "+" + b.label;
  return g;
}

ForceMode from_mode_field(const ModeField& m) {
  const auto& g = m.vr.grid;
  const auto& r = g->nodes();
  double peak = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    peak = std::max({peak, std::abs(m.vr.values[i]), std::abs(m.vtheta.values[i])});
  double hi = 1.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::max(std::abs(m.vr.values[i]), std::abs(m.vtheta.values[i])) > 1e-15 * peak) hi = r[i];
  ForceMode f;
  f.kind = ForceKind::body;
  f.n = m.n;
  const double rmax = g->r_max();
  // A field that is still non-negligible at the grid end is rolled off over its outer half.
  // The taper acts on the stream function psi = r v_r / (i n), so the result stays solenoidal.
  const double edge = std::max(std::abs(m.vr.values.back()), std::abs(m.vtheta.values.back()));
  const double t0 = edge > 1e-15 * peak ? 0.5 * (1.0 + rmax) : rmax;
  const double len = rmax - t0;
  auto roll = [t0, rmax, len](double s) -> std::pair<double, double> {
    if (s <= t0) return {1.0, 0.0};
    if (s >= rmax) return {0.0, 0.0};
    const double x = (s - t0) / len;
    const double x3 = x * x * x;
    return {1.0 - x3 * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x3),
            -140.0 * x3 * (1.0 - x) * (1.0 - x) * (1.0 - x) / len};
  };
  const cplx in = I1 * double(m.n);
  auto vr = m.vr, vt = m.vtheta;
  f.f_r = [vr, rmax, roll](double s) { return s > rmax ? cplx(0.0) : roll(s).first * vr.at(s); };
  f.f_theta = [vr, vt, rmax, roll, in](double s) {
    if (s > rmax) return cplx(0.0);
    const auto [w, dw] = roll(s);
    return w * vt.at(s) - dw * s * vr.at(s) / in;
  };
  f.support_lo = 1.0;
  f.support_hi = hi;
  f.scale = hi;
  for (int p = 0; p < g->panels() && g->panel_lo(p) < hi; ++p)
    f.caps.push_back({g->panel_lo(p), g->panel_hi(p), g->panel_hi(p) - g->panel_lo(p)});
  f.label = "field";
  return f;
}

ForceMode from_potential(int n, Potential p, double lo, double hi, double scale, std::string label) {
  const cplx in = I1 * double(n);
  auto phi = p.phi;
  auto dphi = p.dphi;
  ForceMode f = body_force(
      n, [phi, in](double r) { return in / r * phi(r); }, [dphi](double r) { return -dphi(r); }, lo, hi,
      scale);
  f.label = std::move(label);
  return f;
}

double wall_cutoff(double r, double delta) {
  const double x = (r - 1.0) / delta;
  return -std::expm1(-x * x * x * x);
}

double wall_cutoff_d(double r, double delta) {
  const double x = (r - 1.0) / delta;
  return 4.0 * x * x * x / delta * std::exp(-x * x * x * x);
}

ForceMode gaussian_force(int n, double center, double width) {
  if (!(center >= 0.0) || !(width > 0.0)) throw ValidationError("gaussian: need center >= 0, width > 0");
  const double a = center / (width * width);
  const int m = std::abs(n);
  auto bi = std::make_shared<BesselOrder>(m, 0.0);
  auto bi1 = std::make_shared<BesselOrder>(m + 1, 0.0);
  auto profile = [=](double r, double* dv) {
    const double e = std::exp(-(r - center) * (r - center) / (2.0 * width * width));
    const double z = a * r;
    double v, d;
    if (z == 0.0) {
      v = (m == 0) ? e : 0.0;
      d = (m == 0) ? -(r - center) / (width * width) * e : 0.0;
    } else {
      const double i0 = bi->i_scaled(z).real(), i1 = bi1->i_scaled(z).real();
      v = e * i0;
      d = e * (-(r - center) / (width * width) * i0 + a * (i1 + (m / z - 1.0) * i0));
    }
    if (dv) *dv = d;
    return v;
  };
  Potential p;
  p.phi = [=](double r) { return cplx(wall_cutoff(r) * profile(r, nullptr)); };
  p.dphi = [=](double r) {
    double d;
    const double v = profile(r, &d);
    return cplx(wall_cutoff_d(r) * v + wall_cutoff(r) * d);
  };
  const double hi = std::max(1.5, center + 10.0 * width);
  return from_potential(n, p, 1.0, hi, std::min(width, 0.5), "gaussian");
}

ForceMode ring_force(int n, double radius, double width) {
  if (!(radius >= 1.0) || !(width > 0.0)) throw ValidationError("ring: need radius >= 1, width > 0");
  Potential p;
  p.phi = [=](double r) {
    const double x = (r - radius) / width;
    return cplx(wall_cutoff(r) * std::exp(-0.5 * x * x));
  };
  p.dphi = [=](double r) {
    const double x = (r - radius) / width;
    const double e = std::exp(-0.5 * x * x);
    return cplx(wall_cutoff_d(r) * e - wall_cutoff(r) * x / width * e);
  };
  const double hi = radius + 10.0 * width;
  return from_potential(n, p, 1.0, hi, std::min(width, 0.5), "ring");
}

namespace {

double bump(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }
double bump_d(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double u = 1.0 - x * x;
  return -2.0 * x / (u * u) * std::exp(-1.0 / u);
}

void check_bump(double center, double width) {
  if (!(width > 0.0) || !(center - width >= 1.0))
    throw ValidationError("compact-bump: need width > 0 and center - width >= 1");
}

}  // namespace

ForceMode bump_force(int n, double center, double width) {
  check_bump(center, width);
  Potential p;
  p.phi = [=](double r) { return cplx(bump((r - center) / width)); };
  p.dphi = [=](double r) { return cplx(bump_d((r - center) / width) / width); };
  return from_potential(n, p, center - width, center + width, width / 12.0, "compact-bump");
}

ForceMode powerlaw_force(int n, double q, double r_far) {
  if (!(q > 1.0 && q <= 2.0)) throw ValidationError("powerlaw: q must lie in (1, 2]");
  if (!(r_far > 2.0)) throw ValidationError("powerlaw: rfar must exceed 2");
  const double e = 1.0 - 2.0 / q;
  Potential p;
  p.phi = [=](double r) {
    const double x = r / r_far;
    return cplx(wall_cutoff(r) * std::pow(r, e) * std::exp(-x * x));
  };
  p.dphi = [=](double r) {
    const double x = r / r_far;
    const double g = std::pow(r, e) * std::exp(-x * x);
    const double dg = g * (e / r - 2.0 * r / (r_far * r_far));
    return cplx(wall_cutoff_d(r) * g + wall_cutoff(r) * dg);
  };
  return from_potential(n, p, 1.0, 6.5 * r_far, 0.5 * r_far, "powerlaw");
}

ForceMode bump_matrix_force(int n, double center, double width, std::array<cplx, 4> coeff,
                            double gamma_prime) {
  check_bump(center, width);
  std::array<RadialFn, 4> F;
  for (int i = 0; i < 4; ++i) {
    const cplx c = coeff[i];
    F[i] = [=](double r) { return c * bump((r - center) / width); };
  }
  ForceMode f = div_force(n, F, gamma_prime, center - width, center + width, width / 12.0);
  f.label = "compact-bump-matrix";
  return f;
}

namespace {

std::map<std::string, double> parse_params(const std::string& s) {
  std::map<std::string, double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("force parameter without '=': " + item);
    const std::string key = item.substr(0, eq);
    try {
      std::size_t used = 0;
      const std::string val = item.substr(eq + 1);
      out[key] = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw ValidationError("bad numeric value for force parameter " + key);
    }
  }
  return out;
}

double take(std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  if (it == p.end()) return dflt;
  const double v = it->second;
  p.erase(it);
  return v;
}

}  // namespace

ForceMode parse_force(const std::string& spec, int n) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  auto params = parse_params(colon == std::string::npos ? "" : spec.substr(colon + 1));
  ForceMode f;
  if (name == "gaussian") {
    const double c = take(params, "center", 3.0), w = take(params, "width", 0.5);
    f = gaussian_force(n, c, w);
  } else if (name == "ring") {
    const double c = take(params, "radius", 4.0), w = take(params, "width", 1.0);
    f = ring_force(n, c, w);
  } else if (name == "compact-bump") {
    const double c = take(params, "center", 3.0), w = take(params, "width", 1.5);
    f = bump_force(n, c, w);
  } else if (name == "powerlaw") {
    const double q = take(params, "q", 2.0), rf = take(params, "rfar", 3000.0);
    f = powerlaw_force(n, q, rf);
  } else if (name == "zero") {
    f = zero_force(n);
  } else {
    throw ValidationError("unknown force preset: " + name);
  }
  if (!params.empty()) throw ValidationError("unknown parameter '" + params.begin()->first + "' for " + name);
  return f;
}

}  // namespace esr
