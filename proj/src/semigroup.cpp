#include "esr/semigroup.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "esr/parallel.hpp"
#include "esr/polar_fourier.hpp"
#include "esr/quadrature.hpp"

namespace esr {

double default_arc_radius(double beta, double t) {
  double b = std::min(1.0, 0.5 / t);
  if (beta > 0.0) b = std::min({b, 0.1, 0.5 * std::exp(-1.0 / (6.0 * beta))});
  return b;
}

void validate_contour(const ContourSpec& c, double beta, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("evolve: t must be positive");
  if (!(c.phi > pi / 2 && c.phi < pi)) throw ValidationError("contour: phi must lie in (pi/2, pi)");
  if (c.nodes_per_panel < 2 || c.arc_panels < 1 || !(c.max_panel_width > 0.0) || !(c.cutoff > 0.0))
    throw ValidationError("contour: bad node counts");
  const double b = c.b > 0.0 ? c.b : default_arc_radius(beta, t);
  if (!(b > 0.0) || b > std::min(1.0, 1.0 / t) * (1 + 1e-12)) throw ValidationError("contour: need 0 < b <= min(1, 1/t)");
  if (beta > 0.0) {
    // arc inside the small disk, rays beyond it inside |Im| > -Re + shift
    const double r0 = std::exp(-1.0 / (6.0 * beta));
    if (b >= r0) throw NumericalError("contour exits the resolvent sector: arc radius too large for beta");
    if (c.phi >= 3.0 * pi / 4.0) throw NumericalError("contour exits the resolvent sector: phi >= 3 pi / 4");
    const double shift = 12.0 * std::exp(1.0 / std::exp(1.0)) * beta * beta * r0;
    if (r0 * (std::sin(c.phi) + std::cos(c.phi)) <= shift)
      throw NumericalError("contour exits the resolvent sector: rays leave the admissible region");
  }
}

namespace {

void add_panel(std::vector<ContourNode>& out, int order, double a, double b, const std::function<ContourNode(double, double)>& at) {
  const Rule& g = gauss_legendre(order);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  for (std::size_t i = 0; i < g.x.size(); ++i) out.push_back(at(m + h * g.x[i], h * g.w[i]));
}

}  // namespace

std::vector<ContourNode> contour_nodes(const ContourSpec& c, double beta, double t, int refine) {
  validate_contour(c, beta, t);
  if (refine < 1) throw ValidationError("contour: refine must be positive");
  const double b = c.b > 0.0 ? c.b : default_arc_radius(beta, t);
  const double cphi = std::abs(std::cos(c.phi));
  const double rho_end = std::max(2.0 * b, (c.cutoff + t * b) / (t * cphi));
  const double W = c.max_panel_width / t;
  std::vector<double> edges{b};
  while (edges.back() < rho_end) edges.push_back(std::min(rho_end, edges.back() + std::min(edges.back(), W)));
  std::vector<double> fine;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    for (int s = 0; s < refine; ++s) fine.push_back(edges[i] + (edges[i + 1] - edges[i]) * s / refine);
  fine.push_back(edges.back());

  const cplx up = std::polar(1.0, c.phi), down = std::polar(1.0, -c.phi);
  const cplx to_weight = 1.0 / (2.0 * pi * I1);
  std::vector<ContourNode> out;
  // lower ray, travelled inward
  for (std::size_t i = fine.size() - 1; i > 0; --i)
    add_panel(out, c.nodes_per_panel, fine[i - 1], fine[i],
              [&](double rho, double w) { return ContourNode{rho * down, -down * w * to_weight}; });
  // arc, counterclockwise
  const int arc = std::max(c.arc_panels, int(std::ceil(2.0 * t * b * c.phi))) * refine;
  for (int p = 0; p < arc; ++p)
    add_panel(out, c.nodes_per_panel, -c.phi + 2.0 * c.phi * p / arc, -c.phi + 2.0 * c.phi * (p + 1) / arc,
              [&](double th, double w) {
                const cplx z = std::polar(b, th);
                return ContourNode{z, I1 * z * w * to_weight};
              });
  // upper ray, outward
  for (std::size_t i = 0; i + 1 < fine.size(); ++i)
    add_panel(out, c.nodes_per_panel, fine[i], fine[i + 1],
              [&](double rho, double w) { return ContourNode{rho * up, up * w * to_weight}; });
  return out;
}

namespace {

std::vector<cplx> contour_sum(const ForceMode& f, double beta, double t, const std::vector<ContourNode>& nodes,
                              const GridPtr& grid, int threads) {
  std::vector<RadialProfile> parts(nodes.size());
  parallel_for(nodes.size(), threads, [&](std::size_t j) {
    const ResolventQuery q = make_query(nodes[j].lambda, beta, f.n);
    parts[j] = solve_vorticity(q, f, grid);
  });
  std::vector<cplx> acc(grid->size(), 0.0);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const cplx w = nodes[j].weight * std::exp(t * nodes[j].lambda);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * parts[j].values[i];
  }
  return acc;
}

double l2_of(const std::vector<cplx>& d, const RadialGrid& g) {
  std::vector<double> s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s[i] = std::norm(d[i]);
  return std::sqrt(g.integrate(s));
}

}  // namespace

double relative_distance(const ModeField& a, const ModeField& b) {
  const auto& g = *a.vr.grid;
  std::vector<cplx> d(g.size());
  double num = 0.0, den = 0.0;
  for (int comp = 0; comp < 2; ++comp) {
    const RadialProfile& pa = comp ? a.vtheta : a.vr;
    const RadialProfile& pb = comp ? b.vtheta : b.vr;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g.nodes()[i];
      d[i] = pa.values[i] - (r <= pb.grid->r_max() ? pb.at(r) : cplx(0.0));
    }
    num += std::pow(l2_of(d, g), 2);
    den += std::pow(l2_of(pa.values, g), 2);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

EvolveResult evolve(const ForceMode& f, double beta, const ContourSpec& c, double t, const EvolveOptions& opt) {
  if (f.kind != ForceKind::body) throw ValidationError("evolve: initial datum must be a body-force mode");
  if (std::abs(f.n) != 1) throw ValidationError("evolve: only |n| = 1 is supported");
  const auto nodes = contour_nodes(c, beta, t, opt.check_doubling ? 2 : 1);
  std::vector<cplx> ks;
  for (const auto& nd : nodes) ks.push_back(std::sqrt(nd.lambda));
  std::vector<ContourNode> coarse;
  if (opt.check_doubling) {
    coarse = contour_nodes(c, beta, t, 1);
    for (const auto& nd : coarse) ks.push_back(std::sqrt(nd.lambda));
  }
  const GridPtr grid = opt.solve.grid ? opt.solve.grid : resolvent_grid(ks, f, opt.solve);

  EvolveResult res;
  res.t = t;
  res.nodes = int(nodes.size());
  if (f.is_zero()) {
    res.vorticity = RadialProfile(grid);
    res.velocity = ModeField(f.n, RadialProfile(grid), RadialProfile(grid));
    return res;
  }
  res.vorticity = RadialProfile(grid, contour_sum(f, beta, t, nodes, grid, opt.threads));
  res.vorticity.check_finite("evolve");
  res.velocity = velocity(VorticityMode{f.n, res.vorticity});
  if (opt.check_doubling) {
    const RadialProfile w1(grid, contour_sum(f, beta, t, coarse, grid, opt.threads));
    const ModeField v1 = velocity(VorticityMode{f.n, w1});
    const double n2 = res.velocity.l2_norm(), n1 = v1.l2_norm();
    res.norm_shift = n2 > 0.0 ? std::abs(n2 - n1) / n2 : std::abs(n1);
    res.field_shift = relative_distance(res.velocity, v1);
    if (res.norm_shift > opt.doubling_tol)
      throw NumericalError("evolve: contour quadrature not converged (doubling shifts the L2 norm by " +
                           std::to_string(res.norm_shift) + ")");
  }
  return res;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("ls_slope: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size(), my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  if (!(sxx > 0)) throw ValidationError("ls_slope: degenerate abscissae");
  return sxy / sxx;
}

DecayFit decay_fit(const ForceMode& f, double beta, double q, const std::vector<double>& t_grid,
                   const ContourSpec& c, const EvolveOptions& opt) {
  if (!(q > 1.0 && q <= 2.0)) throw ValidationError("decay_fit: q must lie in (1, 2]");
  if (t_grid.size() < 2) throw ValidationError("decay_fit: need at least two times");
  const auto [lo, hi] = std::minmax_element(t_grid.begin(), t_grid.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1 - 1e-12)) throw ValidationError("decay_fit: t_grid must span two decades");
  DecayFit fit;
  fit.q = q;
  std::vector<double> lt, ll, lg;
  for (double t : t_grid) {
    const EvolveResult r = evolve(f, beta, c, t, opt);
    DecaySample s{t, r.velocity.l2_norm(), std::sqrt(grad_energy(r.velocity))};
    fit.samples.push_back(s);
    lt.push_back(std::log(t));
    ll.push_back(std::log(s.l2_norm));
    lg.push_back(std::log(s.grad_norm));
  }
  fit.slope_l2 = ls_slope(lt, ll);
  fit.slope_grad = ls_slope(lt, lg);
  return fit;
}

std::string decay_csv(const DecayFit& d) {
  std::ostringstream os;
  os.precision(12);
  os << "t,l2_norm,grad_norm\n";
  for (const auto& s : d.samples) os << s.t << ',' << s.l2_norm << ',' << s.grad_norm << '\n';
  return os.str();
}

std::string fit_json(const DecayFit& d) {
  nlohmann::ordered_json j;
  j["q"] = d.q;
  j["slope_l2"] = d.slope_l2;
  j["slope_grad"] = d.slope_grad;
  j["expected_l2"] = d.expected_l2();
  j["expected_grad"] = d.expected_grad();
  return j.dump(2);
}

}  // namespace esr
