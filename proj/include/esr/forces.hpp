#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "esr/radial_grid.hpp"

namespace esr {

using RadialFn = std::function<cplx(double)>;

enum class ForceKind { body, div, boundary };
const char* to_string(ForceKind k);

// Data of one Fourier mode: a body force (f_r, f_theta), the four polar components of a
// matrix F whose divergence is the force, or the boundary trace (b_r, b_theta).
struct ForceMode {
  ForceKind kind = ForceKind::body;
  int n = 1;
  RadialFn f_r, f_theta;
  // F_rr, F_rtheta, F_thetar, F_thetatheta
  std::array<RadialFn, 4> F;
  double gamma_prime = 0.75;
  cplx b_r = 0.0, b_theta = 0.0;
  // Where the data lives and its smallest variation length; used to place grid panels.
  double support_lo = 1.0;
  double support_hi = 1.0;
  double scale = 1.0;
  // extra resolution requirements, e.g. the panels of a grid the data was sampled on
  std::vector<WidthCap> caps;
  std::string label;

  bool is_zero() const;
};

ForceMode body_force(int n, RadialFn f_r, RadialFn f_theta, double lo, double hi, double scale);
ForceMode div_force(int n, std::array<RadialFn, 4> F, double gamma_prime, double lo, double hi,
                    double scale);
ForceMode boundary_data(int n, cplx b_r, cplx b_theta);
ForceMode zero_force(int n);
ForceMode scaled(const ForceMode& f, cplx a);
ForceMode sum(const ForceMode& a, const ForceMode& b);

// Body force sampled from a mode field (interpolated between grid nodes).
ForceMode from_mode_field(const ModeField& m);

// Divergence-free body forces built from a stream potential phi:
// f_r = (i n / r) phi, f_theta = -phi'.
struct Potential {
  RadialFn phi, dphi;
};
ForceMode from_potential(int n, Potential p, double lo, double hi, double scale, std::string label);

// Smooth factor vanishing to fourth order at r = 1.
double wall_cutoff(double r, double delta = 0.5);
double wall_cutoff_d(double r, double delta = 0.5);

// mode n of a planar Gaussian of the given width centred at (center, 0)
ForceMode gaussian_force(int n, double center, double width);
// radial Gaussian ring
ForceMode ring_force(int n, double radius, double width);
// C-infinity bump supported in (center - width, center + width)
ForceMode bump_force(int n, double center, double width);
// potential ~ r^{1 - 2/q} with a Gaussian cutoff at r_far, so |f| ~ r^{-2/q}
ForceMode powerlaw_force(int n, double q, double r_far);

// Divergence-form data F = bump(r) * constant 2x2 matrix of mode coefficients.
ForceMode bump_matrix_force(int n, double center, double width, std::array<cplx, 4> coeff,
                            double gamma_prime = 0.75);

// "gaussian:center=3,width=0.5", "ring:radius=4,width=1", "compact-bump:center=3,width=1.5",
// "powerlaw:q=1.33,rfar=300"
ForceMode parse_force(const std::string& spec, int n);

}  // namespace esr
