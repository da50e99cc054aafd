#pragma once

#include <string>
#include <vector>

#include "esr/resolvent.hpp"

namespace esr {

struct ContourSpec {
  double phi = 5.0 * pi / 8.0;  // ray angle, pi/2 < phi < pi
  double b = 0.0;               // arc radius; 0 picks the default for each t
  int nodes_per_panel = 8;
  double max_panel_width = 12.0;  // ray panels are at most this / t long
  int arc_panels = 2;
  double cutoff = 37.0;  // rays stop once |e^{t lambda}| < e^{-cutoff} of the peak
};

struct ContourNode {
  cplx lambda;
  cplx weight;  // d lambda / (2 pi i) times the quadrature weight
};

// Arc radius used at time t: 1/(2t), at most 1, and for beta > 0 at most min(0.1, e^{-1/(6 beta)}/2).
double default_arc_radius(double beta, double t);
void validate_contour(const ContourSpec& c, double beta, double t);
// refine = 2 splits every panel in two
std::vector<ContourNode> contour_nodes(const ContourSpec& c, double beta, double t, int refine = 1);

struct EvolveOptions {
  SolveOptions solve;
  bool check_doubling = true;
  double doubling_tol = 1e-6;
  int threads = 1;
};

struct EvolveResult {
  double t = 0.0;
  ModeField velocity;
  RadialProfile vorticity;
  int nodes = 0;
  double norm_shift = 0.0;   // relative change of the L2 norm under node doubling
  double field_shift = 0.0;  // relative L2 distance of the two fields
};

// e^{-tA} f for a divergence-free body-force datum of a single mode.
EvolveResult evolve(const ForceMode& f, double beta, const ContourSpec& c, double t, const EvolveOptions& opt = {});

// Relative L2 distance of two mode fields sampled on possibly different grids (interpolated onto a).
double relative_distance(const ModeField& a, const ModeField& b);

struct DecaySample {
  double t;
  double l2_norm;
  double grad_norm;
};

struct DecayFit {
  double q = 2.0;
  double slope_l2 = 0.0;
  double slope_grad = 0.0;
  double expected_l2() const { return -(1.0 / q - 0.5); }
  double expected_grad() const { return -1.0 / q; }
  std::vector<DecaySample> samples;
};

double ls_slope(const std::vector<double>& x, const std::vector<double>& y);
DecayFit decay_fit(const ForceMode& f, double beta, double q, const std::vector<double>& t_grid,
                   const ContourSpec& c = {}, const EvolveOptions& opt = {});

std::string decay_csv(const DecayFit& d);
std::string fit_json(const DecayFit& d);

}  // namespace esr
