#pragma once

#include <array>
#include <functional>

#include "esr/radial_grid.hpp"

namespace esr {

// (v_r, v_theta) of a planar field at polar point (r, theta).
using FieldSampler = std::function<std::array<cplx, 2>(double r, double theta)>;

// Fourier coefficient of exp(i n theta) at each grid node (trapezoid rule in theta).
ModeField project_mode(const FieldSampler& field, int n, const GridPtr& grid, int n_theta = 64);

RadialProfile mode_div(const ModeField& m);
RadialProfile mode_rot(const ModeField& m);

// Integral over [1, r_max] of |grad (v e^{i n theta})|^2 r dr.
double grad_energy(const ModeField& m);
// Lower bound with the (|n|-1)^2 / r^2 weights.
double grad_energy_lower(const ModeField& m);
// Integral of |v|^2 / r^2 r dr.
double weighted_energy(const ModeField& m);

// Theta(T) = integral over (0, T) of exp(-1/tau) / tau.
double theta_of(double T);

struct ThetaCheck {
  double T, theta, lower, upper;
  bool holds;
};
ThetaCheck theta_bounds(double T);
bool theta_bounds_check(double T);

}  // namespace esr
