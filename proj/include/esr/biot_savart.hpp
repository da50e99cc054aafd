#pragma once

#include "esr/radial_grid.hpp"

namespace esr {

struct VorticityMode {
  int n = 1;
  RadialProfile omega;
};

struct StreamFunction {
  RadialProfile psi;
  RadialProfile dpsi;  // d psi / dr
  cplx d_const;        // integral of s^{1-|n|} omega over (1, infinity)
  double tail_bound;   // estimate of the truncated part of d_const
};

// Relative decay |omega| r at r_max below which the outer integral counts as converged.
inline constexpr double kTailDecay = 1e-10;

StreamFunction stream_full(const VorticityMode& w);
// Outer integral through the rotation form of u, where omega = rot u.
StreamFunction stream_full(const ModeField& u);

RadialProfile stream(const VorticityMode& w);
ModeField velocity(const VorticityMode& w);
ModeField velocity(const StreamFunction& s, int n);

}  // namespace esr
