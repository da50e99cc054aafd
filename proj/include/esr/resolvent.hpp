#pragma once

#include <string>
#include <vector>

#include "esr/biot_savart.hpp"
#include "esr/forces.hpp"
#include "esr/special_functions.hpp"

namespace esr {

struct ResolventQuery {
  cplx lambda;
  double beta = 0.0;
  int n = 1;
  cplx sqrt_lambda;  // principal root, Re > 0
  Order order;
};

ResolventQuery make_query(cplx lambda, double beta, int n);
// For |lambda| below the double range: lambda may underflow to 0, which only the body-force
// and boundary solves tolerate.
ResolventQuery make_query_sqrt(cplx sqrt_lambda, double beta, int n);

// Bessel evaluators for mu, mu + 1 and mu - 1 at one order.
struct BesselTriple {
  explicit BesselTriple(const Order& o);
  BesselOrder mu, mu_plus, mu_minus;
};

struct KernelValue {
  cplx value;
  cplx scaled;  // value * e^{sqrt(lambda)}, finite even when value underflows
  double est_abs_error = 0.0;
};

// F_n = integral over (1, inf) of K_mu(sqrt(lambda) s) ds (|n| = 1).
KernelValue f_n_kernel(const ResolventQuery& q);
KernelValue f_n_kernel(const ResolventQuery& q, const BesselTriple& b);

// Below this |F_n| e^{Re sqrt(lambda)} the representation is not used.
inline constexpr double kKernelFloor = 1e-13;

struct SolveOptions {
  int nodes_per_panel = 16;
  int panels_per_decade = 6;
  double r_max = 0.0;  // 0: chosen from sqrt(lambda) and the data support
  GridPtr grid;        // reuse this grid instead of building one
  bool velocity = true;
  bool residuals = true;
};

// Grid resolving the boundary layers of every listed sqrt(lambda) and the data.
GridPtr resolvent_grid(const std::vector<cplx>& sqrt_lambdas, const ForceMode& f,
                       const SolveOptions& opt = {});

struct Residuals {
  double ode = 0.0;
  double div = 0.0;
  double trace = 0.0;
};

struct ModeSolution {
  ResolventQuery query;
  ForceKind kind = ForceKind::body;
  ModeField velocity;
  RadialProfile vorticity;
  RadialProfile omega_hom;   // multiple of K_mu(sqrt(lambda) r)
  RadialProfile omega_part;  // particular density
  cplx c_const = 0.0;
  cplx Fn_value = 0.0;
  double Fn_error = 0.0;
  double tail_bound = 0.0;
  Residuals residuals;
};

RadialProfile phi_density(const ResolventQuery& q, const ForceMode& f, const GridPtr& grid);
// integral of Phi dr with the truncated tail estimated
cplx c_constant(const ResolventQuery& q, const RadialProfile& phi, double* tail = nullptr);

ModeSolution solve_body_force(const ResolventQuery& q, const ForceMode& f, const SolveOptions& opt = {});
ModeSolution solve_div_force(const ResolventQuery& q, const ForceMode& F, const SolveOptions& opt = {});
ModeSolution solve_boundary(const ResolventQuery& q, const ForceMode& b, const SolveOptions& opt = {});
ModeSolution solve(const ResolventQuery& q, const ForceMode& f, const SolveOptions& opt = {});

// Vorticity only, on a given grid; the semigroup sums these before one Biot-Savart step.
RadialProfile solve_vorticity(const ResolventQuery& q, const ForceMode& f, const GridPtr& grid,
                              const BesselTriple* b = nullptr);

// Mode components of a body force sampled on a grid; div forces are differentiated.
ModeField sample_force(const ForceMode& f, const GridPtr& grid);
// (div F)_n as a body force, by differentiating the sampled components on the grid.
ModeField mode_divergence(const ForceMode& F, const GridPtr& grid);

struct IdentityReport {
  double inner = 0.0;         // r^{-m} int_1^r s^{1+m} Phi vs its J sum
  double outer = 0.0;         // r^m int_r^inf s^{1-m} Phi vs its J sum
  double cancellation = 0.0;  // J_9(r) - r^{-m} J_17(1) (body) ; unused for div
  double constant = 0.0;      // c against the J values at r = 1
  double max() const;
};

IdentityReport j1_identity(const ResolventQuery& q, const ForceMode& f, const SolveOptions& opt = {});
IdentityReport j2_identity(const ResolventQuery& q, const ForceMode& F, const SolveOptions& opt = {});

// integral of omega conj(w_r) dr, the weighted pairing <omega, w_r / r> with measure r dr
cplx pairing(const RadialProfile& omega, const ModeField& w);

std::string to_json(const ModeSolution& s);

}  // namespace esr
