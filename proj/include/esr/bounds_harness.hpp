#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "esr/radial_grid.hpp"

namespace esr {

enum class BesselFamily { B2, B3, B4 };
const char* to_string(BesselFamily f);

// One evaluation point of a Bessel-integral inequality. k selects the order shift (0 or 1),
// p the Lebesgue exponent of the B4 norms.
struct BoundSample {
  double beta = 0.1;
  cplx lambda;
  double r = 1.0;
  double tau = 1.0;
  int k = 0;
  double p = 2.0;
};

struct BoundCheck {
  std::string id;
  std::vector<BoundSample> samples;
  int n_samples = 0;
  // smallest constant that makes every sample hold
  double fitted_C = 0.0;
  // worst LHS / (fitted_C * RHS) over the base and quadrature-refined evaluations
  double max_violation_ratio = 0.0;
  // relative change of fitted_C under quadrature doubling and under |lambda| -> |lambda|/2
  double refinement_drift = 0.0;
  // fitted_C after |lambda| -> |lambda|/100 divided by fitted_C
  double growth_two_decades = 0.0;
  // log-log slope of per-beta constants, when the check includes a beta sweep
  double beta_exponent = 0.0;
  bool has_beta_exponent = false;
  double declared_exponent = 0.0;
};

// Estimate ids of each family, e.g. "B2.est1".
std::vector<std::string> estimate_ids(BesselFamily f);

// Reduced LHS and closed-form majorant (constant 1) of one estimate at one sample.
struct BoundTerms {
  double lhs = 0.0;
  double rhs = 0.0;
};
// Throws ValidationError when the sample is outside the estimate's regime.
BoundTerms evaluate_estimate(const std::string& id, const BoundSample& s, int refine = 1);
void validate_sample(const std::string& id, const BoundSample& s);

// Seeded samples inside the regime of one estimate: |lambda| in [1e-8, 1], |arg lambda| < 3 pi / 4.
std::vector<BoundSample> draw_samples(const std::string& id, int count, std::uint64_t seed);

BoundCheck check_estimate(const std::string& id, const std::vector<BoundSample>& samples, int threads = 1);
// samples empty: a seeded draw per estimate
std::vector<BoundCheck> check_bessel_integral_bounds(BesselFamily f, const std::vector<BoundSample>& samples = {},
                                                     std::uint64_t seed = 1, int per_estimate = 40,
                                                     int threads = 1);

// |lambda|^{Re mu / 2} ||K_mu(sqrt(lambda) .)||_{L^p((1, inf); r dr)} with sqrt(lambda) = e^{-x/2 + i arg/2};
// stays finite for x far beyond the double range of lambda.
double k_norm_scaled(double beta, double x, double arg, double p, int refine = 1);

// Per-beta sup of the scaled K norm (p = 2) and the slope of log C against log beta.
BoundCheck k_norm_beta_sweep(const std::vector<double>& betas, int threads = 1);

// Energy inequality |<rot v, v_r / r>| <= ||v|| ||grad v|| / T + Theta(T) ||grad v||^2 on mode fields.
struct EnergyTerms {
  double lhs = 0.0;
  double norm_v = 0.0;
  double norm_grad = 0.0;
  double rhs(double T) const;
};
EnergyTerms energy_terms(const ModeField& v);

// Random smooth, compactly supported, divergence-free mode n fields from 2D stream functions.
struct EnergySampleSpec {
  int count = 100;
  int n = 1;
  std::uint64_t seed = 1;
  int n_theta = 64;
  int nodes_per_panel = 16;
};
std::vector<ModeField> random_solenoidal_fields(const EnergySampleSpec& spec);

// One check per T in {e^2, e^4, e^8}; the stated constant is 1, so fitted_C is the worst LHS/RHS.
// refinement_drift compares against doubled radial and angular resolution.
std::vector<BoundCheck> check_energy_ingredients(const EnergySampleSpec& spec = {}, int threads = 1);
std::vector<BoundCheck> check_energy_ingredients(const std::vector<ModeField>& v_samples,
                                                 const std::vector<ModeField>& refined = {});

// beta-singularity audit of the resolvent estimates: per-beta sup of the normalized quantity over a
// sampled lambda range and a data family, then the log-log slope against the declared power.
struct AuditSpec {
  std::vector<double> betas{0.1, 0.15, 0.2, 0.3};
  int x_points = 16;   // -log|lambda| samples per beta
  int refine_points = 6;
  int threads = 1;
};
struct AuditEntry {
  std::string id;
  double declared = 0.0;
  std::vector<double> betas;
  std::vector<double> constants;
  std::vector<double> argmax_x;  // -log|lambda| of the worst sample
  double slope = 0.0;
  bool within(double tol = 0.5) const { return std::abs(slope - declared) <= tol; }
};
// Entries: constant c (q = 1, declared -1), velocity L2 (q = 2, -2), vorticity pairing (q = 2, -5).
std::vector<AuditEntry> beta_audit(const AuditSpec& spec = {});

std::string report_json(std::uint64_t seed, const std::vector<BoundCheck>& checks,
                        const std::vector<AuditEntry>& audit = {});

}  // namespace esr
