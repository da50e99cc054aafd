#pragma once

#include <optional>
#include <string>
#include <vector>

#include "esr/types.hpp"

namespace esr {

struct ScanSpec {
  std::vector<double> betas;
  double sector_epsilon = pi / 4;
  double log10_min = -12.0;
  std::optional<double> log10_max;  // default: log10(beta^4)
  int points_per_decade = 8;
  std::vector<double> rays;  // arg(lambda), each within [-(pi - eps), pi - eps]
  int n = 1;
  bool exact_gamma = true;  // false: gamma(zeta) replaced by the Euler constant
  int threads = 1;
};

// count rays spread evenly over the closed sector |arg| <= pi - eps
std::vector<double> sector_rays(int count, double sector_epsilon);

struct ScanRow {
  double beta = 0.0;
  cplx lambda;
  double abs_Fn = 0.0;
  double normalized = 0.0;  // beta |F| |lambda|^{Re mu / 2} / min(1, -beta^2 log|lambda|)
  double model_abs = 0.0;   // |F| from the small-lambda expansion without remainder
  double model_err = 0.0;   // |R_n|
  bool zero_flag = false;   // |F| below the kernel floor
  std::string error;        // non-empty when the sample failed
};

struct ScanReport {
  std::vector<ScanRow> rows;
  double c0 = 0.0;  // inf of N over successful samples with beta > 0
  int zero_flags = 0;
  int failures = 0;
  bool lower_bound_holds() const { return c0 > 0.0 && zero_flags == 0 && failures == 0; }
};

void validate(const ScanSpec& spec);
ScanRow scan_sample(double beta, cplx lambda, int n, bool exact_gamma = true);
ScanReport scan_fn(const ScanSpec& spec);

// exp(zeta gamma(zeta)) in closed form
cplx exp_zeta_gamma(cplx zeta);
// |R_n(lambda)| from inverting the expansion against the quadratured F_n
double expansion_check(double beta, cplx lambda, bool exact_gamma = true, int n = 1);

struct RemainderFit {
  double beta = 0.0;
  double arg = 0.0;
  double c1_top = 0.0;   // sup |R| / |lambda|^{Re mu / 2} over the top decade
  double c1_full = 0.0;  // same over all sampled decades
  int samples = 0;
  bool stable() const { return c1_full <= 1.05 * c1_top; }
};

RemainderFit fit_remainder(double beta, double arg, double log10_top, double decades, int per_decade = 8,
                           bool exact_gamma = true);

struct ResonancePoint {
  double beta = 0.0;
  cplx lambda_star;
  double g_min = 0.0;    // min of the normalized kernel N on the positive axis
  double neg_log = 0.0;  // -log|lambda*|
};

struct ResonanceSummary {
  std::vector<ResonancePoint> points;
  double c_prime = 0.0;  // min beta * (-log|lambda*|)
  double c = 0.0;        // max beta^2 * (-log|lambda*|)
  double exponent = 0.0; // p in -log|lambda*| ~ beta^{-p}
  bool monotone = true;  // -log|lambda*| grows as beta decreases
  ScanReport heatmap;
};

ResonancePoint locate_resonance(double beta, int n = 1);
ResonanceSummary resonance_report(const std::vector<double>& betas, int n = 1, int threads = 1,
                                  int heat_rays = 9, int heat_per_decade = 2);

std::string scan_csv(const ScanReport& r);
std::string resonance_json(const ResonanceSummary& s);

}  // namespace esr
