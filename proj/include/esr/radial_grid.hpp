#pragma once

#include <memory>
#include <string>
#include <vector>

#include "esr/types.hpp"

namespace esr {

// Upper bound on the panel width over [r_lo, r_hi].
struct WidthCap {
  double r_lo;
  double r_hi;
  double w_max;
};

struct GridOptions {
  double r_max = 50.0;
  int panels_per_decade = 6;
  int nodes_per_panel = 16;
  std::vector<WidthCap> caps;
  std::vector<double> breakpoints;
};

// Piecewise Chebyshev-Lobatto grid on [1, r_max]; neighbouring panels share endpoints.
class RadialGrid {
 public:
  RadialGrid(std::vector<double> breaks, int q);
  static std::shared_ptr<const RadialGrid> build(const GridOptions& opt);

  std::size_t size() const { return r_.size(); }
  int panels() const { return int(breaks_.size()) - 1; }
  int q() const { return q_; }
  double r_min() const { return breaks_.front(); }
  double r_max() const { return breaks_.back(); }
  std::size_t index(int panel, int j) const { return std::size_t(panel) * (q_ - 1) + j; }
  double panel_lo(int p) const { return breaks_[p]; }
  double panel_hi(int p) const { return breaks_[p + 1]; }

  const std::vector<double>& nodes() const { return r_; }
  const std::vector<double>& breaks() const { return breaks_; }
  // quadrature weights for the integral of f r dr and of f dr
  const std::vector<double>& weights() const { return w_rdr_; }
  const std::vector<double>& weights_dr() const { return w_dr_; }

  // reference panel on [-1, 1]
  const std::vector<double>& ref_nodes() const { return x_; }
  const std::vector<double>& ref_bary() const { return bw_; }
  double ref_diff(int i, int j) const { return d_[i * q_ + j]; }
  // integral of the j-th Lagrange polynomial from -1 to x_i
  double ref_cumulative(int i, int j) const { return s_[i * q_ + j]; }

  std::vector<cplx> derivative(const std::vector<cplx>& f) const;
  std::vector<double> derivative(const std::vector<double>& f) const;
  // running integrals of f dr from r_min, and to r_max
  std::vector<cplx> cumulative(const std::vector<cplx>& f) const;
  std::vector<cplx> cumulative_from_right(const std::vector<cplx>& f) const;
  cplx integrate(const std::vector<cplx>& f) const;     // f r dr
  cplx integrate_dr(const std::vector<cplx>& f) const;  // f dr
  double integrate(const std::vector<double>& f) const;
  cplx interpolate(const std::vector<cplx>& f, double r) const;
  int panel_of(double r) const;

 private:
  std::vector<double> breaks_;
  int q_;
  std::vector<double> r_, w_rdr_, w_dr_;
  std::vector<double> x_, bw_, d_, s_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

struct RadialProfile {
  GridPtr grid;
  std::vector<cplx> values;

  RadialProfile() = default;
  RadialProfile(GridPtr g, std::vector<cplx> v);
  explicit RadialProfile(GridPtr g);  // zeros

  double sup_norm() const;
  double l2_norm() const;  // (integral of |f|^2 r dr)^(1/2)
  cplx at(double r) const { return grid->interpolate(values, r); }
  void check_finite(const char* what) const;
};

struct ModeField {
  int n = 1;
  RadialProfile vr;
  RadialProfile vtheta;

  ModeField() = default;
  ModeField(int n_, RadialProfile r, RadialProfile t);
  double l2_norm() const;
};

std::string profile_csv(const RadialProfile& p);

}  // namespace esr
