#pragma once

#include <span>
#include <vector>

#include "embres/model.hpp"
#include "embres/spectra.hpp"

namespace embres {

enum class CurveParameter { t, s };

// An eigenvalue followed along a parameter grid. Jumps larger than the step bound are listed in
// `breaks` (index of the later point); values are never interpolated across them. s-curves also
// break where the first-order error bound condition * residual exceeds TrackOptions::error_bound:
// at small t_reg the truncated operator is strongly non-normal and inverse iteration can return a
// pseudomode near the shift instead of the eigenvalue.
struct Curve {
  CurveParameter parameter = CurveParameter::t;
  std::vector<double> grid;
  std::vector<cplx> values;
  std::vector<double> residual;
  std::vector<double> error_bound;  // s-curves: eigenvalue condition number times residual
  std::vector<std::size_t> breaks;
  int branch_id = 1;
  int N = 0;             // truncation used for the whole curve
  double t_reg = 0.0;    // viscosity (s-curves only)
};

struct TrackOptions {
  int N = 0;                 // 0 selects viscous_truncation(smallest positive t)
  double step_bound = 0.25;  // largest accepted |lambda_{k+1} - lambda_k|
  double error_bound = 1e-6;  // s-tracking: largest accepted condition * residual
  EigsOptions eigs;
};

// Truncation at which the viscous damping exp(-t n^3 / 6) of outgoing waves has
// eliminated the boundary: ceil(cbrt(1000 / t)), clamped to [8, 20000].
int viscous_truncation(double t);

// lambda(t) for P + i t Delta, continued from an eigenpair of P. Each t > 0 takes one eigs_near
// solve shifted at the previous value and warm-started from the previous vector; t = 0 reports
// the given eigenvalue.
Curve track_viscous_eigenvalue(const PotentialSpec& spec, const Eigenpair& pair, std::span<const double> t_grid,
                               const TrackOptions& opts = {});

// d lambda / dt at t = 0+:  -i ||grad u||^2.
cplx viscosity_derivative(const Eigenpair& pair);

// Derivative at 0 of the quadratic through the first three points of the curve.
cplx fd_slope(const Curve& curve);

// Resonance curves lambda(s) of P(s), realized as eigenvalues of P(s) + i t_reg Delta. Continuation
// starts at the grid point nearest s = 0 and runs outward in both directions, matching branches
// by minimal total displacement from a linear prediction. When `predicted_s2` is given
// (one s^2 coefficient per basis vector), each side of s = 0 is relabeled afterwards to best match
// lambda0 + c s^2.
std::vector<Curve> track_resonance_branches(const PotentialSpec& spec, std::span<const Eigenpair> basis,
                                            std::span<const double> s_grid, double t_reg = 1e-6,
                                            std::span<const cplx> predicted_s2 = {}, const TrackOptions& opts = {});

Curve track_resonance_in_s(const PotentialSpec& spec, const Eigenpair& pair, std::span<const double> s_grid,
                           double t_reg = 1e-6, const TrackOptions& opts = {});

}  // namespace embres
