#pragma once

#include <span>
#include <utility>
#include <vector>

#include "embres/fourier.hpp"
#include "embres/model.hpp"

namespace embres {

// Roots of r^2 + i(lambda + i eps) r - 1 = 0, the far-field recurrence of the free fiber.
// |decaying| < 1 < |growing|; their product is -1.
struct TailRatios {
  cplx growing;   // used for n -> -infinity:  a_{n-1} = a_n / growing
  cplx decaying;  // used for n -> +infinity:  a_{n+1} = decaying * a_n
};

// Throws std::invalid_argument for eps <= 0 (or whenever both roots sit on the unit circle).
TailRatios tail_ratios(double eps, cplx lambda = 0.0);

// Fixes a_{n1} = value by replacing row n1 of the system.
struct PinnedCoefficient {
  int n1;
  cplx value = 0.0;
};

struct ResolventSolution {
  FourierVector coeffs;  // a_n on [-N, N]; the tails are geometric
  double eps = 0.0;
  int N = 0;
  cplx lambda = 0.0;
  double tail_residual = 0.0;
  double condition = 0.0;  // one-step inverse-power estimate of cond_1
};

// Solves rows -N..N of (P - lambda - i eps) a = f with the decaying closures
// a_{N+1} = decaying a_N and a_{-N-1} = a_{-N} / growing folded into the boundary rows.
// The operator must be inviscid (t = 0). Throws NumericalError if the bordered system is singular.
ResolventSolution limiting_absorption_solve(const FiberOperator& op, cplx lambda, double eps, const FourierVector& f,
                                            std::span<const PinnedCoefficient> pins = {}, int n_check = 20);

// L^2 norm of the defect rows N+1 <= |n1| <= N + n_check of (P - lambda - i eps) a - f, with a
// extended by its geometric tails. Evaluated through the deviation from the free recurrence,
// which the tails solve exactly.
double residual_tail(const FiberOperator& op, const ResolventSolution& sol, const FourierVector& f, int n_check);

// Value at eps = 0 of the interpolating polynomial through the samples (Neville).
// Throws std::invalid_argument on fewer than two samples or repeated eps.
cplx extrapolate_eps(std::span<const std::pair<double, cplx>> samples);

// Geometric schedule from 1e-2 down to 1e-8, seven points.
std::vector<double> default_eps_schedule();

struct LimitOptions {
  std::vector<double> eps_schedule = default_eps_schedule();
  int degree = 2;  // extrapolation uses the degree + 1 smallest eps
  int n_check = 20;
};

struct LimitingAbsorption {
  FourierVector coeffs;                   // extrapolated to eps = 0
  std::vector<ResolventSolution> solves;  // one per schedule entry, in schedule order
};

LimitingAbsorption limiting_absorption_limit(const FiberOperator& op, cplx lambda, const FourierVector& f,
                                             const LimitOptions& opts = {},
                                             std::span<const PinnedCoefficient> pins = {});

}  // namespace embres
