#include "embres/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "embres/errors.hpp"
#include "embres/tridiagonal.hpp"

namespace embres {

TailRatios tail_ratios(double eps, cplx lambda) {
  if (!(eps > 0.0)) throw std::invalid_argument("tail_ratios: eps must be positive");
  const cplx b = cplx(0.0, 1.0) * (lambda + cplx(0.0, eps));
  const cplx disc = std::sqrt(b * b + 4.0);
  // Larger root without cancellation; the other from the product -1.
  const double sign = std::real(std::conj(b) * disc) >= 0.0 ? 1.0 : -1.0;
  const cplx big = -(b + sign * disc) / 2.0;
  const cplx small = -1.0 / big;
  if (std::abs(std::abs(big) - 1.0) < 1e-15)
    throw std::invalid_argument("tail_ratios: both roots on the unit circle");
  return {big, small};
}

ResolventSolution limiting_absorption_solve(const FiberOperator& op, cplx lambda, double eps, const FourierVector& f,
                                            std::span<const PinnedCoefficient> pins, int n_check) {
  if (op.t != 0.0) throw std::invalid_argument("limiting_absorption_solve: operator must be inviscid (t = 0)");
  const TailRatios ratios = tail_ratios(eps, lambda);
  const Eigen::Index last = op.size() - 1;

  Tridiagonal<cplx> sys = op.bands.shifted(lambda + cplx(0.0, eps));
  Eigen::VectorXcd rhs = op.embed(f);
  sys.diag(last) += op.upper_at(op.N) * ratios.decaying;
  sys.diag(0) += op.lower_at(-op.N - 1) / ratios.growing;

  for (const auto& pin : pins) {
    if (pin.n1 < -op.N || pin.n1 > op.N)
      throw std::invalid_argument("limiting_absorption_solve: pinned mode " + std::to_string(pin.n1) +
                                  " outside the truncation");
    const Eigen::Index k = op.index(pin.n1);
    sys.diag(k) = 1.0;
    if (k > 0) sys.lower(k - 1) = 0.0;
    if (k < last) sys.upper(k) = 0.0;
    rhs(k) = pin.value;
  }

  TridiagonalLU<cplx> lu(sys);
  if (lu.is_singular())
    throw NumericalError("limiting_absorption_solve: bordered system is singular",
                         std::numeric_limits<double>::infinity());
  const Eigen::VectorXcd probe = Eigen::VectorXcd::Ones(op.size());
  const double condition = sys.norm_inf() * lu.solve(probe).cwiseAbs().maxCoeff();
  if (!(condition < 1e15))
    throw NumericalError("limiting_absorption_solve: bordered system is numerically singular (condition estimate " +
                             std::to_string(condition) + ")",
                         condition);

  ResolventSolution sol;
  sol.coeffs = op.wrap(lu.solve(rhs));
  sol.eps = eps;
  sol.N = op.N;
  sol.lambda = lambda;
  sol.condition = condition;
  sol.tail_residual = residual_tail(op, sol, f, n_check);
  return sol;
}

double residual_tail(const FiberOperator& op, const ResolventSolution& sol, const FourierVector& f, int n_check) {
  if (n_check <= 0) return 0.0;
  const TailRatios ratios = tail_ratios(sol.eps, sol.lambda);
  const int N = op.N;
  const int reach = N + n_check + 1;

  // Coefficients on [-reach, reach].
  std::vector<cplx> a(static_cast<std::size_t>(2 * reach + 1));
  auto at = [&](int n) -> cplx& { return a[static_cast<std::size_t>(n + reach)]; };
  for (int n = -N; n <= N; ++n) at(n) = sol.coeffs[n];
  for (int n = N + 1; n <= reach; ++n) at(n) = ratios.decaying * at(n - 1);
  for (int n = -N - 1; n >= -reach; --n) at(n) = at(n + 1) / ratios.growing;

  double sum = 0.0;
  auto accumulate = [&](int n) {
    const cplx row = op.lower_defect_at(n - 1) * at(n - 1) + op.diagonal_defect_at(n) * at(n) +
                     op.upper_defect_at(n) * at(n + 1) - f[n];
    sum += std::norm(row);
  };
  for (int n = N + 1; n <= N + n_check; ++n) accumulate(n);
  for (int n = -N - 1; n >= -N - n_check; --n) accumulate(n);
  return two_pi * std::sqrt(sum);
}

cplx extrapolate_eps(std::span<const std::pair<double, cplx>> samples) {
  if (samples.size() < 2) throw std::invalid_argument("extrapolate_eps: need at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j)
      if (samples[i].first == samples[j].first) throw std::invalid_argument("extrapolate_eps: duplicate eps");

  std::vector<cplx> p;
  for (const auto& s : samples) p.push_back(s.second);
  const std::size_t n = samples.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      const double xi = samples[i].first, xim = samples[i + m].first;
      p[i] = (-xim * p[i] + xi * p[i + 1]) / (xi - xim);
    }
  }
  return p[0];
}

std::vector<double> default_eps_schedule() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}; }

LimitingAbsorption limiting_absorption_limit(const FiberOperator& op, cplx lambda, const FourierVector& f,
                                             const LimitOptions& opts, std::span<const PinnedCoefficient> pins) {
  if (opts.eps_schedule.size() < 2) throw std::invalid_argument("limiting_absorption_limit: need >= 2 eps values");
  if (opts.degree < 1) throw std::invalid_argument("limiting_absorption_limit: degree must be >= 1");

  LimitingAbsorption out;
  for (double eps : opts.eps_schedule)
    out.solves.push_back(limiting_absorption_solve(op, lambda, eps, f, pins, opts.n_check));

  std::vector<std::size_t> order(out.solves.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out.solves[a].eps < out.solves[b].eps; });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(opts.degree) + 1));

  out.coeffs = FourierVector::zeros(op.n2, op.N);
  std::vector<std::pair<double, cplx>> samples(order.size());
  for (int n = -op.N; n <= op.N; ++n) {
    for (std::size_t i = 0; i < order.size(); ++i)
      samples[i] = {out.solves[order[i]].eps, out.solves[order[i]].coeffs[n]};
    out.coeffs.at(n) = extrapolate_eps(samples);
  }
  return out;
}

}  // namespace embres
