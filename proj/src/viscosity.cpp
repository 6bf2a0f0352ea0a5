#include "embres/viscosity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace embres {

namespace {

void require_increasing(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + ": empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing");
}

int window_half_width(const FourierVector& v) {
  const auto sup = v.support();
  if (!sup) return 1;
  return std::max({1, std::abs(sup->first), std::abs(sup->second)});
}

// Permutation perm minimizing sum_b |found[perm[b]] - predicted[b]|.
std::vector<std::size_t> best_assignment(const std::vector<cplx>& found, const std::vector<cplx>& predicted) {
  std::vector<std::size_t> perm(found.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t b = 0; b < perm.size(); ++b) cost += std::abs(found[perm[b]] - predicted[b]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// 1 / |<y, x>| with y the left eigenvector, from inverse iteration on the adjoint.
double eigenvalue_condition(const Tridiagonal<cplx>& m, cplx value, const Eigen::VectorXcd& x) {
  TridiagonalLU<cplx> lu(m.adjoint().shifted(std::conj(value)));
  if (lu.is_singular()) return 1.0;
  Eigen::VectorXcd y = x;
  for (int step = 0; step < 3; ++step) {
    y = lu.solve(y);
    const double n = y.norm();
    if (!std::isfinite(n) || n == 0.0) return std::numeric_limits<double>::infinity();
    y /= n;
  }
  const double c = std::abs(y.dot(x));
  return c > 0.0 ? 1.0 / c : std::numeric_limits<double>::infinity();
}

}  // namespace

int viscous_truncation(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("viscous_truncation: t must be positive");
  const double n = std::ceil(std::cbrt(1000.0 / t));
  return static_cast<int>(std::clamp(n, 8.0, 20000.0));
}

Curve track_viscous_eigenvalue(const PotentialSpec& spec, const Eigenpair& pair, std::span<const double> t_grid,
                               const TrackOptions& opts) {
  require_increasing(t_grid, "track_viscous_eigenvalue");
  if (t_grid.front() < 0.0) throw std::invalid_argument("track_viscous_eigenvalue: negative viscosity");

  Curve curve;
  curve.parameter = CurveParameter::t;
  curve.N = opts.N;
  if (curve.N == 0) {
    curve.N = window_half_width(pair.vector);
    const auto first_positive = std::find_if(t_grid.begin(), t_grid.end(), [](double t) { return t > 0.0; });
    if (first_positive != t_grid.end()) curve.N = std::max(curve.N, viscous_truncation(*first_positive));
  }

  cplx previous = pair.lambda;
  Eigen::VectorXcd vector = pair.vector.on_window(curve.N).coeffs();
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid[k];
    cplx value = pair.lambda;
    double residual = pair.residual;
    if (t > 0.0) {
      const FiberOperator op = assemble_fiber(spec, pair.vector.n2(), curve.N, 0.0, t);
      EigsOptions eo = opts.eigs;
      eo.start = {vector};
      auto found = eigs_near(op.bands, previous, 1, eo);
      value = found[0].value;
      residual = found[0].residual;
      vector = std::move(found[0].vector);
    }
    if (std::abs(value - previous) > opts.step_bound) curve.breaks.push_back(k);
    curve.grid.push_back(t);
    curve.values.push_back(value);
    curve.residual.push_back(residual);
    previous = value;
  }
  return curve;
}

cplx viscosity_derivative(const Eigenpair& pair) { return cplx(0.0, -grad_norm_sq(pair.vector)); }

cplx fd_slope(const Curve& curve) {
  if (curve.grid.size() < 3 || curve.values.size() != curve.grid.size())
    throw std::invalid_argument("fd_slope: need at least three curve points");
  const double x0 = curve.grid[0], x1 = curve.grid[1], x2 = curve.grid[2];
  const cplx y0 = curve.values[0], y1 = curve.values[1], y2 = curve.values[2];
  // Derivative of the Lagrange quadratic, evaluated at 0.
  return y0 * (-(x1 + x2)) / ((x0 - x1) * (x0 - x2)) + y1 * (-(x0 + x2)) / ((x1 - x0) * (x1 - x2)) +
         y2 * (-(x0 + x1)) / ((x2 - x0) * (x2 - x1));
}

std::vector<Curve> track_resonance_branches(const PotentialSpec& spec, std::span<const Eigenpair> basis,
                                            std::span<const double> s_grid, double t_reg,
                                            std::span<const cplx> predicted_s2, const TrackOptions& opts) {
  require_increasing(s_grid, "track_resonance_in_s");
  if (basis.empty() || basis.size() > 4) throw std::invalid_argument("track_resonance_in_s: need 1 to 4 eigenpairs");
  if (!(t_reg > 0.0)) throw std::invalid_argument("track_resonance_in_s: t_reg must be positive");
  if (!predicted_s2.empty() && predicted_s2.size() != basis.size())
    throw std::invalid_argument("track_resonance_in_s: one predicted coefficient per branch");

  const std::size_t m = basis.size();
  const std::size_t count = s_grid.size();
  const cplx lambda0 = basis[0].lambda;
  const int n2 = basis[0].vector.n2();
  int N = opts.N;
  if (N == 0) {
    N = viscous_truncation(t_reg);
    for (const auto& p : basis) N = std::max(N, window_half_width(p.vector));
  }

  std::vector<std::vector<cplx>> values(m, std::vector<cplx>(count));
  std::vector<std::vector<double>> residual(m, std::vector<double>(count));
  std::vector<std::vector<double>> bound(m, std::vector<double>(count));
  std::vector<std::vector<std::size_t>> breaks(m);

  const std::size_t start = static_cast<std::size_t>(
      std::min_element(s_grid.begin(), s_grid.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
      s_grid.begin());

  std::vector<Eigen::VectorXcd> start_vectors;
  for (const auto& p : basis) start_vectors.push_back(p.vector.on_window(N).coeffs());

  auto solve_at = [&](std::size_t i, const std::vector<cplx>& predicted, std::vector<Eigen::VectorXcd>& vectors) {
    const FiberOperator op = assemble_fiber(spec, n2, N, s_grid[i], t_reg);
    cplx shift = 0.0;
    for (cplx p : predicted) shift += p;
    shift /= static_cast<double>(m);
    EigsOptions eo = opts.eigs;
    eo.start = vectors;
    auto found = eigs_near(op.bands, shift, static_cast<int>(m), eo);
    std::vector<cplx> found_values;
    for (const auto& f : found) found_values.push_back(f.value);
    const auto perm = best_assignment(found_values, predicted);
    for (std::size_t b = 0; b < m; ++b) {
      auto& pick = found[perm[b]];
      values[b][i] = pick.value;
      residual[b][i] = pick.residual;
      bound[b][i] = eigenvalue_condition(op.bands, pick.value, pick.vector) * pick.residual;
      vectors[b] = std::move(pick.vector);
    }
  };

  auto prior = [&](std::size_t i) {
    std::vector<cplx> predicted(m, lambda0);
    if (!predicted_s2.empty())
      for (std::size_t b = 0; b < m; ++b) predicted[b] += predicted_s2[b] * s_grid[i] * s_grid[i];
    return predicted;
  };

  std::vector<Eigen::VectorXcd> origin_vectors = start_vectors;
  solve_at(start, prior(start), origin_vectors);

  // Walk outward from the start point in direction dir (+1 or -1).
  auto walk = [&](int dir) {
    std::vector<Eigen::VectorXcd> vectors = origin_vectors;
    std::size_t steps = 0;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(start) + dir; i >= 0 && i < static_cast<std::ptrdiff_t>(count);
         i += dir, ++steps) {
      const auto cur = static_cast<std::size_t>(i);
      const auto prev = static_cast<std::size_t>(i - dir);
      std::vector<cplx> predicted(m);
      for (std::size_t b = 0; b < m; ++b) {
        predicted[b] = values[b][prev];
        if (steps >= 1) {
          const auto prev2 = static_cast<std::size_t>(i - 2 * dir);
          predicted[b] += (values[b][prev] - values[b][prev2]) * (s_grid[cur] - s_grid[prev]) /
                          (s_grid[prev] - s_grid[prev2]);
        }
      }
      solve_at(cur, predicted, vectors);
      for (std::size_t b = 0; b < m; ++b)
        if (std::abs(values[b][cur] - values[b][prev]) > opts.step_bound || !(bound[b][cur] <= opts.error_bound))
          breaks[b].push_back(cur);
    }
  };
  walk(+1);
  walk(-1);

  if (!predicted_s2.empty() && m > 1) {
    auto relabel = [&](std::size_t lo, std::size_t hi) {  // half-open range of grid indices
      if (lo >= hi) return;
      std::vector<std::size_t> perm(m);
      std::iota(perm.begin(), perm.end(), 0);
      std::vector<std::size_t> best = perm;
      double best_cost = std::numeric_limits<double>::infinity();
      do {
        double cost = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
          for (std::size_t b = 0; b < m; ++b)
            cost += std::abs(values[perm[b]][i] - lambda0 - predicted_s2[b] * s_grid[i] * s_grid[i]);
        if (cost < best_cost) {
          best_cost = cost;
          best = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      auto old_values = values;
      auto old_residual = residual;
      auto old_bound = bound;
      for (std::size_t i = lo; i < hi; ++i)
        for (std::size_t b = 0; b < m; ++b) {
          values[b][i] = old_values[best[b]][i];
          residual[b][i] = old_residual[best[b]][i];
          bound[b][i] = old_bound[best[b]][i];
        }
    };
    const bool origin_on_axis = s_grid[start] == 0.0;
    const bool origin_right = !origin_on_axis && s_grid[start] > 0.0;
    relabel(origin_right ? start : start + 1, count);
    relabel(0, (origin_on_axis || origin_right) ? start : start + 1);
  }

  std::vector<Curve> curves(m);
  for (std::size_t b = 0; b < m; ++b) {
    curves[b].parameter = CurveParameter::s;
    curves[b].grid.assign(s_grid.begin(), s_grid.end());
    curves[b].values = values[b];
    curves[b].residual = residual[b];
    curves[b].error_bound = bound[b];
    curves[b].breaks = breaks[b];
    curves[b].branch_id = static_cast<int>(b) + 1;
    curves[b].N = N;
    curves[b].t_reg = t_reg;
  }
  return curves;
}

Curve track_resonance_in_s(const PotentialSpec& spec, const Eigenpair& pair, std::span<const double> s_grid,
                           double t_reg, const TrackOptions& opts) {
  return track_resonance_branches(spec, std::span(&pair, 1), s_grid, t_reg, {}, opts).front();
}

}  // namespace embres
