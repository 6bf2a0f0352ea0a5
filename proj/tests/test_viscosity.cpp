#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "embres/puiseux.hpp"
#include "embres/viscosity.hpp"
#include "oracles.hpp"

using namespace embres;
using oracle::I;

namespace {

const double pi = std::numbers::pi;

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(lo * std::pow(hi / lo, double(k) / (n - 1)));
  return g;
}

Eigenpair pair_near(const char* id, int N, cplx target) {
  return eigs_near(assemble_fiber(PotentialSpec::catalog(id), 0, N), target, 1).front();
}

Curve synthetic(std::vector<double> grid, auto f) {
  Curve c;
  c.grid = std::move(grid);
  for (double t : c.grid) c.values.push_back(f(t));
  return c;
}

}  // namespace

TEST_CASE("viscous_truncation") {
  CHECK(viscous_truncation(1e-6) == 1000);
  CHECK(viscous_truncation(1.0) == 10);
  CHECK(viscous_truncation(100.0) == 8);
  CHECK(viscous_truncation(1e-12) == 20000);
  CHECK_THROWS_AS(viscous_truncation(0.0), std::invalid_argument);
}

TEST_CASE("simple catalog: lambda(t) = -i t") {
  const auto spec = PotentialSpec::catalog("simple");
  const auto grid = log_grid(1e-4, 1e-1, 10);
  const auto curve = track_viscous_eigenvalue(spec, pair_near("simple", 8, 0.0), grid);
  REQUIRE(curve.values.size() == grid.size());
  CHECK(curve.parameter == CurveParameter::t);
  CHECK(curve.breaks.empty());
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(std::abs(curve.values[k] + I * grid[k]) <= 1e-12);
  CHECK(std::abs(fd_slope(curve) + I) <= 1e-9);

  const std::vector<double> zero{0.0};
  const auto flat = track_viscous_eigenvalue(spec, pair_near("simple", 8, 0.0), zero);
  REQUIRE(flat.values.size() == 1);
  CHECK(std::abs(flat.values[0]) <= 1e-14);
}

TEST_CASE("vis catalog: derivative formula and finite-difference slopes") {
  const auto grid = log_grid(1e-4, 1e-2, 9);
  struct Case {
    cplx target, slope;
  };
  for (const auto& [target, slope] : {Case{0.0, -2.5 * I}, Case{1.0, -0.5 * I}}) {
    const auto pair = pair_near("vis", 8, target);
    CHECK(std::abs(viscosity_derivative(pair) - slope) <= 1e-12);
    const auto curve = track_viscous_eigenvalue(PotentialSpec::catalog("vis"), pair, grid);
    CHECK(curve.breaks.empty());
    CHECK(std::abs(fd_slope(curve) - slope) / std::abs(slope) <= 1e-2);
    for (cplx z : curve.values) CHECK(z.imag() <= 1e-12);
  }
  Eigenpair constant{0.0, FourierVector::mode(0, 0, 1.0 / (2 * pi))};
  CHECK(viscosity_derivative(constant) == cplx(0.0));
}

TEST_CASE("fd_slope on synthetic curves") {
  const auto linear = synthetic({1e-3, 2e-3, 3e-3}, [](double t) { return -I * t; });
  CHECK(std::abs(fd_slope(linear) + I) <= 1e-12);
  const auto quad = synthetic({0.01, 0.02, 0.04, 0.08}, [](double t) { return -I * t + t * t; });
  CHECK(std::abs(fd_slope(quad) + I) <= 1e-12);
  for (double h : {1e-2, 5e-3}) {
    const auto cubic = synthetic({h, 2 * h, 3 * h}, [](double t) { return -I * t + t * t * t; });
    CHECK(std::abs(fd_slope(cubic) + I) <= 12 * h * h);  // exact error 11 h^2
  }
  CHECK_THROWS_AS(fd_slope(synthetic({1e-3, 2e-3}, [](double t) { return cplx(t); })), std::invalid_argument);
}

TEST_CASE("grid validation and breaks") {
  const auto spec = PotentialSpec::catalog("vis");
  const auto pair = pair_near("vis", 8, 0.0);
  const std::vector<double> unsorted{1e-3, 1e-4};
  const std::vector<double> repeated{1e-3, 1e-3};
  const std::vector<double> negative{-1e-3, 1e-3};
  const std::vector<double> empty;
  CHECK_THROWS_AS(track_viscous_eigenvalue(spec, pair, unsorted), std::invalid_argument);
  CHECK_THROWS_AS(track_viscous_eigenvalue(spec, pair, repeated), std::invalid_argument);
  CHECK_THROWS_AS(track_viscous_eigenvalue(spec, pair, negative), std::invalid_argument);
  CHECK_THROWS_AS(track_viscous_eigenvalue(spec, pair, empty), std::invalid_argument);

  // Steps of about 2.5e-3 (the first one measured from the t = 0 eigenvalue) exceed a bound of 1e-3.
  TrackOptions tight;
  tight.step_bound = 1e-3;
  const std::vector<double> grid{1e-3, 2e-3, 3e-3, 3.1e-3};
  const auto curve = track_viscous_eigenvalue(spec, pair, grid, tight);
  CHECK(curve.breaks == std::vector<std::size_t>{0, 1, 2});
  CHECK(curve.values.size() == grid.size());
}

TEST_CASE("resonance curve of the simple catalog") {
  const auto spec = PotentialSpec::catalog("simple");
  const auto pair = pair_near("simple", 16, 0.0);
  std::vector<double> s_grid;
  for (int j = -6; j <= 6; ++j) s_grid.push_back(0.05 * j);
  const auto curve = track_resonance_in_s(spec, pair, s_grid);
  REQUIRE(curve.values.size() == s_grid.size());
  CHECK(curve.parameter == CurveParameter::s);
  CHECK(curve.t_reg == 1e-6);
  CHECK(curve.breaks.empty());
  for (cplx z : curve.values) CHECK(z.imag() <= 1e-12);

  // Im lambda is even to leading order: the s^2 term dominates the s term.
  std::vector<BranchSample> samples;
  for (std::size_t k = 0; k < s_grid.size(); ++k) samples.push_back({s_grid[k], curve.values[k]});
  const auto model = fit_branch(samples, curve.values[6]);
  CHECK(model.p == 1);
  CHECK(std::abs(model.coefficient(2).imag()) >= 10 * std::abs(model.coefficient(1).imag()));
  CHECK(std::abs(model.coefficient(2).imag() + 0.4739) <= 0.1 * 0.4739);
  // Re lambda is continuous through s = 0.
  CHECK(std::abs(curve.values[5].real() - curve.values[6].real()) <= 0.05);
  CHECK(std::abs(curve.values[7].real() - curve.values[6].real()) <= 0.05);

  const std::vector<double> origin{0.0};
  const auto single = track_resonance_in_s(spec, pair, origin);
  REQUIRE(single.values.size() == 1);
  CHECK(std::abs(single.values[0] + I * 1e-6) <= 1e-12);
  CHECK_THROWS_AS(track_resonance_in_s(spec, pair, origin, 0.0), std::invalid_argument);
}

TEST_CASE("resonance branches of the multi catalog stay in the lower half-plane") {
  const auto spec = PotentialSpec::catalog("multi");
  const auto basis = eigs_near(assemble_fiber(spec, 0, 16), 0.0, 2);
  const std::vector<double> s_grid{-0.1, -0.05, 0.0, 0.05, 0.1};
  const auto curves = track_resonance_branches(spec, basis, s_grid);
  REQUIRE(curves.size() == 2);
  CHECK(curves[0].branch_id == 1);
  CHECK(curves[1].branch_id == 2);
  for (const auto& c : curves)
    for (cplx z : c.values) CHECK(z.imag() <= 1e-12);
  const std::vector<cplx> wrong{0.0};
  CHECK_THROWS_AS(track_resonance_branches(spec, basis, s_grid, 1e-6, wrong), std::invalid_argument);
}

TEST_CASE("ill-conditioned points are flagged, not silently kept") {
  const auto spec = PotentialSpec::catalog("simple");
  const std::vector<Eigenpair> basis{pair_near("simple", 16, 0.0)};
  const std::vector<cplx> predicted{cplx(0.0568, -0.4654)};
  std::vector<double> s_grid;
  for (int j = -6; j <= 6; ++j) s_grid.push_back(0.05 * j);

  const auto coarse = track_resonance_branches(spec, basis, s_grid, 1e-6, predicted).front();
  CHECK(coarse.breaks.empty());
  REQUIRE(coarse.error_bound.size() == s_grid.size());
  for (double e : coarse.error_bound) CHECK(e <= 1e-6);

  // At t_reg = 1e-7 the largest |s| pick up boundary pseudomodes.
  const auto fine = track_resonance_branches(spec, basis, s_grid, 1e-7, predicted).front();
  CHECK_FALSE(fine.breaks.empty());
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    const bool flagged = std::find(fine.breaks.begin(), fine.breaks.end(), k) != fine.breaks.end();
    if (std::abs(s_grid[k]) <= 0.1) CHECK_FALSE(flagged);
    if (!flagged) CHECK(std::abs(fine.values[k] - coarse.values[k]) <= 1e-5);
  }
}
