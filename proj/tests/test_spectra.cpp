#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "embres/errors.hpp"
#include "embres/spectra.hpp"
#include "oracles.hpp"

using namespace embres;
using oracle::I;

namespace {

const double pi = std::numbers::pi;

double distance_to(const std::vector<cplx>& set, cplx z) {
  double best = INFINITY;
  for (cplx w : set) best = std::min(best, std::abs(w - z));
  return best;
}

// |<a, b>| = ||a|| ||b|| up to tol, i.e. equal up to a unimodular factor when both are unit vectors.
bool same_ray(const FourierVector& a, const FourierVector& b, double tol) {
  return std::abs(std::abs(inner(a, b)) - norm(a) * norm(b)) <= tol;
}

}  // namespace

TEST_CASE("simple fiber: eigenvalue 0 with eigenfunction e^{ix1} / 2 pi") {
  const auto op = assemble_fiber(PotentialSpec::catalog("simple"), 0, 3);
  const auto pairs = eigs_near(op, 0.0, 1);
  REQUIRE(pairs.size() == 1);
  CHECK(std::abs(pairs[0].lambda) <= 1e-14);
  CHECK(pairs[0].residual <= 1e-10);
  const auto& v = pairs[0].vector;
  CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(v[1] - 1.0 / (2 * pi)) <= 1e-13);  // phase: first significant coefficient real positive
  for (int n = -3; n <= 3; ++n)
    if (n != 1) CHECK(std::abs(v[n]) <= 1e-13);
}

TEST_CASE("free fiber spectrum 2cos(j pi / (2N + 2))") {
  const auto zero = PotentialSpec::tabulated({}, {});
  for (int N : {1, 2, 5, 40}) {
    const auto op = assemble_fiber(zero, 0, N);
    std::vector<double> exact;
    for (int j = 1; j <= 2 * N + 1; ++j) exact.push_back(2.0 * std::cos(j * pi / (2 * N + 2)));
    const auto all = eigs_near(op, 0.0, 2 * N + 1);
    REQUIRE(all.size() == exact.size());
    std::vector<double> got;
    for (const auto& p : all) {
      CHECK(std::abs(p.lambda.imag()) <= 1e-12);
      got.push_back(p.lambda.real());
    }
    std::sort(got.begin(), got.end());
    std::sort(exact.begin(), exact.end());
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - exact[k]) <= 1e-12);
  }
  // Iterative path (block much smaller than the matrix).
  const int N = 60;
  const auto op = assemble_fiber(zero, 0, N);
  const auto few = eigs_near(op, 0.7, 3);
  std::vector<cplx> exact;
  for (int j = 1; j <= 2 * N + 1; ++j) exact.push_back(2.0 * std::cos(j * pi / (2 * N + 2)));
  for (const auto& p : few) CHECK(distance_to(exact, p.lambda) <= 1e-12);
  std::sort(exact.begin(), exact.end(), [](cplx a, cplx b) { return std::abs(a - 0.7) < std::abs(b - 0.7); });
  for (int k = 0; k < 3; ++k) CHECK(distance_to({few[0].lambda, few[1].lambda, few[2].lambda}, exact[k]) <= 1e-12);
}

TEST_CASE("vis fiber: eigenpairs at 0 and 1") {
  const auto op = assemble_fiber(PotentialSpec::catalog("vis"), 0, 8);
  const double c = 1.0 / (2.0 * std::sqrt(2.0) * pi);

  const auto p1 = eigs_near(op, 0.0, 1).front();
  CHECK(std::abs(p1.lambda) <= 1e-12);
  FourierVector u1(0, -2, Eigen::Vector2cd(c, I * c));  // (e^{-2ix} + i e^{-ix}) / (2 sqrt2 pi)
  CHECK(same_ray(p1.vector, u1, 1e-12));

  const auto p2 = eigs_near(op, 1.0, 1).front();
  CHECK(std::abs(p2.lambda - 1.0) <= 1e-12);
  FourierVector u2(0, 0, Eigen::Vector2cd(I * c, c));  // (i + e^{ix}) / (2 sqrt2 pi)
  CHECK(same_ray(p2.vector, u2, 1e-12));
  // Phase convention picks the representative with real positive leading coefficient.
  CHECK(std::abs(p2.vector[0] - c) <= 1e-12);
  CHECK(std::abs(p2.vector[1] + I * c) <= 1e-12);
}

TEST_CASE("multi fiber: double eigenvalue 0 with canonical basis") {
  const auto op = assemble_fiber(PotentialSpec::catalog("multi"), 0, 6);
  const auto pairs = eigs_near(op, 0.0, 2);
  REQUIRE(pairs.size() == 2);
  for (const auto& p : pairs) CHECK(std::abs(p.lambda) <= 1e-12);
  CHECK(std::abs(pairs[0].vector[-1] - 1.0 / (2 * pi)) <= 1e-12);
  CHECK(std::abs(pairs[1].vector[1] - 1.0 / (2 * pi)) <= 1e-12);
  CHECK(std::abs(inner(pairs[0].vector, pairs[1].vector)) <= 1e-12);

  const auto spectrum = full_spectrum(op);
  const auto zeros = std::count_if(spectrum.begin(), spectrum.end(), [](cplx z) { return std::abs(z) <= 1e-9; });
  CHECK(zeros == 2);
}

TEST_CASE("full_spectrum basics") {
  const auto simple = PotentialSpec::catalog("simple");
  for (int N : {1, 4, 30}) CHECK(full_spectrum(assemble_fiber(simple, 0, N)).size() == std::size_t(2 * N + 1));
  for (double t : {1e-3, 0.2}) {
    const auto spec = full_spectrum(assemble_fiber(simple, 0, 10, 0.0, t));
    CHECK(distance_to(spec, cplx(0.0, -t)) <= 1e-14);
  }
  CHECK_THROWS_AS(full_spectrum(assemble_fiber(simple, 0, 20), 11), std::invalid_argument);
}

TEST_CASE("property: Hermitian truncations have real spectra") {
  for (const char* id : {"simple", "multi", "vis"})
    for (int n2 : {-1, 0, 2})
      for (int N : {3, 50, n2 == 0 ? 200 : 100}) {
        double worst = 0.0;
        for (cplx z : full_spectrum(assemble_fiber(PotentialSpec::catalog(id), n2, N))) worst = std::max(worst, std::abs(z.imag()));
        CHECK(worst <= 1e-12);
      }
}

TEST_CASE("property: viscosity moves the spectrum into the closed lower half-plane") {
  for (const char* id : {"simple", "multi", "vis"})
    for (double t : {1e-3, 1e-2, 1e-1}) {
      double top = -INFINITY;
      for (cplx z : full_spectrum(assemble_fiber(PotentialSpec::catalog(id), 0, 40, 0.0, t))) top = std::max(top, z.imag());
      CHECK(top <= 1e-12);
    }
}

TEST_CASE("property: eigs_near is a subset of full_spectrum") {
  auto gen = oracle::rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const char* ids[] = {"simple", "multi"};
  for (int trial = 0; trial < 40; ++trial) {
    const auto spec = PotentialSpec::catalog(ids[trial % 2]);
    const int N = 10 + 9 * (trial % 11);  // 2N + 1 <= 201
    const double s = 0.5 * u(gen);
    const double t = trial % 3 == 0 ? 0.0 : 0.01 * (1 + u(gen));
    const auto op = assemble_fiber(spec, trial % 3 - 1, N, s, t);
    const auto all = full_spectrum(op);
    const cplx shift(u(gen), 0.2 * u(gen));
    const auto near = eigs_near(op, shift, 1 + trial % 4);
    for (const auto& p : near) {
      CHECK(distance_to(all, p.lambda) <= 1e-9);
      CHECK(p.residual <= 1e-10 * std::max(1.0, op.bands.norm_inf()));
      CHECK(norm(p.vector) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // They are the closest ones.
    std::vector<double> d;
    for (cplx z : all) d.push_back(std::abs(z - shift));
    std::sort(d.begin(), d.end());
    for (const auto& p : near) CHECK(std::abs(p.lambda - shift) <= d[near.size() - 1] + 1e-9);
  }
}

TEST_CASE("warm starts and bare tridiagonal matrices") {
  const auto op = assemble_fiber(PotentialSpec::catalog("simple"), 0, 100, 0.1, 1e-3);
  const auto cold = eigs_near(op.bands, cplx(0.0, -0.005), 1);
  EigsOptions warm;
  warm.start = {cold[0].vector};
  const auto again = eigs_near(op.bands, cold[0].value, 1, warm);
  CHECK(std::abs(again[0].value - cold[0].value) <= 1e-12);
  CHECK(again[0].vector.norm() == doctest::Approx(1.0));
  EigsOptions bad;
  bad.start = {Eigen::VectorXcd::Ones(3)};
  CHECK_THROWS_AS(eigs_near(op.bands, 0.0, 1, bad), std::invalid_argument);
  CHECK_THROWS_AS(eigs_near(op, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(eigs_near(op, 0.0, 202), std::invalid_argument);
}

TEST_CASE("non-convergence is reported with the attained residual") {
  auto gen = oracle::rng(8);
  Tridiagonal<cplx> m(150);
  std::normal_distribution<double> d;
  for (int k = 0; k < 150; ++k) m.diag(k) = cplx(d(gen), d(gen));
  for (int k = 0; k < 149; ++k) {
    m.lower(k) = cplx(d(gen), d(gen));
    m.upper(k) = 0.01 * cplx(d(gen), d(gen));
  }
  EigsOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-300;
  opts.residual_bound = 1e-300;
  opts.dense_fallback = 0;
  try {
    (void)eigs_near(m, 0.0, 2, opts);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.diagnostic() > 0.0);
  }
  // Small enough for the dense fallback: same request succeeds.
  opts.dense_fallback = 150;
  opts.residual_bound = 1e-10;
  const auto pairs = eigs_near(m, 0.0, 2, opts);
  CHECK(pairs.size() == 2);
  CHECK(pairs[0].residual <= 1e-10 * m.norm_inf());
}

TEST_CASE("grad_norm_sq") {
  const double c = 1.0 / (2.0 * std::sqrt(2.0) * pi);
  CHECK(grad_norm_sq(FourierVector(0, 0, Eigen::Vector2cd(I * c, c))) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(grad_norm_sq(FourierVector(0, -2, Eigen::Vector2cd(c, I * c))) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(grad_norm_sq(FourierVector::mode(0, 0, 1.0 / (2 * pi))) == 0.0);
  CHECK(grad_norm_sq(FourierVector::mode(3, 4, 1.0 / (2 * pi))) == doctest::Approx(25.0));
}

TEST_CASE("fix_phase") {
  Eigen::VectorXcd v(3);
  v << 1e-12, cplx(0.0, -2.0), 1.0;
  fix_phase(v);
  CHECK(std::abs(v(1) - 2.0) <= 1e-15);
  CHECK(std::abs(v(2) - I) <= 1e-15);
}
