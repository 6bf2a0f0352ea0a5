#include "embres/perturbation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace embres {

namespace {

constexpr double cluster_tol = 1e-8;

// v - sum_k <v, u_k> u_k
FourierVector project_out(FourierVector v, std::span<const FourierVector> basis) {
  for (const auto& u : basis) v -= inner(v, u) * u;
  return v;
}

// Restriction of a source to [-N, N]. Coefficients at roundoff level relative to the largest one
// may be dropped; anything larger outside the window is an error.
FourierVector source_on_window(const FourierVector& v, int N) {
  const double scale = v.empty() ? 0.0 : v.coeffs().cwiseAbs().maxCoeff();
  return v.on_window(N, 1e-13 * scale);
}

std::vector<FourierVector> basis_on_window(std::span<const Eigenpair> basis, int N) {
  std::vector<FourierVector> out;
  for (const auto& p : basis) out.push_back(p.vector.on_window(N));
  return out;
}

}  // namespace

FermiGoldenRule fermi_golden_rule(const PotentialSpec& spec, const Eigenpair& pair, int N, const LimitOptions& opts) {
  const FiberOperator op = assemble_fiber(spec, pair.vector.n2(), N);
  const auto nearby = eigs_near(op, pair.lambda, 2);
  if (std::abs(nearby[1].lambda - pair.lambda) < cluster_tol)
    throw std::invalid_argument("fermi_golden_rule: eigenvalue is not simple (cluster of size >= 2 at " +
                                std::to_string(pair.lambda.real()) + ")");

  const std::vector<FourierVector> u = basis_on_window(std::span(&pair, 1), N);
  FermiGoldenRule out;
  out.source = source_on_window(project_out(apply_pdot(spec, u[0]), u), N);
  out.resolvent = limiting_absorption_limit(op, pair.lambda, out.source, opts);
  out.regular = project_out(out.resolvent.coeffs, u);
  out.im_lambda_ddot = -2.0 * std::imag(inner(out.regular, out.source));
  return out;
}

AdotMatrix adot_matrix(const PotentialSpec& spec, std::span<const Eigenpair> basis, int N, const LimitOptions& opts,
                       std::span<const std::vector<PinnedCoefficient>> pins) {
  if (basis.empty()) throw std::invalid_argument("adot_matrix: empty basis");
  if (!pins.empty() && pins.size() != basis.size())
    throw std::invalid_argument("adot_matrix: need one pin list per basis vector");
  const cplx lambda = basis[0].lambda;
  const int n2 = basis[0].vector.n2();
  for (const auto& p : basis)
    if (std::abs(p.lambda - lambda) >= cluster_tol || p.vector.n2() != n2)
      throw std::invalid_argument("adot_matrix: basis vectors do not share one eigenvalue and fiber");

  const std::vector<FourierVector> u = basis_on_window(basis, N);
  const auto m = static_cast<Eigen::Index>(u.size());
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      if (std::abs(inner(u[i], u[j]) - (i == j ? 1.0 : 0.0)) > 1e-8)
        throw std::invalid_argument("adot_matrix: basis is not orthonormal");

  const FiberOperator op = assemble_fiber(spec, n2, N);
  AdotMatrix out;
  out.entries.resize(m, m);
  out.first_order.resize(m, m);
  std::vector<FourierVector> regular;
  for (Eigen::Index i = 0; i < m; ++i) {
    const FourierVector pdot_u = apply_pdot(spec, u[i]);
    for (Eigen::Index j = 0; j < m; ++j) out.first_order(i, j) = inner(pdot_u, u[j]);
    out.sources.push_back(source_on_window(project_out(pdot_u, u), N));
    const auto pin_list = pins.empty() ? std::span<const PinnedCoefficient>{}
                                       : std::span<const PinnedCoefficient>(pins[static_cast<std::size_t>(i)]);
    out.resolvents.push_back(limiting_absorption_limit(op, lambda, out.sources.back(), opts, pin_list));
    regular.push_back(project_out(out.resolvents.back().coeffs, u));
  }
  // Pdot is self-adjoint: <Pdot E Pdot u_i, u_j> = <E Pdot u_i, Pdot u_j>.
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) out.entries(i, j) = -inner(regular[i], out.sources[j]);
  return out;
}

std::pair<cplx, cplx> quadratic_branches(const Eigen::MatrixXcd& a) {
  if (a.rows() != 2 || a.cols() != 2) throw std::invalid_argument("quadratic_branches: need a 2x2 matrix");
  const cplx mean = (a(0, 0) + a(1, 1)) / 2.0;
  const cplx half_root = std::sqrt((a(0, 0) - a(1, 1)) * (a(0, 0) - a(1, 1)) + 4.0 * a(0, 1) * a(1, 0)) / 2.0;
  return {mean + half_root, mean - half_root};
}

}  // namespace embres
